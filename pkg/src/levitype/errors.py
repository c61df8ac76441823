"""Error hierarchy.

The CLI maps these to exit codes: ParseError -> 2, GeometryError -> 3,
CapError -> 4.  TheoremViolation signals that an identity the algorithms are
entitled to rely on failed, which always means a bug, never bad user input.
"""


class LevitypeError(Exception):
    """Base class for all package errors."""


class ParseError(LevitypeError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class GeometryError(LevitypeError):
    """Invalid geometric input: dphi(0)=0, J*J != -I, point off the surface,

    a field that is not complex tangent where tangency is required, and so on.
    """


class CapError(LevitypeError):
    """A computation would need more truncation depth than the series carry."""


class TheoremViolation(LevitypeError):
    """An exact identity guaranteed by the theory failed: implementation bug."""


class ClosedFormMismatch(LevitypeError):
    """The printed closed form disagrees with the disk-route definition.

    Carries both values so callers can report the discrepancy.
    """

    def __init__(self, p: int, q: int, printed, disk_route):
        self.p = p
        self.q = q
        self.printed = printed
        self.disk_route = disk_route
        super().__init__(
            f"closed form for L^({p},{q}) evaluates to {printed} but the "
            f"disk-route definition gives {disk_route}; the printed formula "
            "is not trusted for this input"
        )
