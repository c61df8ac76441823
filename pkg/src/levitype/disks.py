"""Jets of J-holomorphic disks and their contact with a hypersurface.

A disk jet is a polynomial map u: (R^2, 0) -> (R^(2n), 0) in disk coordinates
(x, y), truncated at a cap.  The structure equation is the transport system

    du/dy = J(u) . du/dx,

which determines the whole jet from the x-axis derivatives u_m = d^m u/dx^m(0)
degree by degree: writing u = sum c_{p,q} x^p y^q, matching the coefficient of
x^(m-1-q) y^q gives

    (q+1) c_{m-1-q, q+1} = (m-q) J_std c_{m-q, q} + R_{m-1-q, q},

where R collects the positive-degree part of J composed with the part of the
jet already known (total degree < m).  The split is exact: the unknown top
stratum of du/dx only ever meets the constant term of J - J_std, which is
zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .errors import CapError, GeometryError, TheoremViolation
from .geometry import ACStructure, Hypersurface, apply_jstd
from .jets import TruncatedSeries
from .rational import Q, ZERO, rat


class DiskJet:
    """Polynomial jet of a disk, components as 2-variable series, u(0) = 0."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components):
        components = tuple(components)
        if len(components) != 2 * n:
            raise ValueError(f"need {2 * n} components, got {len(components)}")
        cap = components[0].cap
        for c in components:
            if c.num_vars != 2:
                raise ValueError("disk components live in 2 variables")
            if c.cap != cap:
                raise ValueError("components must share one cap")
            if c.constant_term() != 0:
                raise GeometryError("disk jets are centered: u(0) must be 0")
        self.n = n
        self.components = components

    @property
    def cap(self) -> int:
        return self.components[0].cap

    def coefficient(self, p: int, q: int):
        return tuple(c.coefficient((p, q)) for c in self.components)

    def derivative(self, p: int, q: int):
        """The vector d^(p+q) u / dx^p dy^q at 0."""
        f = Q(factorial(p) * factorial(q))
        return tuple(v * f for v in self.coefficient(p, q))

    def truncate(self, cap: int) -> "DiskJet":
        if cap == self.cap:
            return self
        return DiskJet(self.n, [c.truncate(cap) for c in self.components])

    def __eq__(self, other):
        if not isinstance(other, DiskJet):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    __hash__ = None

    def __repr__(self):
        return f"DiskJet(n={self.n}, cap={self.cap})"


def propagate_cr_jet(x_derivs, j: ACStructure, order: int | None = None) -> DiskJet:
    """Disk jet with the given x-axis derivatives, transported by J.

    x_derivs[m-1] is d^m u/dx^m(0) for m = 1..len(x_derivs); missing orders up
    to the requested cap are padded with zero.  The returned jet satisfies the
    transport equation through cap-1 and is the unique such jet.
    """
    n = j.n
    derivs = [tuple(rat(v) for v in vec) for vec in x_derivs]
    for vec in derivs:
        if len(vec) != 2 * n:
            raise ValueError("x-axis derivative has wrong arity")
    if order is None:
        order = len(derivs)
    if order < len(derivs):
        derivs = derivs[:order]
    while len(derivs) < order:
        derivs.append(tuple(ZERO for _ in range(2 * n)))
    if not j.is_standard and j.cap < max(order - 1, 0):
        raise CapError(
            f"structure cap {j.cap} too small to transport to order {order}"
        )

    coeff: dict = {}
    f = 1
    for m in range(1, order + 1):
        f *= m
        coeff[(m, 0)] = tuple(v / f for v in derivs[m - 1])

    if j.is_standard:
        for m in range(1, order + 1):
            for q in range(m):
                prev = coeff[(m - q, q)]
                scale = Q(m - q, q + 1)
                coeff[(m - 1 - q, q + 1)] = tuple(
                    scale * v for v in apply_jstd(prev))
    else:
        n2 = 2 * n
        std_const = {}
        for i in range(n):
            std_const[(2 * i, 2 * i + 1)] = Q(-1)
            std_const[(2 * i + 1, 2 * i)] = Q(1)
        j_plus = []
        for a in range(n2):
            for b in range(n2):
                e = j.entries[a][b]
                c0 = std_const.get((a, b), ZERO)
                if c0 != 0:
                    e = e - TruncatedSeries.constant(c0, n2, j.cap)
                if not e.is_zero():
                    j_plus.append((a, b, e))
        for m in range(1, order + 1):
            low = m - 1
            r_rows = None
            if low >= 1:
                comps = []
                for i in range(n2):
                    terms = {}
                    for (p, q), vec in coeff.items():
                        if p + q <= low and vec[i] != 0:
                            terms[(p, q)] = vec[i]
                    comps.append(TruncatedSeries(2, low, terms))
                ux = []
                for i in range(n2):
                    terms = {}
                    for (p, q), vec in coeff.items():
                        if p >= 1 and p + q <= low and vec[i] != 0:
                            terms[(p - 1, q)] = vec[i] * p
                    ux.append(TruncatedSeries(2, low, terms))
                r_rows = [TruncatedSeries.zero(2, low) for _ in range(n2)]
                for a, b, e in j_plus:
                    if ux[b].is_zero():
                        continue
                    composed = e.truncate(low).compose(comps)
                    if not composed.is_zero():
                        r_rows[a] = r_rows[a] + composed * ux[b]
            for q in range(m):
                prev = coeff[(m - q, q)]
                top = apply_jstd(prev)
                scale = Q(m - q)
                new = [scale * v for v in top]
                if r_rows is not None:
                    for i in range(n2):
                        new[i] = new[i] + r_rows[i].coefficient((m - 1 - q, q))
                inv = Q(1, q + 1)
                coeff[(m - 1 - q, q + 1)] = tuple(inv * v for v in new)

    comps = []
    for i in range(2 * n):
        terms = {}
        for (p, q), vec in coeff.items():
            if vec[i] != 0:
                terms[(p, q)] = vec[i]
        comps.append(TruncatedSeries(2, order, terms))
    return DiskJet(n, comps)


def is_cr_jet(u: DiskJet, j: ACStructure) -> bool:
    """Check du/dy = J(u) du/dx coefficientwise through cap-1."""
    if u.cap == 0:
        return True
    low = u.cap - 1
    if not j.is_standard and j.cap < low:
        raise CapError("structure cap too small for the check")
    ux = [c.partial(0) for c in u.components]
    uy = [c.partial(1) for c in u.components]
    comps = [c.truncate(low) for c in u.components]
    n2 = 2 * u.n
    for i in range(n2):
        acc = TruncatedSeries.zero(2, low)
        for b in range(n2):
            e = j.entries[i][b]
            if e.is_zero() or ux[b].is_zero():
                continue
            acc = acc + e.truncate(low).compose(comps) * ux[b]
        if not (uy[i] - acc).is_zero():
            return False
    return True


class DiskTrace:
    """The restriction phi . u of a defining function to a disk jet."""

    __slots__ = ("series",)

    def __init__(self, series: TruncatedSeries):
        if series.num_vars != 2:
            raise ValueError("a trace is a series in the 2 disk variables")
        self.series = series

    @property
    def cap(self) -> int:
        return self.series.cap

    def a(self, p: int, q: int):
        """Derivative d^(p+q)(phi . u)/dx^p dy^q at 0."""
        return self.series.coefficient((p, q)) * factorial(p) * factorial(q)

    def levi_entry(self, p: int, q: int):
        """The combination a(p+2, q) + a(p, q+2)."""
        return self.a(p + 2, q) + self.a(p, q + 2)

    def vanishing_order(self):
        """(order, exact): smallest total degree of a nonzero term.

        When the trace is zero through the cap the order is cap + 1 and the
        flag is False: only a lower bound is known at this truncation.
        """
        v = self.series.valuation()
        if v is None:
            return self.cap + 1, False
        return v, True


def compose_phi_u(m: Hypersurface, u: DiskJet) -> DiskTrace:
    """phi . u, reliable through min(phi.cap, u.cap).

    Dropped strata of phi start at degree phi.cap + 1 and u has no constant
    term, so they cannot pollute the kept degrees.
    """
    cap = min(m.cap, u.cap)
    phi = m.phi.truncate(cap)
    comps = [c.truncate(cap) for c in u.components]
    return DiskTrace(phi.compose(comps))


@dataclass(frozen=True)
class ContactOrder:
    order: int
    exact: bool


def contact_order(m: Hypersurface, u: DiskJet) -> ContactOrder:
    """Order of vanishing of phi . u at 0, as far as the caps can see."""
    order, exact = compose_phi_u(m, u).vanishing_order()
    return ContactOrder(order, exact)


def holomorphic_reparam_series(coeffs, cap: int):
    """(Re theta, Im theta) for theta(z) = sum coeffs[k-1] z^k, as 2-var series.

    Coefficients are (re, im) pairs or rationals; theta(0) = 0 by shape and
    theta'(0) = coeffs[0] must be nonzero.
    """
    from math import comb
    pairs = []
    for c in coeffs:
        if isinstance(c, tuple):
            pairs.append((rat(c[0]), rat(c[1])))
        else:
            pairs.append((rat(c), ZERO))
    if not pairs or (pairs[0][0] == 0 and pairs[0][1] == 0):
        raise GeometryError("reparametrization needs theta'(0) != 0")
    re_terms: dict = {}
    im_terms: dict = {}
    for k, (a, b) in enumerate(pairs, start=1):
        if k > cap or (a == 0 and b == 0):
            continue
        for s in range(k + 1):
            c = Q(comb(k, s))
            if s % 2 == 0:
                re_zk = c if s % 4 == 0 else -c
                im_zk = ZERO
            else:
                im_zk = c if s % 4 == 1 else -c
                re_zk = ZERO
            exps = (k - s, s)
            re_val = a * re_zk - b * im_zk
            im_val = a * im_zk + b * re_zk
            if re_val != 0:
                re_terms[exps] = re_terms.get(exps, ZERO) + re_val
            if im_val != 0:
                im_terms[exps] = im_terms.get(exps, ZERO) + im_val
    return (TruncatedSeries(2, cap, re_terms), TruncatedSeries(2, cap, im_terms))


def reparametrize_disk_jet(u: DiskJet, coeffs,
                           j: ACStructure | None = None) -> DiskJet:
    """Precompose the jet with a holomorphic polynomial z -> theta(z).

    Composition with a holomorphic change of disk variable preserves the
    transport equation through the cap, so the result is again a disk jet
    for the same structure.  When the structure is supplied that claim is
    verified rather than trusted.
    """
    re_s, im_s = holomorphic_reparam_series(coeffs, u.cap)
    out = DiskJet(u.n, [c.compose([re_s, im_s]) for c in u.components])
    if j is not None and not is_cr_jet(out, j):
        raise TheoremViolation(
            "holomorphic reparametrization broke the transport equation")
    return out
