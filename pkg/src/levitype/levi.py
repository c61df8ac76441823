"""Levi forms: two independent routes, polar form, classification, L^{p,q}.

The Levi form of a complex tangent field X is dphi(J[X,JX]) evaluated at the
origin.  A second route expresses the same number through the flat Hessian of
phi plus a correction built from first derivatives of J; the two routes share
no code and are cross-checked in tests.  The higher forms L^{p,q} are computed
by their defining contract: propagate a disk jet from prescribed x-derivatives,
compose with phi, take the Laplacian in the disk variables, and read one
derivative at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from . import linalg
from .disks import compose_phi_u, propagate_cr_jet
from .errors import CapError, ClosedFormMismatch, GeometryError
from .geometry import (
    ACStructure,
    Hypersurface,
    VectorField,
    apply_jstd,
    complex_tangent_basis,
    is_complex_tangent,
    lie_bracket,
)
from .jets import TruncatedSeries
from .rational import QC, ZERO, rat


@dataclass(frozen=True)
class LeviReport:
    value: object
    route: str
    correction_term: object


def _require_tangent(m: Hypersurface, j: ACStructure, x: VectorField, who: str):
    if not is_complex_tangent(m, j, x):
        raise GeometryError(
            f"{who} needs a complex tangent field: dphi(X) and dphi(JX) "
            "must vanish identically"
        )


def levi_form_bracket(m: Hypersurface, j: ACStructure, x: VectorField) -> LeviReport:
    """L(X) = dphi(J[X, JX]) at 0."""
    _require_tangent(m, j, x, "levi_form_bracket")
    jx = j.apply(x)
    cap = min(x.cap, jx.cap)
    br = lie_bracket(x.truncate(cap), jx.truncate(cap))
    value = m.dphi_at_zero(j.apply(br).at_zero())
    return LeviReport(value, "bracket", ZERO)


def _hessian_at_zero(m: Hypersurface):
    n2 = 2 * m.n
    h = [[ZERO] * n2 for _ in range(n2)]
    for i in range(n2):
        for k in range(i, n2):
            exps = tuple(
                (2 if t == i else 0) if i == k else (1 if t in (i, k) else 0)
                for t in range(n2)
            )
            c = m.phi.coefficient(exps)
            v = 2 * c if i == k else c
            h[i][k] = v
            h[k][i] = v
    return h


def _bilinear(h, v, w):
    total = ZERO
    for i, vi in enumerate(v):
        if vi == 0:
            continue
        row = h[i]
        for k, wk in enumerate(w):
            if wk != 0 and row[k] != 0:
                total += vi * row[k] * wk
    return total


def levi_form_hessian(m: Hypersurface, j: ACStructure, x: VectorField) -> LeviReport:
    """L(X) via the flat Hessian of phi plus the first-jet correction of J.

    L(X) = D2phi(X, X) + D2phi(JX, JX)
         + dphi((D_{JX} J) X - (D_X J) JX)   at 0,

    where D is the flat connection and D_V J differentiates the matrix
    entries.  Deliberately avoids lie_bracket so the two routes stay
    independent.
    """
    _require_tangent(m, j, x, "levi_form_hessian")
    h = _hessian_at_zero(m)
    x0 = x.at_zero()
    jx0 = apply_jstd(x0)
    value = _bilinear(h, x0, x0) + _bilinear(h, jx0, jx0)
    correction = ZERO
    if not j.is_standard:
        n2 = 2 * m.n
        # (D_V J)(0) has entries sum_k V_k(0) * dJ_ab/dx_k (0)
        def dj_at_zero(v0):
            out = [[ZERO] * n2 for _ in range(n2)]
            for a in range(n2):
                for b in range(n2):
                    e = j.entries[a][b]
                    acc = ZERO
                    for k in range(n2):
                        if v0[k] == 0:
                            continue
                        exps = tuple(1 if t == k else 0 for t in range(n2))
                        acc += v0[k] * e.coefficient(exps)
                    out[a][b] = acc
            return out

        djx = dj_at_zero(jx0)   # D_{JX} J at 0
        dx = dj_at_zero(x0)     # D_X J at 0
        vec = [
            sum((djx[a][b] * x0[b] - dx[a][b] * jx0[b] for b in range(n2)), ZERO)
            for a in range(n2)
        ]
        correction = m.dphi_at_zero(vec)
        value += correction
    return LeviReport(value, "hessian", correction)


def levi_polar(m: Hypersurface, j: ACStructure, x: VectorField,
               y: VectorField) -> QC:
    """Polar form: Theta(X,Y) with Theta(X,X) = L(X).

    Real part: dphi(J[X,JY] + J[Y,JX]) / 2; imaginary part:
    dphi(J[X,Y] + J[JX,JY]) / 2, all at 0.  Antilinear in the first slot.
    """
    _require_tangent(m, j, x, "levi_polar")
    _require_tangent(m, j, y, "levi_polar")
    jx = j.apply(x)
    jy = j.apply(y)
    cap = min(x.cap, y.cap, jx.cap, jy.cap)
    xt, yt = x.truncate(cap), y.truncate(cap)
    jxt, jyt = jx.truncate(cap), jy.truncate(cap)

    def val(field):
        return m.dphi_at_zero(j.apply(field).at_zero())

    re = (val(lie_bracket(xt, jyt)) + val(lie_bracket(yt, jxt))) / 2
    im = (val(lie_bracket(xt, yt)) + val(lie_bracket(jxt, jyt))) / 2
    return QC(re, im)


@dataclass
class HermitianLeviMatrix:
    """Polar form on a basis of the complex tangent space at 0."""

    basis: list
    entries: list  # (n-1) x (n-1) complex rationals

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def realified(self):
        """[[A, -B], [B, A]] acting on coordinates (alpha, beta)."""
        d = len(self.entries)
        out = [[ZERO] * (2 * d) for _ in range(2 * d)]
        for i in range(d):
            for k in range(d):
                a, b = self.entries[i][k].re, self.entries[i][k].im
                out[i][k] = a
                out[i][k + d] = -b
                out[i + d][k] = b
                out[i + d][k + d] = a
        return out


def hermitian_levi_matrix(m: Hypersurface, j: ACStructure,
                          basis=None) -> HermitianLeviMatrix:
    if basis is None:
        basis = complex_tangent_basis(m, j)
    d = len(basis)
    entries = [[None] * d for _ in range(d)]
    for i in range(d):
        for k in range(i, d):
            v = levi_polar(m, j, basis[i], basis[k])
            entries[i][k] = v
            if k != i:
                entries[k][i] = v.conj()
    mat = HermitianLeviMatrix(list(basis), entries)
    for i in range(d):
        if entries[i][i].im != 0:
            raise ArithmeticError("polar form has non-real diagonal")
    return mat


@dataclass(frozen=True)
class Classification:
    label: str
    positive: int
    negative: int
    zero: int


def classify_point(m: Hypersurface, j: ACStructure) -> Classification:
    """Exact pseudoconvexity label at 0 from the signature of the polar form.

    The signature is computed on the realified matrix, where every eigenvalue
    appears twice; the reported counts are complex (halved).
    """
    if m.n == 1:
        return Classification("levi_flat", 0, 0, 0)
    mat = hermitian_levi_matrix(m, j)
    d = len(mat.entries)
    if mat.is_zero():
        return Classification("levi_flat", 0, 0, d)
    pos2, neg2, zero2 = linalg.real_symmetric_signature(mat.realified())
    if pos2 % 2 or neg2 % 2 or zero2 % 2:
        raise ArithmeticError("realified signature must have even counts")
    pos, neg, zero = pos2 // 2, neg2 // 2, zero2 // 2
    if zero == 0:
        if neg == 0:
            label = "strictly_pseudoconvex"
        elif pos == 0:
            label = "strictly_pseudoconcave"
        else:
            label = "indefinite"
    else:
        if neg == 0 and pos > 0:
            label = "pseudoconvex_degenerate"
        elif pos == 0 and neg > 0:
            label = "pseudoconcave_degenerate"
        else:
            label = "indefinite"
    return Classification(label, pos, neg, zero)


def higher_levi(m: Hypersurface, j: ACStructure, x_jet, p: int, q: int):
    """L^{p,q}(u_1, ..., u_{p+q+1}) by the defining contract.

    Propagates the disk jet from the given x-derivatives with the
    (p+q+2)-th derivative set to zero, composes with phi, forms the disk
    Laplacian, and extracts the (p,q)-derivative at 0.  The value does not
    depend on the padding.
    """
    order = p + q + 2
    if order > m.cap:
        raise CapError(
            f"L^({p},{q}) needs phi cap >= {order}, have {m.cap}"
        )
    jets = [tuple(rat(v) for v in vec) for vec in x_jet]
    if len(jets) < p + q + 1:
        raise ValueError(f"need {p + q + 1} x-derivatives, got {len(jets)}")
    jets = jets[:p + q + 1]
    u = propagate_cr_jet(jets, j, order=order)
    tr = compose_phi_u(m, u)
    lap = tr.series.partial(0).partial(0) + tr.series.partial(1).partial(1)
    return lap.coefficient((p, q)) * factorial(p) * factorial(q)


def _dir_derivative(series: TruncatedSeries, vec):
    out = TruncatedSeries.zero(series.num_vars, series.cap - 1)
    for i, v in enumerate(vec):
        if v != 0:
            out = out + series.partial(i).scale(v)
    return out


def _dkphi_at_zero(m: Hypersurface, vectors):
    """D^k phi(v_1, ..., v_k) at 0 for constant directions, k <= cap."""
    if len(vectors) > m.cap:
        raise CapError("derivative order exceeds phi's cap")
    s = m.phi
    for vec in vectors:
        s = _dir_derivative(s, vec)
    return s.constant_term()


def higher_levi_closed_form(p: int, q: int, m: Hypersurface, *vectors):
    """The printed closed forms for L^{0,0}, L^{1,0}, L^{0,1}, standard J only.

    Implemented exactly as printed and gated: the result is cross-checked
    against the defining disk-route computation, and any disagreement raises
    ClosedFormMismatch instead of being patched.  The (1,0) and (0,1) forms
    end in a term quadratic in the second argument whose self-consistency is
    exactly what the gate monitors.
    """
    if (p, q) not in ((0, 0), (1, 0), (0, 1)):
        raise ValueError(f"no printed closed form for (p,q)=({p},{q})")
    vecs = [tuple(rat(c) for c in v) for v in vectors]
    if len(vecs) != p + q + 1:
        raise ValueError(f"need {p + q + 1} vectors, got {len(vecs)}")
    j = ACStructure.standard(m.n, 2)

    def i(v):
        return tuple(apply_jstd(list(v)))

    def d2(a, b):
        return _dkphi_at_zero(m, [a, b])

    def d3(a, b, c):
        return _dkphi_at_zero(m, [a, b, c])

    if (p, q) == (0, 0):
        x1 = vecs[0]
        value = d2(x1, x1) + d2(i(x1), i(x1))
    elif (p, q) == (1, 0):
        x1, x2 = vecs
        value = (d3(x1, x1, x1) + d3(x1, i(x1), i(x1))
                 + 2 * d2(x2, x1) + 2 * d2(i(x2), i(x2)))
    else:
        x1, x2 = vecs
        value = (d3(i(x1), x1, x1) + d3(i(x1), i(x1), i(x1))
                 + 2 * d2(i(x2), x1) - 2 * d2(x2, i(x2)))
    reference = higher_levi(m, j, vecs, p, q)
    if value != reference:
        raise ClosedFormMismatch(p, q, value, reference)
    return value
