"""Hypersurface geometry in R^(2n) with an almost complex structure.

Coordinates are ordered (x1, y1, x2, y2, ..., xn, yn); the standard structure
J_std acts per 2x2 block as J(d/dx_i) = d/dy_i, J(d/dy_i) = -d/dx_i.

All ingestion normalizes the base point to the origin.  A hypersurface is a
defining polynomial jet phi with phi(0) = 0 and grad phi(0) != 0; an almost
complex structure is a matrix of series with J(0) = J_std and J*J = -I as a
series identity through the cap.  Vector fields are tuples of series sharing
one cap.  The flat symmetric connection of the coordinates is used for all
covariant derivatives, so iterated derivatives are plain directional
derivatives of components.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import linalg
from .errors import CapError, GeometryError
from .jets import TruncatedSeries
from .rational import Q, ZERO


def standard_matrix(n: int):
    """J_std as a rational 2n x 2n matrix."""
    m = [[ZERO for _ in range(2 * n)] for _ in range(2 * n)]
    for i in range(n):
        m[2 * i][2 * i + 1] = Q(-1)
        m[2 * i + 1][2 * i] = Q(1)
    return m


def apply_jstd(vec):
    """J_std applied to a rational vector."""
    out = []
    for i in range(0, len(vec), 2):
        out.append(-vec[i + 1])
        out.append(vec[i])
    return out


class VectorField:
    """Vector field on a neighborhood of 0 in R^(2n), components as series."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components):
        components = tuple(components)
        if len(components) != 2 * n:
            raise ValueError(f"need {2 * n} components, got {len(components)}")
        cap = components[0].cap
        for c in components:
            if c.num_vars != 2 * n:
                raise ValueError("component has wrong num_vars")
            if c.cap != cap:
                raise ValueError("components must share one cap")
        self.n = n
        self.components = components

    @property
    def cap(self) -> int:
        return self.components[0].cap

    @classmethod
    def constant(cls, n: int, vec, cap: int) -> "VectorField":
        return cls(n, [TruncatedSeries.constant(v, 2 * n, cap) for v in vec])

    @classmethod
    def coordinate(cls, n: int, i: int, cap: int) -> "VectorField":
        vec = [1 if j == i else 0 for j in range(2 * n)]
        return cls.constant(n, vec, cap)

    @classmethod
    def zero(cls, n: int, cap: int) -> "VectorField":
        return cls.constant(n, [0] * (2 * n), cap)

    def at_zero(self):
        return tuple(c.constant_term() for c in self.components)

    def truncate(self, cap: int) -> "VectorField":
        if cap == self.cap:
            return self
        return VectorField(self.n, [c.truncate(cap) for c in self.components])

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.n, [a + b for a, b in
                                    zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.n, [a - b for a, b in
                                    zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.n, [-c for c in self.components])

    def scale(self, q) -> "VectorField":
        return VectorField(self.n, [c.scale(q) for c in self.components])

    def scale_series(self, s: TruncatedSeries) -> "VectorField":
        """Multiply by a scalar series; truncates to the common cap."""
        cap = min(s.cap, self.cap)
        s = s.truncate(cap)
        return VectorField(self.n, [s * c.truncate(cap) for c in self.components])

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    __hash__ = None

    def __repr__(self):
        return f"VectorField(n={self.n}, cap={self.cap}, value0={self.at_zero()})"


class Hypersurface:
    """Real hypersurface through the origin: the zero set of phi."""

    def __init__(self, n: int, phi: TruncatedSeries):
        if n < 1:
            raise GeometryError("ambient complex dimension must be >= 1")
        if phi.num_vars != 2 * n:
            raise GeometryError(
                f"phi has {phi.num_vars} variables, expected {2 * n}"
            )
        if phi.cap < 2:
            raise CapError("phi needs cap >= 2 to carry any geometry")
        if phi.constant_term() != 0:
            raise GeometryError("phi(0) != 0: the origin is not on the surface")
        self.n = n
        self.phi = phi
        self.gradient = tuple(phi.partial(i) for i in range(2 * n))
        if all(g.constant_term() == 0 for g in self.gradient):
            raise GeometryError("dphi(0) = 0: the surface is singular at the origin")

    @property
    def cap(self) -> int:
        return self.phi.cap

    def grad_at_zero(self):
        return tuple(g.constant_term() for g in self.gradient)

    def dphi(self, x: VectorField) -> TruncatedSeries:
        """The series dphi(X); reliable cap is min(X.cap, phi.cap - 1)."""
        cap = min(x.cap, self.cap - 1)
        total = TruncatedSeries.zero(2 * self.n, cap)
        for g, c in zip(self.gradient, x.components):
            total = total + g.truncate(cap) * c.truncate(cap)
        return total

    def dphi_at_zero(self, vec):
        g = self.grad_at_zero()
        return sum((a * b for a, b in zip(g, vec)), ZERO)


class ACStructure:
    """Almost complex structure: 2n x 2n matrix of series, J(0)=J_std, J*J=-I."""

    def __init__(self, n: int, entries, _validated: bool = False):
        entries = tuple(tuple(row) for row in entries)
        if len(entries) != 2 * n or any(len(r) != 2 * n for r in entries):
            raise GeometryError(f"J must be a {2 * n} x {2 * n} matrix")
        cap = entries[0][0].cap
        for row in entries:
            for e in row:
                if e.num_vars != 2 * n or e.cap != cap:
                    raise GeometryError("J entries must share num_vars and cap")
        self.n = n
        self.entries = entries
        std = standard_matrix(n)
        self.is_standard = all(
            entries[i][j].constant_term() == std[i][j]
            and entries[i][j].total_degree() in (None, 0)
            for i in range(2 * n) for j in range(2 * n)
        )
        if not _validated:
            self._validate(std)

    def _validate(self, std):
        n2 = 2 * self.n
        for i in range(n2):
            for j in range(n2):
                if self.entries[i][j].constant_term() != std[i][j]:
                    raise GeometryError(
                        "J(0) != J_std; conjugate the structure at ingestion"
                    )
        if self.is_standard:
            return
        for i in range(n2):
            for j in range(n2):
                acc = TruncatedSeries.zero(n2, self.cap)
                for k in range(n2):
                    acc = acc + self.entries[i][k] * self.entries[k][j]
                if i == j:
                    acc = acc + TruncatedSeries.constant(1, n2, self.cap)
                if not acc.is_zero():
                    raise GeometryError(
                        f"J*J != -I through cap {self.cap} at entry ({i},{j})"
                    )

    @property
    def cap(self) -> int:
        return self.entries[0][0].cap

    @classmethod
    def standard(cls, n: int, cap: int) -> "ACStructure":
        std = standard_matrix(n)
        entries = [[TruncatedSeries.constant(std[i][j], 2 * n, cap)
                    for j in range(2 * n)] for i in range(2 * n)]
        return cls(n, entries, _validated=True)

    def truncate(self, cap: int) -> "ACStructure":
        if cap == self.cap:
            return self
        return ACStructure(
            self.n,
            [[e.truncate(cap) for e in row] for row in self.entries],
            _validated=True,
        )

    def apply(self, x: VectorField) -> VectorField:
        """J applied to a field; standard structures keep the field's cap."""
        if self.is_standard:
            comps = []
            for i in range(0, 2 * self.n, 2):
                comps.append(-x.components[i + 1])
                comps.append(x.components[i])
            return VectorField(self.n, comps)
        cap = min(self.cap, x.cap)
        xt = [c.truncate(cap) for c in x.components]
        comps = []
        for i in range(2 * self.n):
            acc = TruncatedSeries.zero(2 * self.n, cap)
            for j in range(2 * self.n):
                e = self.entries[i][j]
                if not e.is_zero():
                    acc = acc + e.truncate(cap) * xt[j]
            comps.append(acc)
        return VectorField(self.n, comps)

    def value_at_zero(self):
        return [[e.constant_term() for e in row] for row in self.entries]

    def entry_derivative(self, direction: VectorField):
        """Matrix of series (direction . J): entrywise directional derivative."""
        if self.cap == 0:
            raise CapError("cannot differentiate a structure with cap 0")
        cap = min(self.cap - 1, direction.cap)
        dirs = [c.truncate(cap) for c in direction.components]
        out = []
        for row in self.entries:
            orow = []
            for e in row:
                acc = TruncatedSeries.zero(2 * self.n, cap)
                if not e.is_zero():
                    for j in range(2 * self.n):
                        pe = e.partial(j)
                        if not pe.is_zero():
                            acc = acc + pe.truncate(cap) * dirs[j]
                orow.append(acc)
            out.append(orow)
        return out


def matrix_apply(matrix, x: VectorField, cap: int) -> VectorField:
    """Apply a matrix of series (shared cap >= cap) to a field at the given cap."""
    n = x.n
    xt = [c.truncate(cap) for c in x.components]
    comps = []
    for i in range(2 * n):
        acc = TruncatedSeries.zero(2 * n, cap)
        for j in range(2 * n):
            e = matrix[i][j]
            if not e.is_zero():
                acc = acc + e.truncate(cap) * xt[j]
        comps.append(acc)
    return VectorField(n, comps)


@dataclass
class Frame:
    """The gradient frame: N = grad phi and JN = J(N), both with cap K-1."""

    normal: VectorField
    j_normal: VectorField


def gradient_frame(m: Hypersurface, j: ACStructure) -> Frame:
    n_field = VectorField(m.n, m.gradient)
    jn = j.apply(n_field)
    cap = min(n_field.cap, jn.cap)
    return Frame(n_field.truncate(cap), jn.truncate(cap))


def project_to_complex_tangent(m: Hypersurface, j: ACStructure,
                               v: VectorField) -> VectorField:
    """Component of V in the complex tangent bundle of M.

    Solves V = X + a N + b JN with dphi(X) = dphi(JX) = 0; the 2x2 system has
    unit determinant -(dphi(N)^2 + dphi(JN)^2), so a and b are honest series.
    The identities hold exactly through the returned cap.
    """
    frame = gradient_frame(m, j)
    cap = min(v.cap, frame.normal.cap)
    nf = frame.normal.truncate(cap)
    jn = frame.j_normal.truncate(cap)
    vt = v.truncate(cap)
    jv = j.apply(vt).truncate(cap)
    p = m.dphi(nf)
    q = m.dphi(jn)
    r = m.dphi(vt)
    s = m.dphi(jv)
    denom = (p * p + q * q).inverse()
    a = (p * r + q * s) * denom
    b = (q * r - p * s) * denom
    an = VectorField(m.n, [a * c for c in nf.components])
    bjn = VectorField(m.n, [b * c for c in jn.components])
    return vt - an - bjn


def is_complex_tangent(m: Hypersurface, j: ACStructure, x: VectorField) -> bool:
    """Check dphi(X) = 0 and dphi(JX) = 0 as series identities."""
    if m.dphi(x).is_zero():
        jx = j.apply(x)
        return m.dphi(jx).is_zero()
    return False


def covariant_derivative(x: VectorField, y: VectorField) -> VectorField:
    """Flat connection: (D_X Y)_i = X(Y_i).  Result cap drops by one."""
    if x.cap != y.cap:
        raise ValueError("covariant_derivative needs matching caps")
    if y.cap == 0:
        raise CapError("cannot differentiate a field with cap 0")
    cap = y.cap - 1
    n2 = 2 * x.n
    xt = [c.truncate(cap) for c in x.components]
    comps = []
    for i in range(n2):
        acc = TruncatedSeries.zero(n2, cap)
        yi = y.components[i]
        if not yi.is_zero():
            for jv in range(n2):
                p = yi.partial(jv)
                if not p.is_zero():
                    acc = acc + xt[jv] * p
        comps.append(acc)
    return VectorField(x.n, comps)


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """[X, Y] = D_X Y - D_Y X for the flat connection.  Cap drops by one."""
    if x.cap != y.cap:
        raise ValueError("lie_bracket needs matching caps")
    return covariant_derivative(x, y) - covariant_derivative(y, x)


@dataclass
class FieldJet:
    """The triangle D^(p,q)X(0) = (JX)^q X^p . X (0) for p+q <= order."""

    order: int
    n: int
    entries: dict  # (p, q) -> tuple of rationals

    def entry(self, p: int, q: int):
        return self.entries[(p, q)]

    def restrict(self, order: int) -> "FieldJet":
        if order > self.order:
            raise ValueError("cannot extend a jet by restriction")
        return FieldJet(order, self.n,
                        {k: v for k, v in self.entries.items()
                         if k[0] + k[1] <= order})

    def __eq__(self, other):
        if not isinstance(other, FieldJet):
            return NotImplemented
        return (self.order == other.order and self.n == other.n
                and self.entries == other.entries)

    def to_dict(self):
        keys = sorted(self.entries, key=lambda pq: (pq[0] + pq[1], pq[1]))
        return {
            "order": self.order,
            "entries": {f"{p},{q}": [str(v) for v in self.entries[(p, q)]]
                        for p, q in keys},
        }


def dpq_derivative(x: VectorField, j: ACStructure, p: int, q: int):
    """Value of (JX)^q X^p . X at 0, nesting right to left."""
    k = p + q
    if k > x.cap:
        raise CapError(f"order {k} exceeds the field's cap {x.cap}")
    if not j.is_standard and k > j.cap:
        raise CapError(f"order {k} exceeds the structure's cap {j.cap}")
    w = x.truncate(k)
    xdir = w
    jx = j.apply(x).truncate(k)
    for _ in range(p):
        w = covariant_derivative(xdir.truncate(w.cap), w)
    for _ in range(q):
        w = covariant_derivative(jx.truncate(w.cap), w)
    return w.at_zero()


def field_jet(x: VectorField, j: ACStructure, k: int) -> FieldJet:
    """All D^(p,q)X(0) with p + q <= k, sharing the D_X chains."""
    if k > x.cap:
        raise CapError(f"order {k} exceeds the field's cap {x.cap}")
    if not j.is_standard and k > j.cap:
        raise CapError(f"order {k} exceeds the structure's cap {j.cap}")
    xdir = x.truncate(k)
    jx = j.apply(x).truncate(k)
    entries = {}
    chain = x.truncate(k)
    for p in range(k + 1):
        if p > 0:
            chain = covariant_derivative(xdir.truncate(chain.cap), chain)
        entries[(p, 0)] = chain.at_zero()
        w = chain
        for q in range(1, k - p + 1):
            w = covariant_derivative(jx.truncate(w.cap), w)
            entries[(p, q)] = w.at_zero()
    return FieldJet(k, x.n, entries)


def complex_tangent_basis(m: Hypersurface, j: ACStructure):
    """Projections of coordinate directions spanning T^J_0 M over C.

    Greedy in coordinate order; returns n-1 fields whose values at 0 are
    complex linearly independent.  Deterministic.
    """
    if m.n < 2:
        raise GeometryError("no complex tangent directions in complex dim 1")
    cap = min(m.cap - 1, (j.cap if j.is_standard else j.cap - 1))
    basis = []
    values = []  # real span generators: T_i(0) and J_0 T_i(0)
    for i in range(2 * m.n):
        if len(basis) == m.n - 1:
            break
        cand = project_to_complex_tangent(
            m, j, VectorField.coordinate(m.n, i, cap))
        val = list(cand.at_zero())
        if all(v == 0 for v in val):
            continue
        if values:
            cols = [list(col) for col in zip(*values)]
            sol = linalg.solve_affine(cols, val)
            if sol.consistent:
                continue
        basis.append(cand)
        values.append(val)
        values.append(apply_jstd(val))
    if len(basis) != m.n - 1:
        raise GeometryError("failed to span the complex tangent space")
    return basis


def adapted_frame_matrix(j0):
    """Columns (v1, J v1, v2, J v2, ...) for a constant complex structure j0.

    The returned matrix B satisfies B^-1 j0 B = J_std.
    """
    m = len(j0)
    cols = []
    for cand_idx in range(m):
        if len(cols) == m:
            break
        cand = [Q(1) if r == cand_idx else ZERO for r in range(m)]
        if cols:
            mat = [list(col) for col in zip(*cols)]
            if linalg.solve_affine(mat, cand).consistent:
                continue
        jc = linalg.mat_vec(j0, cand)
        cols.append(cand)
        cols.append(jc)
    if len(cols) != m:
        raise GeometryError("could not build a complex-adapted basis")
    return [list(col) for col in zip(*cols)]  # columns -> matrix


def recenter(m: Hypersurface, j: ACStructure, point):
    """Translate a surface point to the origin and renormalize J(0) to J_std.

    Returns (hypersurface, structure, basis_matrix); the basis matrix B is the
    linear change of coordinates used after translation (identity when J(0)
    was already standard at the point).
    """
    point = [Q(p) for p in point]
    if len(point) != 2 * m.n:
        raise GeometryError("point arity mismatch")
    if m.phi.evaluate(point) != 0:
        raise GeometryError("point does not lie on the surface")
    if all(p == 0 for p in point) and j.is_standard:
        return m, j, linalg.identity(2 * m.n)
    phi_p = m.phi.shift(point)
    entries_p = [[e.shift(point) for e in row] for row in j.entries]
    j0 = [[e.constant_term() for e in row] for row in entries_p]
    std = standard_matrix(m.n)
    if j0 == std:
        b = linalg.identity(2 * m.n)
        new_phi = phi_p
        new_entries = entries_p
    else:
        # J(p) must itself square to -I for a linear conjugation to exist
        sq = linalg.mat_mul(j0, j0)
        for i in range(2 * m.n):
            for k in range(2 * m.n):
                want = Q(-1) if i == k else ZERO
                if sq[i][k] != want:
                    raise GeometryError(
                        "J at the point does not square to -I exactly; "
                        "cannot recenter"
                    )
        b = adapted_frame_matrix(j0)
        b_inv = linalg.mat_inverse(b)
        cap = m.cap
        lin = [TruncatedSeries(2 * m.n, cap,
                               {tuple(1 if t == s else 0 for t in range(2 * m.n)):
                                b[r][s] for s in range(2 * m.n) if b[r][s] != 0})
               for r in range(2 * m.n)]
        new_phi = phi_p.compose(lin)
        jcap = j.cap
        lin_j = [ls.truncate(jcap) for ls in lin] if jcap != cap else lin
        comp = [[e.compose(lin_j) for e in row] for row in entries_p]
        new_entries = [[None] * (2 * m.n) for _ in range(2 * m.n)]
        for i in range(2 * m.n):
            for k in range(2 * m.n):
                acc = TruncatedSeries.zero(2 * m.n, jcap)
                for a in range(2 * m.n):
                    for c in range(2 * m.n):
                        f = b_inv[i][a] * b[c][k]
                        if f != 0:
                            acc = acc + comp[a][c].scale(f)
                new_entries[i][k] = acc
    return Hypersurface(m.n, new_phi), ACStructure(m.n, new_entries), b


def project_point_to_surface(m: Hypersurface, point):
    """Exact projection of a nearby point onto the surface.

    Searches rational roots of t -> phi(point + t * grad phi(point)) and
    returns the corrected point for the root of smallest |t|.  Raises when
    phi(point) != 0 and no rational root exists: the engine never rounds.
    """
    point = [Q(p) for p in point]
    val = m.phi.evaluate(point)
    if val == 0:
        return point
    grad = [g.evaluate(point) for g in m.gradient]
    if all(g == 0 for g in grad):
        raise GeometryError("gradient vanishes at the point; cannot project")
    poly = _line_restriction(m.phi, point, grad)
    roots = _rational_roots(poly)
    if not roots:
        raise GeometryError(
            "point is off the surface and has no exact rational projection "
            "along the gradient line"
        )
    t = min(roots, key=lambda r: (abs(r), r < 0))
    return [p + t * g for p, g in zip(point, grad)]


def _line_restriction(phi: TruncatedSeries, point, direction):
    """Coefficients [c0, c1, ...] of t -> phi(point + t*direction)."""
    coeffs = {}
    for exps, c in phi._terms.items():
        partial = {0: c}
        for i, e in enumerate(exps):
            if e == 0:
                continue
            new = {}
            # (point_i + t*dir_i)^e expanded exactly
            from math import comb as _comb
            for k, v in partial.items():
                for s in range(e + 1):
                    coeff = v * _comb(e, s) * point[i] ** (e - s) * direction[i] ** s
                    if coeff != 0:
                        new[k + s] = new.get(k + s, ZERO) + coeff
            partial = new
        for k, v in partial.items():
            coeffs[k] = coeffs.get(k, ZERO) + v
    deg = max(coeffs) if coeffs else 0
    return [coeffs.get(i, ZERO) for i in range(deg + 1)]


def _rational_roots(coeffs):
    """All rational roots of a polynomial with rational coefficients."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return [ZERO]
    lead_zeros = 0
    while coeffs[lead_zeros] == 0:
        lead_zeros += 1
    roots = set()
    if lead_zeros:
        roots.add(ZERO)
        coeffs = coeffs[lead_zeros:]
    if len(coeffs) == 1:
        return sorted(roots)
    from math import lcm
    denom = lcm(*(int(c.denominator) for c in coeffs))
    ints = [int(c * denom) for c in coeffs]
    a0, alead = abs(ints[0]), abs(ints[-1])

    def divisors(v):
        out = []
        d = 1
        while d * d <= v:
            if v % d == 0:
                out.append(d)
                out.append(v // d)
            d += 1
        return out

    for p in divisors(a0):
        for q in divisors(alead):
            for cand in (Q(p, q), Q(-p, q)):
                if cand in roots:
                    continue
                val = ZERO
                for c in reversed(ints):
                    val = val * cand + c
                if val == 0:
                    roots.add(cand)
    return sorted(roots)


def perturbed_structure(n: int, cap: int, seed: int) -> ACStructure:
    """Admissible test structure J = A J_std A^-1 with A = I + nilpotent linear.

    The perturbation N is strictly triangular (upper or lower, per seed) with
    entries linear in the coordinates, so A^-1 = I - N + N^2 - ... terminates
    and J*J = -I holds as an exact polynomial identity (then truncated to the
    cap).
    """
    rng = random.Random(seed)
    n2 = 2 * n
    zero = TruncatedSeries.zero(n2, cap)
    lower = rng.random() < 0.5

    def rand_linear():
        var = rng.randrange(n2)
        num = rng.choice([-2, -1, 1, 2])
        den = rng.choice([1, 2, 3])
        exps = tuple(1 if t == var else 0 for t in range(n2))
        return TruncatedSeries(n2, cap, {exps: Q(num, den)})

    nmat = [[zero for _ in range(n2)] for _ in range(n2)]
    placed = 0
    for i in range(n2):
        for k in range(i + 1, n2):
            if rng.random() < 0.6:
                if lower:
                    nmat[k][i] = rand_linear()
                else:
                    nmat[i][k] = rand_linear()
                placed += 1
    if placed == 0:
        nmat[0][n2 - 1] = rand_linear()

    def smat_mul(a, b):
        return [[sum((a[i][t] * b[t][k] for t in range(n2)
                      if not (a[i][t].is_zero() or b[t][k].is_zero())), zero)
                 for k in range(n2)] for i in range(n2)]

    ident = [[TruncatedSeries.constant(1 if i == k else 0, n2, cap)
              for k in range(n2)] for i in range(n2)]
    amat = [[ident[i][k] + nmat[i][k] for k in range(n2)] for i in range(n2)]
    ainv = [row[:] for row in ident]
    power = [row[:] for row in nmat]
    sign = -1
    while any(not e.is_zero() for row in power for e in row):
        ainv = [[ainv[i][k] + power[i][k].scale(sign) for k in range(n2)]
                for i in range(n2)]
        power = smat_mul(power, nmat)
        sign = -sign
    std = standard_matrix(n)
    jstd = [[TruncatedSeries.constant(std[i][k], n2, cap) for k in range(n2)]
            for i in range(n2)]
    j = smat_mul(smat_mul(amat, jstd), ainv)
    return ACStructure(n, j)
