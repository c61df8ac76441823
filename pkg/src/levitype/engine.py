"""Exact contact-type engine.

Ties together three descriptions of higher-order contact between a
hypersurface and holomorphic disks: jets of tangent disks, complex tangent
fields whose iterated derivatives commute at the point, and vanishing of the
higher-order trace combinations.  Everything runs in exact rational
arithmetic.  The three routes are provably equivalent, so any observed
disagreement is raised as TheoremViolation instead of being smoothed over.
"""

from dataclasses import dataclass
from math import factorial, isqrt

from .disks import (
    DiskJet,
    compose_phi_u,
    contact_order,
    propagate_cr_jet,
)
from .errors import CapError, GeometryError, TheoremViolation
from .geometry import (
    ACStructure,
    FieldJet,
    Hypersurface,
    VectorField,
    apply_jstd,
    complex_tangent_basis,
    covariant_derivative,
    field_jet,
    gradient_frame,
    is_complex_tangent,
    project_point_to_surface,
    project_to_complex_tangent,
    recenter,
)
from .jets import TruncatedSeries
from .levi import hermitian_levi_matrix, higher_levi
from .linalg import real_symmetric_signature, solve_affine
from .rational import Q, ZERO, rat


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vec_scale(c, v):
    return tuple(c * x for x in v)


def _vec_zero(length):
    return tuple(ZERO for _ in range(length))


def _is_zero_vec(v):
    return all(x == 0 for x in v)


# ---------------------------------------------------------------------------
# jet extension and disk <-> field conversion


@dataclass
class ExtensionResult:
    """Outcome of extending a field one jet order towards a target."""

    realizable: bool
    field: VectorField | None
    multipliers: dict | None  # (p, q) -> [(re, im) per basis field]
    offending: tuple | None  # first slot whose correction is not tangential


def _dual_pair_forms(v, w):
    """Linear forms l1, l2 with l1(v)=1, l1(w)=0, l2(v)=0, l2(w)=1.

    Supported on two coordinates chosen as the first pair of indices where
    the 2x2 minor of (v, w) is invertible; v, w independent is required.
    """
    m2n = len(v)
    for i1 in range(m2n):
        for i2 in range(i1 + 1, m2n):
            det = v[i1] * w[i2] - v[i2] * w[i1]
            if det != 0:
                c = [[w[i2] / det, -w[i1] / det],
                     [-v[i2] / det, v[i1] / det]]
                return (i1, i2), c
    raise GeometryError("field value and its rotation are not independent")


def _linear_form_series(indices, coeffs, num_vars, cap):
    i1, i2 = indices
    terms = {}
    for idx, c in ((i1, coeffs[0]), (i2, coeffs[1])):
        if c != 0:
            terms[tuple(1 if t == idx else 0 for t in range(num_vars))] = c
    return TruncatedSeries(num_vars, cap, terms)


def jet_extension_test(m: Hypersurface, j: ACStructure, x1: VectorField,
                       xi: FieldJet, verify: bool = True) -> ExtensionResult:
    """Extend x1 by one jet order to realize the target triangle xi.

    x1 must realize the order-(k) part of xi already; the top slots p+q=k+1
    are reachable exactly when each difference xi_pq - D^(p,q)x1(0) lies in
    the complex tangent space at 0.  On success the returned field differs
    from x1 by multiplier corrections sum(mu_i T_i + nu_i (J T_i)) whose
    coefficient polynomials are homogeneous of degree k+1 in two linear
    forms dual to (x1(0), J_0 x1(0)).
    """
    k1 = xi.order
    if k1 < 1:
        raise ValueError("target jet must have positive order")
    k = k1 - 1
    fj = field_jet(x1, j, k1)
    for (p, q), val in xi.entries.items():
        if p + q <= k and tuple(val) != tuple(fj.entry(p, q)):
            raise GeometryError(
                f"field does not realize the target below top order "
                f"(slot ({p},{q}))")
    n2 = 2 * m.n
    deltas = {}
    all_zero = True
    for p in range(k1 + 1):
        q = k1 - p
        delta = _vec_sub(xi.entry(p, q), fj.entry(p, q))
        if m.dphi_at_zero(delta) != 0 or m.dphi_at_zero(apply_jstd(delta)) != 0:
            return ExtensionResult(False, None, None, (p, q))
        deltas[(p, q)] = delta
        if not _is_zero_vec(delta):
            all_zero = False
    if all_zero:
        return ExtensionResult(True, x1, {}, None)

    basis = complex_tangent_basis(m, j)
    taus = [b.at_zero() for b in basis]
    cols = taus + [apply_jstd(t) for t in taus]
    d = len(cols)
    colmat = [[cols[c][r] for c in range(d)] for r in range(n2)]

    v0 = x1.at_zero()
    if _is_zero_vec(v0):
        raise GeometryError("cannot extend a field vanishing at the point")
    w0 = apply_jstd(v0)
    indices, dual = _dual_pair_forms(v0, w0)

    cap = min(x1.cap, min(b.cap for b in basis))
    l1 = _linear_form_series(indices, dual[0], n2, cap)
    l2 = _linear_form_series(indices, dual[1], n2, cap)
    # powers l1^p l2^q, shared across slots
    pw1 = [TruncatedSeries.constant(1, n2, cap)]
    pw2 = [TruncatedSeries.constant(1, n2, cap)]
    for _ in range(k1):
        pw1.append(pw1[-1] * l1)
        pw2.append(pw2[-1] * l2)

    multipliers = {}
    mu = [TruncatedSeries.zero(n2, cap) for _ in range(len(basis))]
    nu = [TruncatedSeries.zero(n2, cap) for _ in range(len(basis))]
    for (p, q), delta in deltas.items():
        sol = solve_affine(colmat, list(delta))
        if not sol.consistent:
            raise TheoremViolation(
                "tangential correction not in the span of the tangent basis")
        coords = sol.particular
        scale = Q(1, factorial(p) * factorial(q))
        monomial = pw1[p] * pw2[q]
        slot = []
        for i in range(len(basis)):
            a, b = coords[i] * scale, coords[i + len(basis)] * scale
            slot.append((a, b))
            if a != 0:
                mu[i] = mu[i] + monomial.scale(a)
            if b != 0:
                nu[i] = nu[i] + monomial.scale(b)
        multipliers[(p, q)] = slot

    x = x1.truncate(cap)
    for i, t in enumerate(basis):
        if not mu[i].is_zero():
            x = x + t.truncate(cap).scale_series(mu[i])
        if not nu[i].is_zero():
            jt = j.apply(t).truncate(cap)
            x = x + jt.scale_series(nu[i])

    if verify:
        got = field_jet(x, j, k1)
        for (p, q), val in xi.entries.items():
            if tuple(got.entry(p, q)) != tuple(val):
                raise TheoremViolation(
                    f"multiplier construction missed slot ({p},{q})")
    return ExtensionResult(True, x, multipliers, None)


def realize_field_from_disk(m: Hypersurface, j: ACStructure, u: DiskJet,
                            k: int | None = None) -> VectorField:
    """Complex tangent field whose derivative triangle matches the disk.

    Produces X with D^(p,q)X(0) = d^(p+q+1)u/dx^(p+1)dy^q (0) for all
    p+q <= k.  Requires contact order at least k+2; the compatibility of the
    corrections at each induction step is then a theorem, so a failure deeper
    in the recursion is reported as TheoremViolation.
    """
    co = contact_order(m, u)
    max_k = co.order - 2
    if k is None:
        k = max_k
    if k < 0:
        raise ValueError("realization order must be nonnegative")
    if k > max_k:
        raise GeometryError(
            f"contact order {co.order} is below the required {k + 2}")
    u1 = u.derivative(1, 0)
    if _is_zero_vec(u1):
        raise GeometryError("disk is not regular at 0")
    x = project_to_complex_tangent(m, j, VectorField.constant(m.n, u1, m.cap - 1))
    if x.at_zero() != tuple(u1):
        raise TheoremViolation(
            "first derivative not preserved by tangential projection")
    for kk in range(1, k + 1):
        entries = {}
        for p in range(kk + 1):
            for q in range(kk + 1 - p):
                entries[(p, q)] = tuple(u.derivative(p + 1, q))
        xi = FieldJet(kk, m.n, entries)
        res = jet_extension_test(m, j, x, xi)
        if not res.realizable:
            raise TheoremViolation(
                f"jet of a contact-{co.order} disk not realizable at "
                f"slot {res.offending}")
        x = res.field
    return x


def disk_from_commuting_field(m: Hypersurface, j: ACStructure,
                              x: VectorField, k: int) -> DiskJet:
    """Disk jet built from the x-axis derivatives of a commuting field.

    Gate: the field must be complex tangent and commute at 0 to order k+1.
    The propagated disk then has contact order at least k+2; anything less
    is a broken theorem.
    """
    rep = commutation_defect(x, j, k + 1)
    if rep.max_vanishing_order < k + 1:
        raise GeometryError(
            f"field commutes only to order {rep.max_vanishing_order}, "
            f"needed {k + 1}; defects: {sorted(rep.defects)}")
    if not is_complex_tangent(m, j, x):
        raise GeometryError("field is not complex tangent as a series")
    fj = field_jet(x, j, k)
    x_jet = [fj.entry(mm - 1, 0) for mm in range(1, k + 2)]
    u = propagate_cr_jet(x_jet, j, order=k + 1)
    co = contact_order(m, u)
    if co.order < k + 2:
        raise TheoremViolation(
            f"commuting field produced contact {co.order} < {k + 2}")
    return u


# ---------------------------------------------------------------------------
# commutation criteria


@dataclass
class CommutationReport:
    """Vanishing orders of the four equivalent commutation criteria."""

    order_tested: int
    defects: dict  # bracket word -> value at 0, first failing length only
    max_vanishing_order: int
    criterion_orders: dict  # criterion index 1..4 -> vanishing order
    agreement: bool


def _word_label(tree) -> str:
    if tree == 0:
        return "X"
    if tree == 1:
        return "JX"
    return f"[{_word_label(tree[0])},{_word_label(tree[1])}]"


def commutation_defect(x: VectorField, j: ACStructure,
                       k: int) -> CommutationReport:
    """Test commutation of X and JX at 0 up to order k, four ways.

    The criteria: (1) values of all words in {X, JX} of each length m <= k
    are invariant under permutation; (2) appending JX to a word equals
    rotating one X slot; (3) all iterated Lie brackets of lengths 2..k
    vanish at 0; (4) derivatives of [X, JX] of orders <= k-2 vanish at 0.
    All four are equivalent at the same order, so the report carries an
    agreement flag and disagreement raises TheoremViolation.
    """
    if k < 1:
        raise ValueError("commutation order must be at least 1")
    jx_full = j.apply(x)
    cap = min(x.cap, jx_full.cap)
    if cap < k - 1:
        raise CapError(f"order {k} needs field caps >= {k - 1}, have {cap}")
    work_cap = k - 1
    base = (x.truncate(work_cap), jx_full.truncate(work_cap))

    # words: bits = (direction bits..., field bit), derivations right to left
    word_fields = {(0,): base[0], (1,): base[1]}

    def word(bits):
        f = word_fields.get(bits)
        if f is None:
            inner = word(bits[1:])
            f = covariant_derivative(base[bits[0]].truncate(inner.cap), inner)
            word_fields[bits] = f
        return f

    orders = {}

    def crit1():
        for m in range(2, k + 1):
            groups = {}
            for num in range(1 << m):
                bits = tuple((num >> t) & 1 for t in range(m))
                val = word(bits).at_zero()
                ones = sum(bits)
                if ones in groups:
                    if groups[ones] != val:
                        return m - 1
                else:
                    groups[ones] = val
        return k

    def crit2():
        for length in range(2, k + 1):
            for p in range(1, length):
                q = length - 1 - p
                lhs = word((1,) * q + (0,) * p + (1,)).at_zero()
                rhs = word((1,) * (q + 1) + (0,) * (p - 1) + (0,)).at_zero()
                if lhs != rhs:
                    return length - 1
        return k

    defects = {}

    def crit3():
        trees = [0, 1]
        index = {0: 0, 1: 1}
        fields = {0: base[0], 1: base[1]}
        by_len = {1: [0, 1]}
        order3 = k
        for length in range(2, k + 1):
            by_len[length] = []
            failed = False
            for la in range(1, length // 2 + 1):
                lb = length - la
                for a in by_len[la]:
                    for b in by_len[lb]:
                        if la == lb and index[a] >= index[b]:
                            continue
                        fa, fb = fields[a], fields[b]
                        c = min(fa.cap, fb.cap)
                        if c < 1:
                            continue
                        tree = (a, b)
                        fld = (covariant_derivative(fa.truncate(c), fb.truncate(c))
                               - covariant_derivative(fb.truncate(c), fa.truncate(c)))
                        index[tree] = len(trees)
                        trees.append(tree)
                        fields[tree] = fld
                        by_len[length].append(tree)
                        val = fld.at_zero()
                        if not _is_zero_vec(val):
                            failed = True
                            defects[_word_label(tree)] = val
            if failed:
                order3 = length - 1
                break
        return order3

    def crit4():
        if k < 2:
            return k  # no word reaches the bracket, matches the others
        br = (covariant_derivative(base[0], base[1])
              - covariant_derivative(base[1], base[0]))
        chains = {(): br}

        def chain(bits):
            f = chains.get(bits)
            if f is None:
                inner = chain(bits[1:])
                f = covariant_derivative(base[bits[0]].truncate(inner.cap),
                                         inner)
                chains[bits] = f
            return f

        for mlen in range(0, k - 1):
            for num in range(1 << mlen):
                bits = tuple((num >> t) & 1 for t in range(mlen))
                if not _is_zero_vec(chain(bits).at_zero()):
                    return mlen + 1
        return k

    orders[1] = crit1()
    orders[2] = crit2()
    orders[3] = crit3()
    orders[4] = crit4()
    agreement = len(set(orders.values())) == 1
    if not agreement:
        raise TheoremViolation(
            f"equivalent commutation criteria disagree: {orders}")
    return CommutationReport(k, defects, orders[3], orders, agreement)


# ---------------------------------------------------------------------------
# staged type search


@dataclass
class TypeReport:
    """Result of a contact-type search at one surface point."""

    point: tuple
    lower_bound: int
    certified_exact: bool
    cap_reached: bool
    witness_disk: DiskJet | None
    witness_field_jet: FieldJet | None
    obstruction: str | None


def _rational_sqrt(q):
    """Exact square root of a nonnegative rational, or None."""
    num, den = int(q.numerator), int(q.denominator)
    if num < 0:
        return None
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Q(rn, rd)


def _rational_isotropic(r0):
    """A nonzero rational vector with t' r0 t = 0, or None.

    Tries coordinate vectors, then pairs via the quadratic formula when the
    discriminant is a rational square, then a small box over index triples.
    The form is indefinite here, so a real solution always exists; a
    rational one need not.
    """
    d = len(r0)

    def qf(t):
        acc = ZERO
        for i in range(d):
            if t[i] == 0:
                continue
            row = r0[i]
            acc += t[i] * sum((row[p] * t[p] for p in range(d)), ZERO)
        return acc

    def e(i):
        return tuple(Q(1) if p == i else ZERO for p in range(d))

    for i in range(d):
        if r0[i][i] == 0:
            return e(i)
    for i in range(d):
        for p in range(i + 1, d):
            qii, qpp, qip = r0[i][i], r0[p][p], r0[i][p]
            root = _rational_sqrt(qip * qip - qii * qpp)
            if root is not None:
                s = (-qip + root) / qpp
                t = list(e(i))
                t[p] = s
                return tuple(t)
    small = [Q(1), Q(-1), Q(2), Q(-2), Q(1, 2), Q(-1, 2)]
    for i in range(d):
        for p in range(i + 1, d):
            for r in range(p + 1, d):
                for a in small:
                    for b in small:
                        t = list(e(i))
                        t[p], t[r] = a, b
                        if qf(t) == 0:
                            return tuple(t)
    return None


class _Stager:
    """Exact staged solver shared by all type_search strategies."""

    def __init__(self, m: Hypersurface, j: ACStructure, k_max: int):
        if k_max < 2:
            raise ValueError("K_max must be at least 2")
        if k_max + 2 > m.cap:
            raise CapError(
                f"K_max={k_max} needs a defining function cap of at least "
                f"{k_max + 2}, have {m.cap}")
        if not j.is_standard and j.cap < k_max - 1:
            raise CapError(
                f"K_max={k_max} needs the structure through order {k_max - 1}")
        self.m = m
        self.j = j
        self.k_max = k_max
        frame = gradient_frame(m, j)
        self.n0 = frame.normal.at_zero()
        self.jn0 = frame.j_normal.at_zero()
        self.p0 = m.dphi_at_zero(self.n0)
        self.q0 = m.dphi_at_zero(self.jn0)
        self.basis = complex_tangent_basis(m, j)
        self.taus = [b.at_zero() for b in self.basis]
        self.cols = self.taus + [apply_jstd(t) for t in self.taus]
        self.d = len(self.cols)
        n2 = 2 * m.n
        self.colmat = [[self.cols[c][r] for c in range(self.d)]
                       for r in range(n2)]

    # -- tangential coordinates

    def tangential(self, coords):
        acc = _vec_zero(2 * self.m.n)
        for c, col in zip(coords, self.cols):
            if c != 0:
                acc = _vec_add(acc, _vec_scale(c, col))
        return acc

    def coords_of(self, vec):
        sol = solve_affine(self.colmat, list(vec))
        if not sol.consistent:
            raise GeometryError("vector is not complex tangential at 0")
        return tuple(sol.particular)

    def normalize_u1(self, vec):
        """Scale so the first nonzero tangential coordinate is 1."""
        coords = self.coords_of(vec)
        for c in coords:
            if c != 0:
                return _vec_scale(Q(1) / c, vec)
        raise GeometryError("candidate direction is zero")

    # -- trace probes

    def disk(self, jets, order):
        return propagate_cr_jet(jets, self.j, order=order)

    def trace(self, jets, order):
        return compose_phi_u(self.m, self.disk(jets, order))

    def level_values(self, jets, ell):
        tr = self.trace(jets, ell + 2)
        return [tr.levi_entry(i, ell - i) for i in range(ell, -1, -1)]

    def _solve_normal_2x2(self, rhs1, rhs2):
        sol = solve_affine([[self.p0, self.q0], [self.q0, -self.p0]],
                           [rhs1, rhs2])
        a, b = sol.particular
        return _vec_add(_vec_scale(a, self.n0), _vec_scale(b, self.jn0))

    def force_normals(self, jets, mnext):
        """Normal part of u_mnext killing the two leading trace heads.

        After the stage at level mnext-2 is solved, the pairwise relations
        chain the whole degree-mnext stratum to these two heads, so the
        stratum must vanish entirely; that is asserted, not assumed.
        """
        zero = _vec_zero(2 * self.m.n)
        tr = self.trace(jets + [zero], mnext)
        vec = self._solve_normal_2x2(-tr.a(mnext, 0), -tr.a(mnext - 1, 1))
        tr2 = self.trace(jets + [vec], mnext)
        for p in range(mnext + 1):
            if tr2.a(p, mnext - p) != 0:
                raise TheoremViolation(
                    f"degree-{mnext} stratum survives normal forcing at "
                    f"({p},{mnext - p})")
        return vec

    def support_u2(self, u1):
        """Second derivative making phi.u = L(u1)/2 (x^2+y^2) + higher."""
        tr = self.trace([u1], 2)
        a_, b_, c_ = tr.a(2, 0), tr.a(1, 1), tr.a(0, 2)
        return self._solve_normal_2x2((c_ - a_) / Q(2), -b_)

    # -- stages

    def attempt_level(self, jets, normals_next, ell):
        """Solve the level-ell constraints for the tangential unknown.

        The constraints are affine in the tangential coordinates of the
        newest derivative; a mixed probe cross-checks that.  Returns
        (u_next, nullspace) or None when the system is inconsistent.
        """
        zero_t = [ZERO] * self.d

        def probe(tcoords):
            vec = _vec_add(normals_next, self.tangential(tcoords))
            return self.level_values(jets + [vec], ell)

        base = probe(zero_t)
        cols = []
        for r in range(self.d):
            t = list(zero_t)
            t[r] = Q(1)
            cols.append([v - b for v, b in zip(probe(t), base)])
        t = list(zero_t)
        t[0] = Q(1)
        t[1] = Q(1)
        mixed = probe(t)
        predicted = [b + cols[0][i] + cols[1][i] for i, b in enumerate(base)]
        if mixed != predicted:
            raise TheoremViolation(
                f"level-{ell} system is not affine in the tangential unknown")
        a_mat = [[cols[c][row] for c in range(self.d)]
                 for row in range(ell + 1)]
        sol = solve_affine(a_mat, [-b for b in base])
        if not sol.consistent:
            return None
        vec = _vec_add(normals_next, self.tangential(sol.particular))
        return vec, sol.nullspace

    def gauge_span_ok(self, u1, nullspace):
        """Nullspace directions must be jet reparametrizations of u1.

        Adding multiples of the tangential coordinates of u1 and J_0 u1 to a
        higher derivative is realized by z -> z + gamma z^m, which does not
        change the contact order; a nullspace inside that span keeps the
        obstruction certificate exact.
        """
        if not nullspace:
            return True
        g1 = self.coords_of(u1)
        g2 = self.coords_of(apply_jstd(u1))
        gmat = [[g1[r], g2[r]] for r in range(self.d)]
        for w in nullspace:
            if not solve_affine(gmat, list(w)).consistent:
                return False
        return True

    # -- full runs

    def witness_report(self, jets, lower_bound, certified, cap_reached,
                       obstruction, realize=True):
        # an obstructed witness is padded out to the bound so the nonzero
        # stratum is inside the trace window; the stratum does not depend
        # on the padding
        order = lower_bound if obstruction is not None else max(len(jets), 1)
        u = self.disk(jets, order)
        co = contact_order(self.m, u)
        if cap_reached or obstruction is None:
            if co.order < lower_bound:
                raise TheoremViolation(
                    f"witness contact {co.order} below bound {lower_bound}")
        else:
            if co.order != lower_bound or not co.exact:
                raise TheoremViolation(
                    f"obstructed witness should have contact exactly "
                    f"{lower_bound}, got {co.order} (exact={co.exact})")
        wj = None
        if realize:
            x = realize_field_from_disk(self.m, self.j, u, lower_bound - 2)
            wj = field_jet(x, self.j, lower_bound - 2)
        origin = _vec_zero(2 * self.m.n)
        return TypeReport(origin, lower_bound, certified, cap_reached,
                          u, wj, obstruction)

    def run_from_u1(self, u1, unique_start, certify, realize=True):
        vals = self.level_values([u1], 0)
        if vals[0] != 0:
            return self.witness_report(
                [u1, self.support_u2(u1)], 2, False, False,
                "chosen direction has nonzero Levi value", realize)
        jets = [u1]
        unique = unique_start
        normals_next = self.force_normals(jets, 2)
        while 2 + len(jets) < self.k_max:
            ell = len(jets)
            res = self.attempt_level(jets, normals_next, ell)
            if res is None:
                lb = ell + 2
                return self.witness_report(
                    jets + [normals_next], lb, certify and unique, False,
                    f"inconsistent affine system at stage {ell + 1} "
                    f"(constraints L^(i,j), i+j={ell})", realize)
            vec, nullspace = res
            if unique and not self.gauge_span_ok(u1, nullspace):
                unique = False
            jets.append(vec)
            normals_next = self.force_normals(jets, len(jets) + 1)
        return self.witness_report(jets + [normals_next], self.k_max,
                                   False, True, None, realize)

    def run_exact(self):
        mat = hermitian_levi_matrix(self.m, self.j, self.basis)
        r0 = mat.realified()
        pos, neg, zero = real_symmetric_signature(r0)
        if pos == 0 and neg == 0:
            u1 = self.taus[0]
            return self.run_from_u1(u1, self.m.n == 2, True)
        if zero == 0 and (pos == 0 or neg == 0):
            sign = "positive" if neg == 0 else "negative"
            u1 = self.normalize_u1(self.taus[0])
            return self.witness_report(
                [u1, self.support_u2(u1)], 2, True, False,
                f"Levi form {sign} definite: no isotropic direction exists")
        if pos == 0 or neg == 0:
            kernel = solve_affine(r0, [ZERO] * self.d).nullspace
            u1 = self.normalize_u1(self.tangential(kernel[0]))
            return self.run_from_u1(u1, zero == 2, True)
        t = _rational_isotropic(r0)
        if t is None:
            u1 = self.normalize_u1(self.taus[0])
            return self.witness_report(
                [u1, self.support_u2(u1)], 2, False, False,
                "indefinite Levi form with no rational isotropic direction "
                "found; bound is not certified")
        u1 = self.normalize_u1(self.tangential(t))
        return self.run_from_u1(u1, False, True)


def _grid_candidates(d, step):
    """Projective enumeration: leading coordinate 1, the rest on a grid."""
    step = rat(step)
    if step <= 0 or step > 1:
        raise ValueError("grid step must be in (0, 1]")
    ticks = []
    v = Q(-1)
    while v <= 1:
        ticks.append(v)
        v = v + step
    out = []
    for lead in range(d):
        tail = d - lead - 1

        def extend(prefix, left):
            if left == 0:
                out.append(tuple(prefix))
                return
            for t in ticks:
                extend(prefix + [t], left - 1)

        extend([ZERO] * lead + [Q(1)], tail)
    return out


def type_search(m: Hypersurface, j: ACStructure, k_max: int,
                strategy="exact_staged") -> TypeReport:
    """Search for the smallest non-spanned contact order at the origin.

    exact_staged solves each stage's affine system exactly and certifies
    unsolvability when the stage-one form is definite or a later affine
    system is inconsistent with a gauge-only nullspace history.  grid and
    directions strategies try prescribed first derivatives and report lower
    bounds only.
    """
    stager = _Stager(m, j, k_max)
    if strategy == "exact_staged":
        return stager.run_exact()

    if isinstance(strategy, tuple) and len(strategy) == 2:
        kind, arg = strategy
        if kind == "grid":
            coord_sets = _grid_candidates(stager.d, arg)
            candidates = [stager.tangential(c) for c in coord_sets]
        elif kind == "directions":
            if not arg:
                raise ValueError("empty direction list")
            candidates = []
            for v in arg:
                vf = VectorField.constant(m.n, [rat(c) for c in v], m.cap - 1)
                proj = project_to_complex_tangent(m, j, vf).at_zero()
                if not _is_zero_vec(proj):
                    candidates.append(proj)
            if not candidates:
                raise GeometryError(
                    "no direction has a nonzero tangential part")
        else:
            raise ValueError(f"unknown strategy {kind!r}")
        best = None
        for cand in candidates:
            rep = stager.run_from_u1(stager.normalize_u1(cand), False, False,
                                     realize=False)
            if best is None or rep.lower_bound > best.lower_bound:
                best = rep
            if best.lower_bound >= k_max:
                break
        x = realize_field_from_disk(m, j, best.witness_disk,
                                    best.lower_bound - 2)
        best.witness_field_jet = field_jet(x, j, best.lower_bound - 2)
        return best

    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# cross validation and scans


@dataclass
class ValidationRecord:
    """Outcome of the three-route consistency check on one witness."""

    k: int
    contact_order: int
    realized_order: int
    commutation_order: int
    levi_slots_checked: int
    derivative_matches: int


def cross_validate(m: Hypersurface, j: ACStructure,
                   report: TypeReport) -> ValidationRecord:
    """Check a witness against all three routes; failures are hard errors.

    (a) the disk's jet is realizable by a tangent field to order k,
    (b) that field commutes at 0 to order k+1,
    (c) all trace combinations L^(p,q), p+q <= k-1, vanish on the x-jet,
    (d) the field's pure x-derivatives match the disk's through k+1.
    """
    if report.witness_disk is None:
        raise ValueError("report carries no witness disk")
    u = report.witness_disk
    k = report.lower_bound - 2
    co = contact_order(m, u)
    if co.order < k + 2:
        raise TheoremViolation(
            f"witness contact {co.order} below reported bound {k + 2}")
    x = realize_field_from_disk(m, j, u, k)
    fj = field_jet(x, j, k + 1)
    for p in range(k + 1):
        for q in range(k + 1 - p):
            if tuple(fj.entry(p, q)) != tuple(u.derivative(p + 1, q)):
                raise TheoremViolation(
                    f"realized field misses the disk jet at ({p},{q})")
    crep = commutation_defect(x, j, k + 1)
    if crep.max_vanishing_order < k + 1:
        raise TheoremViolation(
            f"realized field commutes to {crep.max_vanishing_order}, "
            f"expected {k + 1}")
    x_jet = [u.derivative(mm, 0) for mm in range(1, k + 2)]
    slots = 0
    for s in range(k):
        for p in range(s + 1):
            if higher_levi(m, j, x_jet[:s + 2], p, s - p) != 0:
                raise TheoremViolation(
                    f"L^({p},{s - p}) nonzero on a contact-{co.order} witness")
            slots += 1
    matches = 0
    for mm in range(1, k + 2):
        if tuple(fj.entry(mm - 1, 0)) != tuple(u.derivative(mm, 0)):
            raise TheoremViolation(
                f"pure derivative mismatch at order {mm}")
        matches += 1
    return ValidationRecord(k, co.order, k, crep.max_vanishing_order,
                            slots, matches)


def scan_type(m: Hypersurface, j: ACStructure, points, k_max: int,
              strategy="exact_staged"):
    """Type reports at several surface points, in input order.

    Each point is translated to the origin (projecting onto the surface
    first when it is off it), J(point) is renormalized to the standard
    block form by a constant linear change, and the exact staged search
    runs there.  Witness data in each report lives in the recentered
    adapted coordinates; the reported point is in the original ones.
    """
    out = []
    for point in points:
        pt = [rat(c) for c in point]
        if m.phi.evaluate(pt) != 0:
            pt = project_point_to_surface(m, pt)
        mc, jc, _ = recenter(m, j, pt)
        rep = type_search(mc, jc, k_max, strategy)
        out.append(TypeReport(tuple(pt), rep.lower_bound, rep.certified_exact,
                              rep.cap_reached, rep.witness_disk,
                              rep.witness_field_jet, rep.obstruction))
    return out
