"""Levi forms: route agreement, higher forms, printed formulas, classification."""

import pytest
import sympy as sp

from levitype import (
    ACStructure,
    CapError,
    ClosedFormMismatch,
    GeometryError,
    Hypersurface,
    Q,
    TruncatedSeries,
    VectorField,
    classify_point,
    compose_phi_u,
    hermitian_levi_matrix,
    higher_levi,
    higher_levi_closed_form,
    is_complex_tangent,
    levi_form_bracket,
    levi_form_hessian,
    levi_polar,
    project_to_complex_tangent,
    propagate_cr_jet,
)
from levitype.geometry import apply_jstd

from conftest import (
    make_rng,
    random_phi,
    random_positive_unit,
    random_structure,
    random_tangent_field,
    random_vector,
)

CAP = 8
JSTD = ACStructure.standard(2, CAP)
E1 = (1, 0, 0, 0)


def surface(n, cap, terms):
    nv = 2 * n
    return Hypersurface(n, TruncatedSeries(nv, cap, {k: Q(v) for k, v in terms.items()}))


SPHERE = surface(2, CAP, {(0, 0, 1, 0): 2, (2, 0, 0, 0): 1, (0, 2, 0, 0): 1})
FLAT = surface(2, CAP, {(0, 0, 1, 0): 2})
SADDLE = surface(2, CAP, {(0, 0, 1, 0): 2, (2, 0, 0, 0): 1, (0, 2, 0, 0): -1})
QUARTIC = surface(2, CAP, {(0, 0, 1, 0): 2, (4, 0, 0, 0): 1, (2, 2, 0, 0): 2,
                           (0, 4, 0, 0): 1})


def sphere_tangent():
    """X = d/dx1 - x1 d/dx2 + y1 d/dy2, complex tangent to SPHERE, X(0)=e_x1."""
    zero = TruncatedSeries.zero(4, CAP)
    one = TruncatedSeries.constant(Q(1), 4, CAP)
    mx1 = TruncatedSeries(4, CAP, {(1, 0, 0, 0): Q(-1)})
    y1 = TruncatedSeries(4, CAP, {(0, 1, 0, 0): Q(1)})
    return VectorField(2, [one, zero, mx1, y1])


def coordinate_scaled_tangent(rng, m, j, cap):
    """Tangent field vanishing at 0: coordinate series times a tangent field."""
    w = random_tangent_field(rng, m, j, cap, nonzero_at_0=False)
    return w.scale_series(TruncatedSeries.variable(0, 2 * m.n, cap))


class TestTwoRoutes:
    def test_sphere_pinned_value(self):
        x = sphere_tangent()
        assert is_complex_tangent(SPHERE, JSTD, x)
        br = levi_form_bracket(SPHERE, JSTD, x)
        he = levi_form_hessian(SPHERE, JSTD, x)
        assert br.value == 4 and he.value == 4
        assert br.route == "bracket" and he.route == "hessian"
        assert he.correction_term == 0

    def test_flat_is_flat(self):
        zero = TruncatedSeries.zero(4, CAP)
        one = TruncatedSeries.constant(Q(1), 4, CAP)
        x = VectorField(2, [one, zero, zero, zero])
        assert levi_form_bracket(FLAT, JSTD, x).value == 0
        assert levi_form_hessian(FLAT, JSTD, x).value == 0

    def test_saddle_vanishes_along_x1(self):
        zero = TruncatedSeries.zero(4, CAP)
        one = TruncatedSeries.constant(Q(1), 4, CAP)
        mx1 = TruncatedSeries(4, CAP, {(1, 0, 0, 0): Q(-1)})
        my1 = TruncatedSeries(4, CAP, {(0, 1, 0, 0): Q(-1)})
        x = VectorField(2, [one, zero, mx1, my1])
        assert is_complex_tangent(SADDLE, JSTD, x)
        assert levi_form_bracket(SADDLE, JSTD, x).value == 0

    def test_routes_agree_randomized(self):
        rng = make_rng("levi-routes")
        corrections = 0
        for _ in range(12):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            br = levi_form_bracket(m, j, x)
            he = levi_form_hessian(m, j, x)
            assert br.value == he.value
            if he.correction_term != 0:
                corrections += 1
        assert corrections > 0

    def test_rejects_non_tangent_fields(self):
        zero = TruncatedSeries.zero(4, CAP)
        one = TruncatedSeries.constant(Q(1), 4, CAP)
        normalish = VectorField(2, [zero, zero, one, zero])
        with pytest.raises(GeometryError):
            levi_form_bracket(SPHERE, JSTD, normalish)
        with pytest.raises(GeometryError):
            levi_form_hessian(SPHERE, JSTD, normalish)


class TestTensorialityAndGauge:
    def test_value_at_zero_is_all_that_matters(self):
        rng = make_rng("levi-tensor")
        for _ in range(8):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            w = coordinate_scaled_tangent(rng, m, j, 5)
            assert levi_form_bracket(m, j, x + w).value == \
                levi_form_bracket(m, j, x).value

    def test_gauge_scaling_law(self):
        # L((alpha + beta J)X)(0) = (alpha(0)^2 + beta(0)^2) L(X)(0)
        rng = make_rng("levi-gauge")
        for _ in range(8):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            alpha = random_positive_unit(rng, 2 * n, 5)
            beta = random_positive_unit(rng, 2 * n, 5) - \
                TruncatedSeries.constant(Q(rng.randint(0, 4)), 2 * n, 5)
            y = x.scale_series(alpha) + j.apply(x).scale_series(beta)
            a0 = alpha.constant_term()
            b0 = beta.constant_term()
            lx = levi_form_bracket(m, j, x).value
            assert levi_form_bracket(m, j, y).value == (a0 * a0 + b0 * b0) * lx

    def test_defining_function_covariance(self):
        rng = make_rng("levi-unit")
        for _ in range(6):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            f = random_positive_unit(rng, 2 * n, 6)
            scaled = Hypersurface(n, m.phi * f)
            xs = project_to_complex_tangent(scaled, j, x)
            assert xs.at_zero() == x.at_zero()
            assert levi_form_bracket(scaled, j, xs).value == \
                f.constant_term() * levi_form_bracket(m, j, x).value


def integrable_disk_polys(derivs, order):
    """Sympy disk components for the standard structure: c_pq = J^q u_(p+q)/p!q!."""
    x, y = sp.symbols("x y")
    n2 = len(derivs[0])
    comps = [sp.Integer(0)] * n2
    for total in range(1, order + 1):
        vec = [sp.Rational(str(v)) for v in derivs[total - 1]] \
            if total <= len(derivs) else [sp.Integer(0)] * n2
        for q in range(total + 1):
            p = total - q
            scale = sp.Rational(1, sp.factorial(p) * sp.factorial(q))
            for i in range(n2):
                comps[i] += scale * vec[i] * x ** p * y ** q
            vec = apply_jstd(vec)
    return comps, x, y


def sympy_lpq(m, derivs, p, q):
    """Independent expansion of the disk Laplacian of phi . u at 0."""
    comps, x, y = integrable_disk_polys(derivs, p + q + 2)
    tr = sp.Integer(0)
    for exps, c in m.phi.terms():
        term = sp.Rational(str(c))
        for i, e in enumerate(exps):
            if e:
                term *= comps[i] ** e
        tr += term
    lap = sp.expand(sp.diff(tr, x, 2) + sp.diff(tr, y, 2))
    out = sp.diff(lap, x, p)
    out = sp.diff(out, y, q)
    return out.subs({x: 0, y: 0})


class TestHigherLevi:
    def test_sphere_first_form(self):
        assert higher_levi(SPHERE, JSTD, [E1], 0, 0) == 4

    def test_flat_hyperplane_all_zero(self):
        rng = make_rng("levi-flatpq")
        for p in range(3):
            for q in range(3 - p):
                jets = [random_vector(rng, 4) for _ in range(p + q + 1)]
                assert higher_levi(FLAT, JSTD, jets, p, q) == 0

    def test_matches_direct_expansion(self):
        rng = make_rng("levi-sympy")
        for _ in range(6):
            m = random_phi(rng, 2, 6, max_degree=3)
            v, w = random_vector(rng, 4, 2), random_vector(rng, 4, 2)
            mine = higher_levi(m, JSTD, [v, w], 1, 0)
            assert sp.Rational(str(mine)) == sympy_lpq(m, [v, w], 1, 0)

    def test_master_identity_with_padding(self):
        # a_(i+2,j) + a_(i,j+2) of any transported disk equals L^(i,j) of its
        # leading x-derivatives, whatever the later derivatives are
        rng = make_rng("levi-master")
        for _ in range(10):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6) if rng.random() < 0.5 \
                else ACStructure.standard(n, 6)
            i, jj = rng.choice(((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)))
            jets = [random_vector(rng, 2 * n, 2) for _ in range(i + jj + 2)]
            u = propagate_cr_jet(jets, j, i + jj + 4)
            tr = compose_phi_u(m, u)
            assert tr.levi_entry(i, jj) == \
                higher_levi(m, j, jets[:i + jj + 1], i, jj)

    def test_laplacian_identity_for_tangent_fields(self):
        rng = make_rng("levi-lap")
        for _ in range(8):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            assert levi_form_bracket(m, j, x).value == \
                higher_levi(m, j, [x.at_zero()], 0, 0)

    def test_cap_guard(self):
        small = surface(2, 3, {(0, 0, 1, 0): 2, (2, 0, 0, 0): 1})
        with pytest.raises(CapError):
            higher_levi(small, ACStructure.standard(2, 3), [E1, E1], 1, 1)

    def test_needs_enough_jets(self):
        with pytest.raises(ValueError):
            higher_levi(SPHERE, JSTD, [E1], 1, 0)


class TestPrintedClosedForms:
    def test_first_form_pinned(self):
        assert higher_levi_closed_form(0, 0, SPHERE, E1) == 4
        assert higher_levi_closed_form(0, 0, FLAT, E1) == 0

    def test_first_form_agrees_with_disk_route(self):
        rng = make_rng("levi-cf00")
        for _ in range(50):
            m = random_phi(rng, 2, 6)
            v = random_vector(rng, 4)
            assert higher_levi_closed_form(0, 0, m, v) == \
                higher_levi(m, ACStructure.standard(2, 6), [v], 0, 0)

    def test_second_forms_agree_on_matched_arguments(self):
        # frozen agreement cases for the printed L^(1,0) and L^(0,1)
        assert higher_levi_closed_form(1, 0, SPHERE, E1, E1) == 8
        assert higher_levi_closed_form(0, 1, SPHERE, E1, E1) == 0
        zero = (0, 0, 0, 0)
        assert higher_levi_closed_form(1, 0, SPHERE, E1, zero) == 0
        assert higher_levi_closed_form(0, 1, SPHERE, E1, zero) == 0

    def test_printed_term_quadratic_in_second_slot_is_caught(self):
        # the disk route is linear in u_2; the printed form is not, and the
        # gate reports the disagreement instead of patching it
        for s in range(4):
            u2 = (s, 0, 0, 0)
            assert higher_levi(SPHERE, JSTD, [E1, u2], 1, 0) == 8 * s
        with pytest.raises(ClosedFormMismatch) as info:
            higher_levi_closed_form(1, 0, SPHERE, E1, (2, 0, 0, 0))
        assert info.value.printed == 24
        assert info.value.disk_route == 16

    def test_mixed_form_mismatch_is_caught(self):
        m = surface(2, CAP, {(0, 0, 1, 0): 2, (0, 0, 1, 1): 1})
        with pytest.raises(ClosedFormMismatch) as info:
            higher_levi_closed_form(0, 1, m, E1, (0, 0, 1, 0))
        assert info.value.printed == -2
        assert info.value.disk_route == 0

    def test_unsupported_orders_rejected(self):
        with pytest.raises(ValueError):
            higher_levi_closed_form(1, 1, SPHERE, E1, E1, E1)


class TestPolarForm:
    def test_diagonal_is_the_levi_form(self):
        rng = make_rng("levi-polar")
        for _ in range(6):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            v = levi_polar(m, j, x, x)
            assert v.re == levi_form_bracket(m, j, x).value
            assert v.im == 0

    def test_hermitian_symmetry(self):
        rng = make_rng("levi-herm")
        for _ in range(6):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            x = random_tangent_field(rng, m, j, 5)
            y = random_tangent_field(rng, m, j, 5)
            assert levi_polar(m, j, x, y) == levi_polar(m, j, y, x).conj()

    def test_matrix_is_hermitian_with_real_diagonal(self):
        rng = make_rng("levi-mat")
        m = random_phi(rng, 3, 6)
        j = random_structure(rng, 3, 6)
        mat = hermitian_levi_matrix(m, j)
        d = len(mat.entries)
        assert d == 2 and len(mat.basis) == 2
        for i in range(d):
            assert mat.entries[i][i].im == 0
            for k in range(d):
                assert mat.entries[i][k] == mat.entries[k][i].conj()
        real = mat.realified()
        assert len(real) == 2 * d
        for i in range(2 * d):
            for k in range(2 * d):
                assert real[i][k] == real[k][i]


class TestClassification:
    def test_pinned_labels(self):
        assert classify_point(SPHERE, JSTD).label == "strictly_pseudoconvex"
        assert classify_point(SADDLE, JSTD).label == "levi_flat"
        assert classify_point(QUARTIC, JSTD).label == "levi_flat"
        ball3 = surface(3, 6, {(0, 0, 0, 0, 1, 0): 2, (2, 0, 0, 0, 0, 0): 1,
                               (0, 2, 0, 0, 0, 0): 1, (0, 0, 2, 0, 0, 0): 1,
                               (0, 0, 0, 2, 0, 0): 1})
        c = classify_point(ball3, ACStructure.standard(3, 6))
        assert (c.label, c.positive, c.negative, c.zero) == \
            ("strictly_pseudoconvex", 2, 0, 0)
        mixed = surface(3, 6, {(0, 0, 0, 0, 1, 0): 2, (2, 0, 0, 0, 0, 0): 1,
                               (0, 2, 0, 0, 0, 0): 1, (0, 0, 2, 0, 0, 0): -1,
                               (0, 0, 0, 2, 0, 0): -1})
        c = classify_point(mixed, ACStructure.standard(3, 6))
        assert (c.label, c.positive, c.negative, c.zero) == ("indefinite", 1, 1, 0)

    def test_degenerate_labels(self):
        half = surface(3, 6, {(0, 0, 0, 0, 1, 0): 2, (2, 0, 0, 0, 0, 0): 1,
                              (0, 2, 0, 0, 0, 0): 1})
        c = classify_point(half, ACStructure.standard(3, 6))
        assert (c.label, c.positive, c.zero) == ("pseudoconvex_degenerate", 1, 1)
        conc = surface(3, 6, {(0, 0, 0, 0, 1, 0): 2, (2, 0, 0, 0, 0, 0): -1,
                              (0, 2, 0, 0, 0, 0): -1})
        assert classify_point(conc, ACStructure.standard(3, 6)).label == \
            "pseudoconcave_degenerate"

    def test_curve_has_no_complex_tangent_directions(self):
        line = surface(1, 4, {(1, 0): 2})
        assert classify_point(line, ACStructure.standard(1, 4)).label == \
            "levi_flat"

    def test_concave_sphere(self):
        inverted = Hypersurface(2, -SPHERE.phi)
        assert classify_point(inverted, JSTD).label == "strictly_pseudoconcave"

    def test_label_survives_unit_rescaling(self):
        rng = make_rng("levi-classunit")
        for _ in range(4):
            n = rng.choice((2, 3))
            m = random_phi(rng, n, 6)
            j = random_structure(rng, n, 6)
            f = random_positive_unit(rng, 2 * n, 6)
            assert classify_point(m, j) == \
                classify_point(Hypersurface(n, m.phi * f), j)
