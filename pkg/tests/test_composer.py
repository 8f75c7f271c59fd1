import json

import pytest

from superint.composer import (
    CompositionSpec, KindMismatch, NotAnIntegral, RationalityViolation, algebra_structure,
    angular_momentum, check_superintegrable, compare_compact, compose, fit_polynomial,
    jauch_hill_form, leading_symbol, verify_family,
)
from superint.opalg import DiffOp
from superint.symkernel import I, sym, var

x, y = var("x"), var("y")
alpha, a1, a2, hbar = sym("alpha"), sym("alpha1"), sym("alpha2"), sym("hbar")
KAPPA = a1 ** 2 * a2 ** 2


def dd(m, n, x_id="q-d1", y_id="q-d1"):
    return compose(CompositionSpec("DD", x_id, y_id, m, n))


class TestOrders:
    @pytest.mark.parametrize("case,x_id,y_id", [
        ("AA", "q-a3", "q-a3"), ("AA", "q-a3", "q-a5"), ("BB", "q-b1", "q-b2"), ("BB", "c-b1", "c-b3"),
        ("CB", "q-c2", "q-b1"), ("CB", "c-c2", "c-b3"), ("CC", "q-c2", "q-c2"), ("CC", "c-c2", "c-c2"),
        ("AD", "q-a3", "q-d1"), ("AD", "q-a5", "q-d2"),
    ])
    def test_order_matches_table(self, case, x_id, y_id):
        comp = compose(CompositionSpec(case, x_id, y_id))
        assert comp.order == comp.expected_order, comp.notes

    @pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (3, 1), (3, 2), (4, 1), (2, 3)])
    def test_ladder_order(self, m, n):
        assert dd(m, n).order == m + n - 1

    def test_ladder_order_second_order_ladders(self):
        comp = dd(2, 1, "q-d2", "q-d1")
        assert comp.order == comp.expected_order == 2 * 2 + 1 - 1


class TestCompose:
    def test_heisenberg_pair_is_antisymmetrized(self):
        comp = compose(CompositionSpec("BB", "q-b1", "q-b1"))
        assert comp.K == comp.K1 * a2 - comp.K2 * a1

    def test_abelian_sum(self):
        comp = compose(CompositionSpec("AA", "q-a3", "q-a3"))
        assert comp.K == comp.K1 + comp.K2

    def test_two_to_one_leading_form(self):
        comp = dd(2, 1)
        # (y p_x - x p_y) p_x
        T = angular_momentum() * -1 * DiffOp({(1, 0): -I * hbar}, comp.K.vars)
        assert compare_compact(comp, T).leading

    def test_three_two_leading_form(self):
        cmp = compare_compact(dd(3, 2), jauch_hill_form(3, 2))
        assert cmp.leading and cmp.leading_ratio == 12 * I * alpha / hbar

    def test_one_one_is_angular_momentum(self):
        cmp = compare_compact(dd(1, 1), angular_momentum())
        assert cmp.literal and cmp.normalization == 2 * I * alpha / hbar

    def test_compact_form_misses_potential_terms(self):
        # classically K = 2 Im[(p1 + i a x)^2 (p2 - 2 i a y)] = 4a (x p1 p2 - y p1^2 + a^2 x^2 y),
        # and a^2 x^2 y is odd, so no polynomial in H1, H2 absorbs it
        comp = dd(2, 1, "c-d1", "c-d1")
        K = comp.K
        ratio = K.coeff(1, 1) / x
        assert (K.coeff(2, 0) / ratio + y).is_zero()
        assert (K.coeff(0, 0) / ratio - alpha ** 2 * x ** 2 * y).is_zero()
        assert not compare_compact(comp, jauch_hill_form(2, 1, "classical")).literal

    def test_absorbing_factor_trivial(self):
        comp = compose(CompositionSpec("AD", "q-a3", "q-d1"))
        assert comp.trivial and comp.P is not None
        assert "trivial" in comp.notes[0]

    def test_json(self):
        json.dumps(dd(3, 2).to_json())

    def test_absorbing_factor_json(self):
        # K2- K2+ = 2 H2 + alpha2 for the harmonic ladder
        rep = compose(CompositionSpec("AD", "q-a3", "q-d1")).to_json()
        assert rep["P"] == ["alpha2", "2"]

    def test_kind_mismatch(self):
        with pytest.raises(KindMismatch):
            compose(CompositionSpec("DD", "q-a3", "q-d1"))
        with pytest.raises(KindMismatch):
            compose(CompositionSpec("BB", "q-b1", "c-b1"))

    def test_not_coprime(self):
        with pytest.raises(RationalityViolation):
            dd(2, 2)

    def test_frequency_ratio(self):
        with pytest.raises(RationalityViolation):
            compose(CompositionSpec("DD", "q-d1", "q-d1", 2, 1, alpha, alpha))

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            CompositionSpec("ZZ", "q-d1", "q-d1")


class TestScaling:
    def test_doubled_exponents_factor_through_coprime_integral(self):
        # with X = K1+ K2-, Y = K1- K2+: X^2 - Y^2 = (X - Y)(X + Y) and XY = P(H1) P(H2)
        comp = dd(1, 1, "c-d1", "c-d1")
        m1, m2 = comp.K1, comp.K2
        X, Y = m1.conjugate() * m2, m1 * m2.conjugate()
        nf = lambda op: op.map(comp.normal_form)
        K2 = nf(X * X - Y * Y)
        assert nf(K2 - comp.K * (X + Y)).is_zero()
        assert K2.order > comp.K.order
        assert fit_polynomial(nf(X * Y), [comp.H1, comp.H2], 2, comp.normal_form) is not None
        assert check_superintegrable(comp.H, K2, comp.A, normal_form=comp.normal_form).integral


class TestSuperintegrable:
    def test_jauch_hill_two_one(self):
        rep = check_superintegrable(dd(2, 1))
        assert rep.ok and rep.functional_rank == 3

    def test_smorodinsky_winternitz(self):
        rep = check_superintegrable(dd(1, 1, "q-d2", "q-d2"))
        assert rep.integral

    def test_exotic_axis_reduces_mod_ode(self):
        rep = check_superintegrable(dd(1, 1, "q-d3", "q-d1"))
        assert rep.integral

    def test_hamiltonian_itself_is_dependent(self):
        comp = dd(1, 1)
        rep = check_superintegrable(comp.H, comp.H, comp.A)
        assert rep.integral and not rep.independent
        assert "polynomial in H and A" in rep.notes[-1]

    def test_non_integral_raises(self):
        comp = dd(1, 1)
        with pytest.raises(NotAnIntegral):
            check_superintegrable(comp.H, comp.K1, comp.A)

    def test_leading_symbol_of_hamiltonian(self):
        s = leading_symbol(dd(1, 1).H)
        assert s.free_of(lambda g: g[0] == 2 and g[1] == "alpha")


class TestAlgebra:
    def test_harmonic_ladder_row(self):
        alg = algebra_structure(dd(1, 1))
        assert alg.R_matches and alg.lam == alpha
        assert alg.R == {(0, 1, 0): 4 * alpha ** 2}
        assert alg.jacobi_ok

    def test_abelian_row(self):
        alg = algebra_structure(compose(CompositionSpec("AA", "q-a3", "q-a3")))
        assert alg.C.is_zero() and not alg.R and not alg.S

    def test_heisenberg_row_central_commutator(self):
        # [H1 - H2, a2 K1 - a1 K2] = a2 a1 + a1 a2: central, so every later bracket vanishes
        alg = algebra_structure(compose(CompositionSpec("BB", "q-b1", "q-b1")))
        assert alg.C.terms == {(0, 0): 2 * a1 * a2}
        assert not alg.R and not alg.S

    @pytest.mark.parametrize("x_id,y_id", [("q-c2", "q-b1"), ("c-c2", "c-b1")])
    def test_conformal_heisenberg_row_by_hand(self, x_id, y_id):
        # C = 2 a1 a2 H1 and [B, C] = 2 a1 a2 (a2 [K1, H1]) = -2 kappa H1 = -kappa (H + A)
        alg = algebra_structure(compose(CompositionSpec("CB", x_id, y_id)))
        assert alg.S == {(0, 0, 1): -KAPPA, (1, 0, 0): -KAPPA}
        assert alg.kappa == KAPPA and alg.S_matches is False
        assert alg.jacobi_ok

    def test_conformal_row(self):
        alg = algebra_structure(compose(CompositionSpec("CC", "c-c2", "c-c2")))
        assert alg.S_matches and alg.R_matches

    def test_classical_ladder_weights_exchanged(self):
        alg = algebra_structure(dd(2, 1, "c-d1", "c-d1"))
        assert alg.R_matches and alg.S_matches is False
        assert "weights m^2 and n^2 exchanged" in alg.notes[-1]

    def test_classical_ladder_one_one(self):
        alg = algebra_structure(dd(1, 1, "c-d1", "c-d1"))
        assert alg.R_matches and alg.S_matches

    def test_json(self):
        json.dumps(algebra_structure(dd(2, 1)).to_json())


class TestFamilies:
    @pytest.mark.parametrize("fam,values", [
        ("jauch-hill", {"m": 2, "n": 1}), ("jauch-hill", {"m": 3, "n": 2}),
        ("smorodinsky-winternitz", {}), ("caged", {"m": 2, "n": 1}), ("caged", {"m": 1, "n": 3}),
    ])
    def test_family_reproduced(self, fam, values):
        rep = verify_family(fam, values)
        assert rep.ok, rep.detail

    def test_unknown_family(self):
        with pytest.raises(KeyError):
            verify_family("nope")
