import pytest
import sympy as sp

from superint.catalog import get_entry
from superint.detsys import (
    ConformalOrderTooLow, PotentialSpec, SolvedPair, bracket_coefficients, f_, generate,
    ladder_product, solve, solve_all, z_list,
)
from superint.opalg import AlgebraRelation, Kind, check_relation
from superint.symkernel import (
    I, ONE, ZERO, differentiate, fn, normalize, sym, to_sympy, var,
)

x, hbar, a1 = var("x"), sym("hbar"), sym("alpha1")
V = fn("V")
d = lambda e, k=1: differentiate(e, "x", k)

VALID = [(m, k, M) for m in ("quantum", "classical") for k in "abcd" for M in range(1, 6)
         if not (k == "c" and M == 1)]


class TestGenerate:
    def test_quantum_order_one(self):
        f0, f1 = f_(0), f_(1)
        z = z_list("quantum", 1)
        assert z[2] == normalize((-I * hbar) ** 3 * d(f1))
        assert z[1] == normalize(-(hbar ** 2 / 2) * (2 * d(f0) - I * hbar * d(f1, 2)))
        assert z[0] == normalize(-(hbar ** 2 / 2) * d(f0, 2) + I * hbar * f1 * d(V))

    def test_classical_order_two(self):
        f0, f1, f2 = f_(0), f_(1), f_(2)
        assert z_list("classical", 2) == [f1 * d(V), 2 * f2 * d(V) - d(f0), -d(f1), -d(f2)]

    @pytest.mark.parametrize("mech", ["quantum", "classical"])
    @pytest.mark.parametrize("M", [1, 2, 3, 4, 5])
    def test_length(self, mech, M):
        assert len(generate(mech, M, "a").z) == M + 2

    @pytest.mark.parametrize("mech", ["quantum", "classical"])
    def test_matches_operator_bracket_on_cubic_coefficients(self, mech):
        f = [x ** 3 - 2 * x, 3 * x ** 2 + ONE, x ** 3 / 5, 2 * x - 7]
        assert z_list(mech, 3, f) == bracket_coefficients(mech, 3, f)

    def test_conformal_needs_order_two(self):
        with pytest.raises(ConformalOrderTooLow):
            generate("quantum", 1, "c")

    def test_conformal_z2_is_forced_by_alpha_h(self):
        sys = generate("quantum", 3, "c")
        rhs = [a - b for a, b in zip(sys.z, sys.constraints)]
        assert rhs[2] == -a1 * hbar ** 2 / 2
        assert rhs[0] == a1 * V


class TestSolve:
    def test_painleve_one(self):
        pair = solve(generate("quantum", 3, "b"))
        target = d(V, 2) - 6 * V ** 2 / hbar ** 2 - 4 * I * a1 * x / hbar ** 3
        assert pair.potential.variant == "ode"
        assert pair.potential.expr == target

    def test_order_five_abelian(self):
        pair = solve(generate("quantum", 5, "a"))
        target = hbar ** 4 * d(V, 4) - 20 * hbar ** 2 * V * d(V, 2) - 10 * hbar ** 2 * d(V) ** 2 + 40 * V ** 3
        assert pair.potential.expr * hbar ** 4 == target

    def test_conformal_order_two(self):
        pair = solve(generate("quantum", 2, "c"))
        assert pair.potential.variant == "closed"
        assert pair.potential.expr == sym("beta") / x ** 2

    @pytest.mark.parametrize("M", [1, 2, 3, 4, 5])
    def test_classical_abelian_is_trivial(self, M):
        pairs = solve_all(generate("classical", M, "a"))
        for p in pairs:
            constant = p.potential.variant == "closed" and d(p.potential.expr).is_zero()
            assert constant or "K is a polynomial in H" in p.notes

    @pytest.mark.parametrize("M", [1, 2, 3, 4, 5])
    def test_top_coefficient_normalized(self, M):
        assert solve(generate("quantum", M, "d")).f[M] == ONE

    def test_degenerate_branch_emitted_separately(self):
        pairs = solve_all(generate("quantum", 4, "c"))
        assert [p.branch for p in pairs] == ["principal", "beta=0"]
        assert pairs[1].potential.expr == sym("beta") / x ** 2

    @pytest.mark.parametrize("mech,kind,M", VALID)
    def test_round_trip(self, mech, kind, M):
        for pair in solve_all(generate(mech, M, kind)):
            assert pair.residual().is_zero(), (mech, kind, M, pair.branch)

    @pytest.mark.parametrize("mech", ["quantum", "classical"])
    @pytest.mark.parametrize("M", [1, 2, 3, 4, 5])
    def test_ladder_sign_is_unique(self, mech, M):
        pair = solve(generate(mech, M, "d"))
        H, K = pair.H(), pair.K()
        holds = []
        for kind in (Kind.LADDER_LOWER, Kind.LADDER_RAISE):
            res = check_relation(H, K, AlgebraRelation(kind, a1)).map(pair.potential.reduce)
            holds.append(res.is_zero())
        assert sum(holds) == 1

    def test_json_round_trip(self):
        pair = solve(generate("quantum", 4, "d"))
        back = SolvedPair.from_json(pair.to_json())
        assert back.to_json() == pair.to_json()
        assert back.residual().is_zero()


def _apply(op, psi, X):
    """Action of a one-dimensional DiffOp on a sympy expression."""
    return sum(to_sympy(c).subs(sp.Symbol("x"), X) * sp.diff(psi, X, k[0]) for k, c in op.terms.items())


def _at_unit_scale(e, extra=None):
    names = {sp.Symbol("hbar"): 1, sp.Symbol("alpha1"): 1, **(extra or {})}
    return sp.sympify(e).subs(names)


class TestLadderProduct:
    def test_harmonic_against_hermite_functions(self):
        pair = get_entry("q-d1").pair
        poly = [_at_unit_scale(to_sympy(c)) for c in ladder_product(pair)]
        assert poly == [-1, 2]
        K = pair.K()
        KK = K.adjoint().compose(K)
        X = sp.Symbol("x")
        for n in range(5):
            psi = sp.hermite(n, X) * sp.exp(-X ** 2 / 2)
            energy = sp.Rational(2 * n + 1, 2)
            lhs = _at_unit_scale(_apply(KK, psi, X))
            assert sp.simplify(lhs / psi) == sum(a * energy ** k for k, a in enumerate(poly))
            assert sp.simplify(lhs / psi) == 2 * n

    @pytest.mark.parametrize("s", [sp.Rational(3, 2), sp.Integer(2), sp.Rational(7, 3)])
    def test_singular_oscillator_against_eigenstates(self, s):
        # V = x^2/8 + beta/x^2 at hbar = alpha = 1 has frequency 1/2,
        # psi_n = x^s exp(-x^2/4) L_n^(s-1/2)(x^2/2), E_n = n + s/2 + 1/4, beta = s(s-1)/2
        beta = s * (s - 1) / 2
        pair = get_entry("q-d2").pair
        extra = {sp.Symbol("beta"): beta}
        poly = [_at_unit_scale(to_sympy(c), extra) for c in ladder_product(pair)]
        assert len(poly) == 3
        K = pair.K()
        KK = K.adjoint().compose(K)
        X = sp.Symbol("x", positive=True)
        for n in range(4):
            psi = X ** s * sp.exp(-X ** 2 / 4) * sp.assoc_laguerre(n, s - sp.Rational(1, 2), X ** 2 / 2)
            energy = n + s / 2 + sp.Rational(1, 4)
            lhs = _at_unit_scale(_apply(KK, psi, X), extra)
            expected = sum(a * energy ** k for k, a in enumerate(poly))
            assert sp.simplify(lhs / psi - expected) == 0

    def test_free_particle(self):
        spec = PotentialSpec("closed", ZERO)
        pair = SolvedPair("quantum", 1, AlgebraRelation(Kind.ABELIAN, ZERO), [ZERO, ONE], spec)
        assert ladder_product(pair) == [ZERO, 2 * ONE]

    def test_stored_polynomials_reproduced(self):
        for entry_id in ("q-d1", "q-d2", "q-d3", "c-d1", "c-d2", "c-d3"):
            entry = get_entry(entry_id)
            assert ladder_product(entry.pair) == entry.ladder
