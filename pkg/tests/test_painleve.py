import time

import pytest
import sympy as sp

from superint.catalog import get_entry
from superint.painleve import dominant_balance, painleve_verdict, resonances
from superint.symkernel import Expr, parse, sym, to_sympy

HBAR = sym("hbar")

PAINLEVE_ONE = parse("V''(x) - 6*V(x)^2 - x")
RICCATI = parse("u'(x) - u(x)^2")
CUSP = parse("u'(x)^2 - u(x)^3")


def d5() -> Expr:
    return get_entry("q-d5").potential.expr


class TestDominantBalance:
    def test_d5(self):
        assert (-1, -HBAR ** 2) in dominant_balance(d5())

    def test_painleve_one(self):
        assert dominant_balance(PAINLEVE_ONE) == [(-2, Expr.num(1))]

    def test_riccati(self):
        assert dominant_balance(RICCATI) == [(-1, Expr.num(-1))]

    def test_painleve_one_balance_by_hand(self):
        # 6 d0 / (x - x0)^4 from V'' against 6 d0^2 / (x - x0)^4
        t, d0 = sp.symbols("t d0")
        ode = sp.diff(d0 / t ** 2, t, 2) - 6 * (d0 / t ** 2) ** 2
        assert set(sp.solve(sp.expand(ode * t ** 4), d0)) == {0, 1}


class TestResonances:
    def test_d5(self):
        assert resonances(d5(), -1, -HBAR ** 2) == [-1, 1, 2, 5, 6, 8]

    def test_painleve_one(self):
        assert resonances(PAINLEVE_ONE, -2, Expr.num(1)) == [-1, 6]

    def test_painleve_one_indicial_oracle(self):
        # perturb V = t^-2 + eps t^(r-2) in V'' - 6 V^2, keep the linear term
        t, r = sp.symbols("t r")
        lin = sp.diff(t ** (r - 2), t, 2) - 12 * t ** -2 * t ** (r - 2)
        poly = sp.simplify(lin * t ** (4 - r))
        assert set(sp.solve(poly, r)) == {-1, 6}

    def test_riccati(self):
        assert resonances(RICCATI, -1, Expr.num(-1)) == [-1]


class TestVerdict:
    def test_d5_passes_quickly(self):
        start = time.perf_counter()
        rep = painleve_verdict(d5())
        assert time.perf_counter() - start < 5
        assert rep.verdict == "passes"
        assert rep.branches[0].resonances == [-1, 1, 2, 5, 6, 8]
        assert rep.branches[0].free == [1, 2, 5, 6, 8]

    def test_a5_passes(self):
        assert painleve_verdict(get_entry("q-a5").potential.expr).verdict == "passes"

    def test_cusp_equation_passes(self):
        # u = 4/(x - x0)^2 solves u'^2 = u^3 exactly, so the pole is a genuine double pole
        rep = painleve_verdict(CUSP)
        assert rep.verdict == "passes"
        assert [(b.p, b.resonances) for b in rep.branches] == [(-2, [-1])]
        X, x0 = sp.symbols("x x0")
        u = 4 / (X - x0) ** 2
        assert sp.simplify(sp.diff(u, X) ** 2 - u ** 3) == 0

    def test_fractional_exponent_fails(self):
        rep = painleve_verdict(parse("u''(x) - u(x)^5"))
        assert rep.verdict == "fails"
        assert rep.branches[0].reason == "non-integer leading exponent"

    def test_irrational_resonance_fails(self):
        rep = painleve_verdict(parse("u''(x) - u(x)^3 - 3*u(x)*u'(x)"))
        assert rep.verdict == "fails"
        assert all(b.non_integer for b in rep.branches)

    def test_incompatible_resonance_fails(self):
        rep = painleve_verdict(parse("u''(x) - 6*u(x)^2 - x^2"))
        assert rep.verdict == "fails"
        assert rep.branches[0].conditions[0][0] == 6

    def test_parameter_constraint_is_reported(self):
        rep = painleve_verdict(parse("u''(x) - 6*u(x)^2 - a*x^2"))
        assert rep.verdict == "conditional"
        (order, cond), = rep.branches[0].conditions
        assert order == 6 and to_sympy(cond).free_symbols == {sp.Symbol("a")}

    def test_no_pole_is_inapplicable(self):
        assert painleve_verdict(parse("u''(x) - u(x)*u'(x)^2")).verdict == "inapplicable"

    @pytest.mark.parametrize("ode", [PAINLEVE_ONE, parse("u''(x) - 2*u(x)^3"), parse("u''(x) - 3*u(x)*u'(x)")])
    def test_principal_branch_counts_pole_position(self, ode):
        rep = painleve_verdict(ode)
        principal = rep.principal
        assert -1 in principal.resonances
        assert len(principal.resonances) == rep.order

    def test_json_is_serializable(self):
        import json

        json.dumps(painleve_verdict(d5()).to_json())
