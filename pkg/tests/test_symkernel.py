from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given

from strategies import ALPHA, HBAR, X, exprs
from superint.symkernel import (
    Expr, I, RewriteRule, RuleConflict, differentiate, fn, fn_gen, from_json, from_prefix,
    normalize, parse, reduce_mod, substitute, sym, sym_gen, to_json, to_prefix,
)

V = fn("V")


def painleve_one_rule():
    return RewriteRule(fn_gen("V", 2), 6 * V ** 2 / HBAR ** 2 + 4 * I * ALPHA * X / HBAR ** 3)


class TestNormalize:
    def test_polynomial_identity(self):
        assert normalize((X + 1) ** 2 - X ** 2 - 2 * X - 1).is_zero()

    def test_commuting_coefficients(self):
        assert (HBAR * fn("V", 1) - fn("V", 1) * HBAR).is_zero()

    def test_complex_rational_power(self):
        assert normalize(2 * (-I * HBAR) ** 3) == 2 * I * HBAR ** 3

    def test_exact_rationals(self):
        e = Expr.num(Fraction(1, 3)) + Fraction(1, 6)
        assert e == Expr.num(Fraction(1, 2))

    @given(exprs())
    def test_idempotent(self, e):
        assert normalize(normalize(e)) == normalize(e)


class TestDifferentiate:
    def test_leibniz_square(self):
        assert differentiate(V ** 2) == 2 * V * fn("V", 1)

    def test_product_rule(self):
        assert differentiate(X * fn("f3")) == fn("f3") + X * fn("f3", 1)

    def test_power_rule(self):
        b = sym("beta")
        assert differentiate(b / X ** 2) == -2 * b / X ** 3

    def test_order_increments(self):
        assert differentiate(fn("V", 3)) == fn("V", 4)


class TestReduceMod:
    def test_painleve_one(self):
        r = painleve_one_rule()
        assert reduce_mod(fn("V", 2), [r]) == r.replacement

    def test_third_derivative_uses_differentiated_rule(self):
        expected = 12 * V * fn("V", 1) / HBAR ** 2 + 4 * I * ALPHA / HBAR ** 3
        assert reduce_mod(fn("V", 3), [painleve_one_rule()]) == expected

    def test_untouched(self):
        assert reduce_mod(V, [painleve_one_rule()]) == V

    def test_conflicting_rules_rejected(self):
        with pytest.raises(RuleConflict):
            reduce_mod(fn("V", 2), [painleve_one_rule(), RewriteRule(fn_gen("V", 2), V)])

    def test_rule_must_lower_order(self):
        with pytest.raises(ValueError):
            RewriteRule(fn_gen("V", 2), fn("V", 3))

    @given(exprs(max_order=4, max_terms=4))
    def test_no_target_remains(self, e):
        out = reduce_mod(e, [painleve_one_rule()])
        assert out.max_order("V") <= 1


def _chain():
    """V'' rule, its explicit derivative, and eps**2 = 1."""
    r2 = painleve_one_rule()
    r3 = RewriteRule(fn_gen("V", 3), 12 * V * fn("V", 1) / HBAR ** 2 + 4 * I * ALPHA / HBAR ** 3)
    eps = RewriteRule(sym_gen("eps"), Expr.num(1), degree=2)
    return [r2, r3, eps]


def _highest_first(e):
    """Oracle: substitute the highest derivative present, repeatedly."""
    rules = {2: painleve_one_rule().replacement}
    while e.max_order("V") >= 2:
        k = e.max_order("V")
        repl = rules[2]
        for _ in range(k - 2):
            repl = differentiate(repl)
        e = substitute(e, {fn_gen("V", k): repl})
    eps = sym_gen("eps")
    poly = e.as_poly(eps)
    return sum((c * (sym("eps") if k % 2 else 1) for k, c in poly.items()), Expr.num(0))


@given(exprs(max_order=4, max_terms=3).map(lambda e: e * (1 + sym("eps") ** 2)))
def test_reduce_confluent(e):
    results = {reduce_mod(e, list(order)) for order in permutations(_chain())}
    assert len(results) == 1
    assert results.pop() == _highest_first(e)


class TestSubstitute:
    def test_linear_potential(self):
        e = I * HBAR * fn("V", 1)
        assert substitute(e, {"V": ALPHA * X / (I * HBAR)}) == ALPHA

    def test_hbar_to_one(self):
        assert substitute(HBAR ** 4 * fn("V", 4), {sym_gen("hbar"): Expr.num(1)}) == fn("V", 4)

    def test_constant_kills_derivatives(self):
        U = fn("U")
        e = 2 * U * fn("U", 2) - fn("U", 1) ** 2 - 8 * U ** 3
        c = sym("c")
        assert substitute(e, {"U": c}) == -8 * c ** 3


class TestSerialization:
    @given(exprs(max_order=3))
    def test_json_round_trip(self, e):
        assert from_json(to_json(e)) == e

    @given(exprs(max_order=3))
    def test_prefix_round_trip(self, e):
        assert from_prefix(to_prefix(e)) == e

    def test_prefix_deterministic(self):
        assert to_prefix(parse("2*x*V' + hbar^2")) == "(+ (* 2 (var x) (d V x 1)) (* 1 (^ hbar 2)))"

    def test_parse_division_and_powers(self):
        assert parse("x^2/8") == X ** 2 / 8
        assert parse("hbar^(-8/3)") == HBAR ** Fraction(-8, 3)
