"""Regenerate src/superint/data/catalog.json.

Every pair is produced by the solver; published forms enter only as extra
checks, each recorded with whether it actually holds.  Run with ``--report``
to print the outcome of every check while building.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from superint.catalog import Catalog, CatalogEntry, Check, FamilyEntry, Identification, _run_check
from superint.detsys import PotentialSpec, SolvedPair, generate, ladder_product, solve_all
from superint.symkernel import (I, ONE, Expr, RewriteRule, differentiate, fn, fn_gen, parse, sym,
                                to_json, var)

OUT = Path(__file__).resolve().parents[1] / "src" / "superint" / "data" / "catalog.json"
FUNCS = ("V", "u", "U", "W", "wp", "P", "g")

h, a, b, x = sym("hbar"), sym("alpha1"), sym("beta"), var("x")


def P(text: str) -> Expr:
    return parse(text, functions=FUNCS)


def J(text: str) -> dict:
    return to_json(P(text))


def coeffs(*texts) -> list:
    """Momentum coefficients listed from the constant term up."""
    return [J(t) for t in texts]


def ladder_coeffs(*texts) -> list:
    """Classical ladder coefficients g_l -> f_l = g_l (l odd), i g_l (l even)."""
    return [to_json(P(t) * (I if l % 2 == 0 else ONE)) for l, t in enumerate(texts)]


def closed(expr: str, aux=(), constraints=()) -> PotentialSpec:
    return PotentialSpec("closed", P(expr), aux=list(aux), constraints=[P(c) for c in constraints])


def ode(expr: str, unknown: str = "V", variant: str = "ode") -> PotentialSpec:
    e = P(expr)
    return PotentialSpec(variant, e, unknown, e.max_order(unknown) if variant == "ode" else 0)


def rule(name: str, order: int, replacement: str, degree: int = 1) -> RewriteRule:
    return RewriteRule(fn_gen(name, order), P(replacement), degree)


WP_RULES = [rule("wp", 2, "6*wp^2 - g2/2"), rule("wp", 1, "4*wp^3 - g2*wp - g3", degree=2)]


def relation(name, f, potential=None, rel=None, expect=True, note=""):
    data = {"f": f}
    if potential is not None:
        data["potential"] = potential.to_json()
    if rel is not None:
        data["relation"] = rel.to_json()
    return Check(name, "relation", data, expect, note)


def condition(name, expr, bindings=None, entry_bindings=None, define=None, expect=True, note=""):
    data = {"expr": expr if isinstance(expr, dict) else J(expr)}
    if define:
        data["define"] = {k: J(v) for k, v in define.items()}
    if bindings:
        data["bindings"] = {k: J(v) for k, v in bindings.items()}
    if entry_bindings:
        data["entry_bindings"] = {k: J(v) for k, v in entry_bindings.items()}
    return Check(name, "condition", data, expect, note)


def first_integral(name, expr, define=None, expect=True, note=""):
    data = {"expr": expr if isinstance(expr, dict) else J(expr)}
    if define:
        data["define"] = {k: J(v) for k, v in define.items()}
    return Check(name, "first_integral", data, expect, note)


def painleve(name, expr, unknown, expect=True, note=""):
    return Check(name, "painleve", {"expr": J(expr), "unknown": unknown}, expect, note)


def _fif3_first_integral() -> dict:
    # V = hbar^6 U(X), X = hbar^2 x; u = U'' - 6U^2 - 2 i alpha X / hbar^15
    V = fn("V")
    U = V / h ** 6
    d = lambda e: differentiate(e) / h ** 2  # d/dX
    u = d(d(U)) - 6 * U ** 2 - 2 * I * a * (h ** 2 * x) / h ** 15
    F = 2 * u * d(d(u)) - d(u) ** 2 - 8 * U * u ** 2
    return to_json(F)


# literal operators shared by several blocks
K5 = ("15/8*I*hbar^3*V''' - 2*beta*hbar^2*V'' - 15/2*I*hbar*V*V' + 4*beta*V^2",
      "-25/4*hbar^2*V'' - 4*I*beta*hbar*V' + 15/2*V^2",
      "-15/2*I*hbar*V' + 4*beta*V", "5*V", "beta", "1")

D5_PAPER = ("9*hbar^10*(x*u'''''' - u''''') + 18*hbar^6*x*(-10*hbar^2*u' + alpha1^2*x^2 - 4*alpha1*hbar^2)*u''''"
            " + hbar^6*(-360*hbar^2*x*u'' + 180*hbar^2*u' + 126*alpha1^2*x^2 + 72*alpha1*hbar^2)*u''' + 90*hbar^8*u''^2"
            " + (1080*hbar^6*x*u'^2 + 864*alpha1*hbar^6*x*u' - 216*alpha1^2*hbar^4*x^3*u' - 144*alpha1^2*hbar^4*x^2*u"
            " + 6*alpha1^4*hbar^2*x^5 - 144*alpha1^3*hbar^4*x^3 + 288*alpha1^2*hbar^6*x)*u''"
            " - 360*hbar^6*u'^3 - 432*alpha1*hbar^6*u'^2 - 468*alpha1^2*hbar^4*x^2*u'^2 - 144*alpha1^2*hbar^4*x*u*u'"
            " - 288*alpha1^2*hbar^6*u' - 432*alpha1^3*hbar^4*x^2*u' + 42*alpha1^4*hbar^2*x^4*u' + 72*alpha1^2*hbar^4*u^2"
            " + 48*alpha1^4*hbar^2*x^3*u - 90*alpha1^4*hbar^4*x^2 + 36*alpha1^5*hbar^2*x^4 - alpha1^6*x^6")

C3_U = {"U": "(V + I*alpha1/(2*hbar)*x)/hbar^2"}

D4_F1 = ("-I*x*alpha1^2/(2*hbar) + I*x^3*alpha1^3/(6*hbar^3) - I*alpha1*u/hbar"
         " - 3*I*x*alpha1*u'/hbar - 4*I*hbar*u''")
D4_F0 = ("-alpha1^3/(2*hbar^2)*x^2 + alpha1^4/(24*hbar^4)*x^4 - alpha1^2/hbar^2*x*u"
         " + (alpha1 - alpha1^2/hbar^2*x^2)*u' + 4*u'^2 - 3/2*alpha1*x*u'' - 2*hbar^2*u'''")
D4_TOP = ("4*u' - alpha1^2*x^2/(2*hbar^2)", "-I*alpha1*x/hbar", "1")
D4_Q = ("k - alpha1^2*x^2 + 3*alpha1^3*x^4/(4*hbar^2) - alpha1^4*x^6/(36*hbar^4) + 4*alpha1^2*x^3/(3*hbar^2)*u"
        " + 2*u^2 - 2*hbar^2*u' - 6*alpha1*x^2*u' + 2*alpha1^2*x^4/(3*hbar^2)*u' - 4*x*u*u'"
        " - 6*x^2*u'^2 + 2*hbar^2*x*u'' + hbar^2*x^2*u'''")

D3_QUARTIC = ("9*V^4 - 14*alpha1^2*x^2*V^3 + (15/2*alpha1^4*x^4 - 6*d)*V^2"
              " - 2*alpha1^2*x^2*(3/4*alpha1^4*x^4 - d)*V + (alpha1^8*x^8/16 + d*alpha1^4*x^4/2 + d^2)")

D4_2 = ("3*x^2*u'^2 + 2*x*u*u' - 1/3*alpha1^2*x^4*u' - u^2 - 2/3*alpha1^2*x^3*u"
        " + alpha1^4*x^6/72 + k1*x + k2")

D5_1 = ("(alpha1^4*x^4 - 24*alpha1^2*x*u - 36*alpha1^2*x^2*u' + 180*u'^2)*x*u'' - 60*u'^3"
        " - 78*alpha1^2*x^2*u'^2 - 24*alpha1^2*x*u*u' + 7*alpha1^4*x^4*u' + 12*alpha1^2*u^2"
        " + 8*alpha1^4*x^3*u - 1/6*alpha1^6*x^6")


def spec_table() -> list:
    """(id, mechanics, kind, M, branch, condition_constants, potential override, checks, notes)."""
    q, c = "quantum", "classical"
    return [
        # ---- quantum, Abelian -------------------------------------------------
        ("q-a2", q, "a", 2, "beta=0", False, None, [
            relation("literal K = p^2 + beta p + 2V", coeffs("2*V", "beta", "1"), expect=False,
                     note="beta p does not commute with H for non-constant V; the pair needs beta = 0"),
        ], {"block": "V_a2", "literal_K": "p^2 + beta p + 2V"}),
        ("q-a3", q, "a", 3, "principal", True, closed("hbar^2*wp", WP_RULES), [
            relation("literal K with wp", coeffs("2*beta*hbar^2*wp - 3/2*I*hbar^3*wp'", "3*hbar^2*wp", "beta", "1")),
            condition("solver condition on hbar^2 wp", "V'' - 6*hbar^-2*V^2 + hbar^-2*k1",
                      bindings={"k1": "hbar^4*g2/2"}),
        ], {"block": "V_a3", "transcendent": "Weierstrass elliptic function wp with invariants g2, g3"}),
        ("q-a3-special", q, "a", 3, "principal", False, closed("hbar^2*x^-2"), [
            relation("K = 2p^3 + {3 hbar^2/x^2, p}", coeffs("6*I*hbar^3*x^-3", "6*hbar^2*x^-2", "0", "2")),
        ], {"block": "V_a3 special case", "literal_K": "2p^3 + {3 hbar^2/x^2, p}"}),
        ("q-a4", q, "a", 4, "principal", True, closed("hbar^2*wp", WP_RULES), [
            relation("literal K as printed", coeffs("-3/2*I*hbar*beta*V' - 8*V^2", "0",
                                                     "4*V + 3*beta*V - 4*I*hbar*V'", "beta", "1"),
                     expect=False, note="misprint: the (3 beta V - 4 i hbar V') term multiplies p, not p^2, "
                                        "and the constant term is incomplete"),
        ], {"block": "V_a4", "transcendent": "Weierstrass elliptic function wp"}),
        ("q-a5", q, "a", 5, "principal", False, None, [
            condition("hbar^4 V'''' - 20 hbar^2 V V'' - 10 hbar^2 V'^2 + 40 V^3 = 0",
                      "hbar^4*V'''' - 20*hbar^2*V*V'' - 10*hbar^2*V'^2 + 40*V^3"),
            relation("literal K", coeffs(*K5)),
            painleve("U-form passes the Painleve test", "U'''' - 20*U*U'' - 10*U'^2 + 40*U^3", "U"),
        ], {"block": "V_a5", "transcendent": "hyperelliptic; U = (u1 + u2)/4 by inversion of hyperelliptic integrals"}),
        # ---- quantum, Heisenberg ----------------------------------------------
        ("q-b1", q, "b", 1, "principal", False, None, [
            relation("literal pair", coeffs("beta", "1"), potential=closed("alpha1/(I*hbar)*x")),
        ], {"block": "V_b1"}),
        ("q-b2", q, "b", 2, "principal", False, None, [
            relation("literal pair", coeffs("2*V", "beta", "1"), potential=closed("-alpha1/(beta*hbar)*I*x")),
        ], {"block": "V_b2"}),
        ("q-b3", q, "b", 3, "principal", False, None, [
            condition("V'' = 6V^2/hbar^2 + 4 i alpha x/hbar^3", "V'' - 6/hbar^2*V^2 - 4*I*alpha1/hbar^3*x"),
            relation("literal K", coeffs("2*beta*V - 3/2*I*hbar*V'", "3*V", "beta", "1")),
            relation("V = hbar^2 w^2 P_I(w x), w^5 = 4 i alpha/hbar^5", None,
                     potential=closed("hbar^2*w^2*W", [rule("W", 2, "w^2*(6*W^2 + w*x)")],
                                      ["w^5 - 4*I*alpha1/hbar^5"])),
            painleve("first Painleve form passes", "V'' - 6/hbar^2*V^2 - 4*I*alpha1/hbar^3*x", "V"),
        ], {"block": "V_b3", "transcendent": "first Painleve transcendent"}),
        ("q-b4", q, "b", 4, "principal", False, None, [
            relation("literal K as printed", coeffs("3*beta*V - 4*I*hbar*V' - 2*hbar^2*V'' - 3/2*I*hbar*beta*V' + 4*V^2",
                                                     "0", "4*V", "beta", "1"),
                     expect=False, note="misprint: the p-linear terms were merged into the constant term"),
            condition("first Painleve form with alpha/beta", "V'' - 6/hbar^2*V^2 - 4*I*alpha1/(beta*hbar^3)*x"),
        ], {"block": "V_b4", "transcendent": "first Painleve transcendent"}),
        ("q-b5", q, "b", 5, "principal", False, None, [
            condition("V-form", "hbar^4*V'''' - 20*hbar^2*V*V'' - 10*hbar^2*V'^2 + 40*V^3 + 16*I*alpha1*x/hbar"),
            relation("literal K", coeffs(*K5)),
        ], {"block": "V_b5", "known_typos": ["alpha_x stands for alpha1", "h^7 stands for hbar^7"]}),
        # ---- quantum, conformal -------------------------------------------------
        ("q-c2", q, "c", 2, "principal", False, None, [
            relation("literal K", coeffs("2*beta/x^2", "I*alpha1/(2*hbar)*x", "1")),
        ], {"block": "V_c2", "known_typos": ["beta_1 stands for beta"]}),
        ("q-c3", q, "c", 3, "principal", False, None, [
            condition("U''' = 12UU' - 4 i alpha x U'/hbar^3 - 2 i alpha/hbar^3 as printed",
                      "U''' - 12*U*U' + 4*I*alpha1/hbar^3*x*U' + 2*I*alpha1/hbar^3", define=C3_U, expect=False,
                      note="misprint: the last term is -2 i alpha1 U/hbar^3"),
            condition("U''' = 12UU' - 4 i alpha x U'/hbar^3 - 2 i alpha U/hbar^3",
                      "U''' - 12*U*U' + 4*I*alpha1/hbar^3*x*U' + 2*I*alpha1/hbar^3*U", define=C3_U),
            first_integral("2UU'' - U'^2 - 8U^3 + 4 i alpha x U^2/hbar^3",
                           "2*U*U'' - U'^2 - 8*U^3 + 4*I*alpha1/hbar^3*x*U^2", define=C3_U),
            relation("literal K as printed", coeffs("2*beta*V - 3/2*I*hbar*V'", "3*V + I/(2*hbar)*x", "beta", "1"),
                     expect=False, note="misprint: the x p term lacks the factor alpha1"),
            relation("literal K with alpha1 restored",
                     coeffs("2*beta*V - 3/2*I*hbar*V'", "3*V + I*alpha1/(2*hbar)*x", "beta", "1")),
        ], {"block": "V_c3", "transcendent": "second Painleve transcendent (k = 0) or Ince XXXIV (k != 0)"}),
        ("q-c3-k0", q, "c", 3, "principal", False,
         closed("hbar^2*lam^2*W^2 - I*alpha1/(2*hbar)*x", [rule("W", 2, "lam^2*(2*W^3 + lam*x*W)")],
                ["lam^3 + I*alpha1/hbar^3"]), [
            condition("first integral vanishes (k = 0)",
                      "2*U*U'' - U'^2 - 8*U^3 + 4*I*alpha1/hbar^3*x*U^2", define=C3_U),
        ], {"block": "V_c3, k = 0", "transcendent": "V = -alpha^(2/3) P2(lam x)^2 - i alpha x/(2 hbar), lam = i alpha^(1/3)/hbar",
            "note": "lam is kept symbolic with lam^3 = -i alpha1/hbar^3"}),
        ("q-c3-k", q, "c", 3, "principal", False,
         closed("hbar^2/2*(mu*W' + mu^2*W^2)", [rule("W", 2, "mu^2*(2*W^3 + mu*x*W + nu)")],
                ["mu^3 - 2*I*alpha1/hbar^3"]), [],
         {"block": "V_c3, k != 0", "transcendent": "V = (2 i alpha)^(2/3)/2 (P2' + P2^2), P2 = P2(mu x), mu^3 = 2 i alpha/hbar^3",
          "note": "the P2 parameter nu is free; it fixes k"}),
        ("q-c4", q, "c", 4, "principal", False, None, [
            condition("U'''' = 12UU'' + 12U'^2 + 2 i alpha U'/(beta hbar^3) + 2 alpha^2/(3 beta^2 hbar^6)",
                      "U'''' - 12*U*U'' - 12*U'^2 - 2*I*alpha1/(beta*hbar^3)*U' - 2*alpha1^2/(3*beta^2*hbar^6)",
                      define={"U": "(V + I*alpha1/(6*beta*hbar)*x)/hbar^2"}),
            relation("literal K", coeffs("-2*hbar^2*V'' - 3/2*I*beta*hbar*V' + 4*V^2",
                                         "-4*I*hbar*V' + 3*beta*V + I*alpha1/(2*hbar)*x", "4*V", "beta", "1")),
        ], {"block": "V_c4", "transcendent": "second Painleve transcendent"}),
        ("q-c5", q, "c", 5, "principal", False, None, [
            condition("V-form", "hbar^5*V''''' - 20*hbar^3*V*V''' - 40*hbar^3*V'*V'' + 120*hbar*V^2*V'"
                                " + 8*I*alpha1*x*V' + 16*I*alpha1*V"),
            relation("literal K", coeffs(K5[0], "-25/4*hbar^2*V'' - 4*I*beta*hbar*V' + 15/2*V^2 + I*alpha1/(2*hbar)*x",
                                         *K5[2:])),
            first_integral("2uu'' - u'^2 - 8Uu^2 in V variables", _fif3_first_integral()),
        ], {"block": "V_c5", "transcendent": "Fif-III; k = 0, u = 0 reduces to the first Painleve equation"}),
        # ---- quantum, ladder ----------------------------------------------------
        ("q-d1", q, "d", 1, "principal", False, None, [
            relation("literal K", coeffs("-I*alpha1/hbar*x", "1")),
        ], {"block": "V_d1"}),
        ("q-d2", q, "d", 2, "principal", False, None, [
            relation("literal K as printed", coeffs("-alpha1^2/hbar^2*x^2 + 2*beta/x^2", "-I*alpha1/hbar*x", "1"),
                     expect=False, note="the x^2 term should be -alpha1^2 x^2/(4 hbar^2) and the constant -alpha1/2 "
                                        "is missing"),
            relation("literal K corrected",
                     coeffs("-alpha1^2/(4*hbar^2)*x^2 + 2*beta/x^2 - alpha1/2", "-I*alpha1/hbar*x", "1")),
        ], {"block": "V_d2"}),
        ("q-d3", q, "d", 3, "principal", False, None, [
            relation("V through P4 (eps = +-1, k1, k2 free)", None,
                     potential=closed("eps*alpha1*P' + 2*alpha1^2/hbar^2*(P^2 + x*P) + alpha1^2/(2*hbar^2)*x^2"
                                      " + (eps - 1)*alpha1/3 - hbar^2/6*k1",
                                      [rule("P", 2, "P'^2/(2*P) + 6*alpha1^2/hbar^4*P^3 + 8*alpha1^2/hbar^4*x*P^2"
                                                    " + (2*alpha1^2/hbar^4*x^2 - k1)*P + k2/P")],
                                      ["eps^2 - 1"])),
            relation("literal K", coeffs("I*hbar^3/(4*alpha1)*V''' - 3*hbar/alpha1*I*V*V' - (5/2*I*hbar"
                                         " - alpha1/(2*hbar)*I*x^2)*V' + alpha1^2/(2*hbar)*I*x",
                                         "3*V - alpha1^2/(2*hbar^2)*x^2", "-I*alpha1/hbar*x", "1")),
            condition("U'''' form, V = hbar^2 U + alpha^2 x^2/(6 hbar^2) - alpha/3",
                      "U'''' - 12*U*U'' - 12*U'^2 + 4*alpha1^2/hbar^4*x*U' + 8*alpha1^2/hbar^4*U"
                      " + 8*alpha1^4/(3*hbar^8)*x^2",
                      define={"U": "(V - alpha1^2/(6*hbar^2)*x^2 + alpha1/3)/hbar^2"}),
        ], {"block": "V_d3", "transcendent": "fourth Painleve transcendent"}),
        ("q-d4", q, "d", 4, "principal", False, None, [
            relation("literal K as printed", coeffs(D4_F0, D4_F1, *D4_TOP), expect=False,
                     note="f0 lacks the constant -alpha1^2/2"),
            relation("literal K with the constant restored", coeffs(D4_F0 + " - alpha1^2/2", D4_F1, *D4_TOP)),
            condition("third-order u equation as printed", D4_Q, bindings={"k": "4*k1/hbar^4"}, expect=False,
                      note="the term -alpha1^2 x^2 is spurious"),
            condition("third-order u equation without -alpha1^2 x^2", D4_Q.replace(" - alpha1^2*x^2 +", " +"),
                      bindings={"k": "4*k1/hbar^4"}),
        ], {"block": "V_d4", "transcendent": "Chazy class I, canonical form SD-I.b; fifth Painleve transcendent",
            "known_typos": ["alpha_x stands for alpha1"]}),
        ("q-d5", q, "d", 5, "principal", False, None, [
            condition("sixth-order u equation", D5_PAPER, entry_bindings={"k1": "0"}),
            condition("sixth-order u equation, generic constant", D5_PAPER, expect=False,
                      note="the integration constant k1 of the general solution is absent from the printed equation"),
            painleve("sixth-order u equation passes the Painleve test", D5_PAPER, "u"),
        ], {"block": "V_d5", "painleve": "p = -1, d0 = -hbar^2, resonances 1, 2, 5, 6, 8"}),
        # ---- classical ----------------------------------------------------------
        ("c-b1", c, "b", 1, "principal", False, None, [
            relation("literal pair", coeffs("beta", "1"), potential=closed("alpha1*x")),
        ], {"block": "V_b1"}),
        ("c-b2", c, "b", 2, "principal", False, None, [
            relation("K = 2H + beta p", coeffs("2*V", "beta", "1"), potential=closed("alpha1/beta*x")),
        ], {"block": "V_b2"}),
        ("c-b3", c, "b", 3, "principal", False, None, [
            relation("K = p(2H + V) + 2 beta H", coeffs("2*beta*V", "3*V", "beta", "1")),
        ], {"block": "V_b3"}),
        ("c-b4", c, "b", 4, "principal", False, None, [
            relation("K = 4H^2 + 2 beta p H + beta V p", coeffs("4*V^2", "3*beta*V", "4*V", "beta", "1")),
        ], {"block": "V_b4"}),
        ("c-b5", c, "b", 5, "principal", False, None, [
            relation("K = 4pH^2 + 4 beta H^2 + 2VpH + 3/2 V^2 p",
                     coeffs("4*beta*V^2", "15/2*V^2", "4*beta*V", "5*V", "beta", "1")),
        ], {"block": "V_b5", "known_typos": ["h_1 stands for H_1", "V_2 stands for V^2"]}),
        ("c-c2", c, "c", 2, "principal", False, None, [
            relation("K = 2H - alpha x p/2", coeffs("2*V", "-alpha1/2*x", "1")),
        ], {"block": "V_c2"}),
        ("c-c3", c, "c", 3, "principal", False, None, [
            condition("(alpha x - 2V)^2 V = c", "(alpha1*x - 2*V)^2*V - c", bindings={"c": "4*c"}),
            relation("literal K", coeffs("2*beta*V", "3*V - alpha1/2*x", "beta", "1")),
        ], {"block": "V_c3"}),
        ("c-c4", c, "c", 4, "principal", False, None, [
            condition("(2 beta V - alpha x)^2 V = c", "(2*beta*V - alpha1*x)^2*V - c", bindings={"c": "4*c"}),
            relation("literal K", coeffs("4*V^2", "3*beta*V - alpha1/2*x", "4*V", "beta", "1")),
        ], {"block": "V_c4"}),
        ("c-c5", c, "c", 5, "principal", False, None, [
            condition("-(alpha x - 15V^2)V' = 2 alpha V", "-(alpha1*x - 15*V^2)*V' - 2*alpha1*V"),
            relation("literal K", coeffs("4*beta*V^2", "15/2*V^2 - alpha1/2*x", "4*beta*V", "5*V", "beta", "1")),
        ], {"block": "V_c5"}),
        ("c-d1", c, "d", 1, "principal", False, None, [
            relation("K = p + i alpha x", ladder_coeffs("alpha1*x", "1")),
        ], {"block": "V_d1"}),
        ("c-d2", c, "d", 2, "principal", False, None, [
            relation("potential as printed, alpha x^2/8", ladder_coeffs("2*V - alpha1^2/2*x^2", "-alpha1*x", "1"),
                     potential=closed("alpha1*x^2/8 + gamma/x^2"), expect=False,
                     note="misprint: alpha1 x^2/8 should read alpha1^2 x^2/8"),
            relation("potential alpha^2 x^2/8 + gamma/x^2", ladder_coeffs("2*V - alpha1^2/2*x^2", "-alpha1*x", "1"),
                     potential=closed("alpha1^2*x^2/8 + gamma/x^2")),
        ], {"block": "V_d2"}),
        ("c-d3", c, "d", 3, "principal", False, None, [
            condition("24xVV' - 4 alpha^2 x^3 V' - 12V^2 - 12 alpha^2 x^2 V + alpha^4 x^4 + 4d = 0",
                      "24*x*V*V' - 4*alpha1^2*x^3*V' - 12*V^2 - 12*alpha1^2*x^2*V + alpha1^4*x^4 + 4*d",
                      bindings={"d": "k1"}),
            relation("literal K", ladder_coeffs("-(alpha1^2*x^2 - 6*V)/(2*alpha1)*V'", "3*V - alpha1^2/2*x^2",
                                                "alpha1*x", "1")),
            first_integral("quartic as printed is conserved", D3_QUARTIC.replace("d", "k1"), expect=False,
                           note="along solutions the quartic Q obeys Q' = 2Q/x: Q = 0 is invariant, Q/x^2 is conserved"),
            first_integral("quartic divided by x^2 is conserved", f"({D3_QUARTIC.replace('d', 'k1')})/x^2"),
        ], {"block": "V_d3"}),
        ("c-d4", c, "d", 4, "principal", False, None, [
            condition("first-order u equation, k1 x + k2 as printed", D4_2, bindings={"k1": "0", "k2": "8*k1"}),
            relation("literal K with printed u equation",
                     ladder_coeffs("(alpha1^2/6*x^3 - u - 3*x*u')*u''", "alpha1^3/6*x^3 - alpha1*u - 3*alpha1*x*u'",
                                   "4*u' - alpha1^2/2*x^2", "-alpha1*x", "1"),
                     potential=ode(D4_2, "u"), expect=False,
                     note="the k1 x term is inconsistent with the ladder relation; only k1 = 0 works"),
            relation("literal K with k1 = 0",
                     ladder_coeffs("(alpha1^2/6*x^3 - u - 3*x*u')*u''", "alpha1^3/6*x^3 - alpha1*u - 3*alpha1*x*u'",
                                   "4*u' - alpha1^2/2*x^2", "-alpha1*x", "1"),
                     potential=ode(D4_2.replace("k1*x", "0*x"), "u")),
        ], {"block": "V_d4"}),
        ("c-d5", c, "d", 5, "principal", False, None, [
            condition("second-order u equation", D5_1, entry_bindings={"k1": "0"}),
            relation("literal K with printed u equation",
                     ladder_coeffs("(alpha1^4*x^4 - 24*alpha1^2*x*u - 36*alpha1^2*x^2*u' + 180*u'^2)/(24*alpha1)*u''",
                                   "(180*u'^2 - 36*alpha1^2*x^2*u' - 24*alpha1^2*x*u + alpha1^4*x^4)/24",
                                   "4*alpha1*x*u' + alpha1*u - alpha1^3/6*x^3", "5*u' - alpha1^2/2*x^2",
                                   "alpha1*x", "1"),
                     potential=ode(D5_1, "u")),
        ], {"block": "V_d5"}),
    ]


FAMILIES = [
    FamilyEntry("jauch-hill", "anisotropic harmonic oscillator",
                P("alpha^2/(2*hbar^2)*(n^2*x^2 + m^2*y^2)"), ["alpha", "n", "m"],
                {"case": "DD", "x": "q-d1", "y": "q-d1", "alpha1": "n*alpha", "alpha2": "m*alpha"},
                "n, m coprime; K = (K1+)^m (K2-)^n - (K1-)^m (K2+)^n"),
    FamilyEntry("smorodinsky-winternitz", "isotropic oscillator with two inverse-square barriers",
                P("alpha^2/(8*hbar^2)*(x^2 + y^2) + beta/x^2 + gamma/y^2"), ["alpha", "beta", "gamma"],
                {"case": "DD", "x": "q-d2", "y": "q-d2", "alpha1": "alpha", "alpha2": "alpha", "m": 1, "n": 1,
                 "rename": {"beta_y": "gamma"}},
                "separable in Cartesian, polar and elliptic coordinates; omega^2 = alpha^2/(8 hbar^2)"),
    FamilyEntry("caged", "caged harmonic oscillator",
                P("alpha^2/(8*hbar^2)*(n^2*x^2 + m^2*y^2) + beta/x^2 + gamma/y^2"),
                ["alpha", "beta", "gamma", "n", "m"],
                {"case": "DD", "x": "q-d2", "y": "q-d2", "alpha1": "n*alpha", "alpha2": "m*alpha",
                 "rename": {"beta_y": "gamma"}},
                "m = n gives the Smorodinsky-Winternitz potential; the (q-d1, q-d2) pair gives beta = 0"),
]

IDENTIFICATIONS = [
    Identification("q-b1", "q-b2", {"alpha1": J("alpha1*beta")}),
    Identification("q-a3", "q-a4", {}),
    Identification("q-b3", "q-b4", {"alpha1": J("alpha1*beta")}),
    Identification("q-c3", "q-c4", {"alpha1": J("alpha1*beta")}),
    Identification("c-b1", "c-b2", {"alpha1": J("alpha1*beta")}),
    Identification("c-b3", "c-b4", {"alpha1": J("alpha1*beta")}),
    Identification("c-c3", "c-c4", {"alpha1": J("alpha1*beta"), "c": J("c*beta^2")}),
]


def build(report: bool = False) -> Catalog:
    entries = {}
    for eid, mech, kind, M, branch, cc, override, checks, notes in spec_table():
        pairs = {p.branch: p for p in solve_all(generate(mech, M, kind), condition_constants=cc)}
        pair = pairs[branch]
        notes = dict(notes)
        if override is not None:
            notes["solver_condition"] = pair.potential.text()
            pair = SolvedPair(pair.mechanics, pair.M, pair.relation, pair.f, override, pair.branch, pair.notes)
        closed_form = pair.potential.variant == "closed" and not pair.potential.aux
        mode = "symbolic-closed" if closed_form else "symbolic-mod-ODE"
        for ch in checks:
            if ch.kind == "relation" and ch.data.get("f") is None:
                ch.data.pop("f")
        entry = CatalogEntry(eid, pair, mode, None, checks, notes)
        if kind == "d":
            entry.ladder = ladder_product(pair)
        if report:
            for ch in checks:
                r = _run_check(entry, ch)
                flag = "ok " if r.ok else "BAD"
                print(f"  {flag} {eid:14s} {ch.name[:60]:60s} holds={r.holds} {'' if r.ok else r.detail[:200]}")
        entries[eid] = entry
    return Catalog(entries, {f.id: f for f in FAMILIES}, IDENTIFICATIONS)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    ap.add_argument("--report", action="store_true")
    args = ap.parse_args(argv)
    t0 = time.time()
    cat = build(args.report)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    cat.save(args.out)
    print(f"wrote {len(cat.entries)} entries, {len(cat.families)} families to {args.out} in {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
