"""Acceptance criteria; each test prints one PASS/FAIL line at the pinned tolerances."""
import time

import numpy as np
from hypothesis import settings

import test_properties as props
from superint.catalog import get_entry, verify_all
from superint.composer import (
    CompositionSpec, algebra_structure, check_superintegrable, compare_compact, compose,
    jauch_hill_form,
)
from superint.detsys import bracket_coefficients, generate, solve, z_list
from superint.numeric import first_integral_drift, integrate_jet, numcheck, SingularityInWindow
from superint.painleve import painleve_verdict
from superint.symkernel import I, differentiate, fn, from_json, sym, var

x, hbar, a1, alpha = var("x"), sym("hbar"), sym("alpha1"), sym("alpha")
V = fn("V")


def verdict(capsys, number, title, passed, detail):
    with capsys.disabled():
        print(f"\ncriterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
    assert passed, detail


def test_criterion_1_determining_equations(capsys):
    start = time.perf_counter()
    mismatched, count = [], 0
    for mech in ("quantum", "classical"):
        for kind in "abcd":
            for M in range(1, 6):
                # type (c) needs M >= 2; its M = 1 Z list is the generator's raw list
                z = z_list(mech, M) if (kind == "c" and M == 1) else generate(mech, M, kind).z
                count += 1
                if z != bracket_coefficients(mech, M):
                    mismatched.append((mech, kind, M))
    elapsed = time.perf_counter() - start
    verdict(capsys, 1, "determining-equation fidelity", not mismatched and count == 40 and elapsed < 10,
            f"{count - len(mismatched)}/{count} exact matches in {elapsed:.2f} s")


def test_criterion_2_painleve_reproduction(capsys):
    d = lambda e, k=1: differentiate(e, "x", k)
    p1 = solve(generate("quantum", 3, "b")).potential
    first = p1.variant == "ode" and p1.expr == d(V, 2) - 6 * V ** 2 / hbar ** 2 - 4 * I * a1 * x / hbar ** 3
    p5 = solve(generate("quantum", 5, "a")).potential
    fifth = p5.expr * hbar ** 4 == (hbar ** 4 * d(V, 4) - 20 * hbar ** 2 * V * d(V, 2)
                                    - 10 * hbar ** 2 * d(V) ** 2 + 40 * V ** 3)
    verdict(capsys, 2, "Painleve-I and order-five reproduction", first and fifth,
            f"type b order 3 exact: {first}; type a order 5 exact: {fifth}")


def test_criterion_3_resonances(capsys):
    start = time.perf_counter()
    rep = painleve_verdict(get_entry("q-d5").potential.expr)
    elapsed = time.perf_counter() - start
    hits = [b for b in rep.branches if b.p == -1 and b.d0 == -hbar ** 2]
    res = sorted(set(hits[0].resonances) - {-1}) if hits else None
    ok = bool(hits) and res == [1, 2, 5, 6, 8] and rep.verdict == "passes" and elapsed < 5
    verdict(capsys, 3, "resonance reproduction", ok,
            f"p = -1, d0 = -hbar^2, resonances {res}, verdict {rep.verdict}, {elapsed:.2f} s")


def test_criterion_4_catalog(capsys):
    start = time.perf_counter()
    reports = verify_all()
    elapsed = time.perf_counter() - start
    bad = [r["id"] for r in reports if r["residual"] or not r["ok"]]
    verdict(capsys, 4, "catalog soundness", not bad and elapsed < 60,
            f"{len(reports) - len(bad)}/{len(reports)} entries with zero residual in {elapsed:.1f} s"
            + (f"; failing {bad}" if bad else ""))


def test_criterion_5_jauch_hill_compact_forms(capsys):
    literal, leading, commute = [], [], []
    for m, n in [(1, 1), (2, 1), (3, 1), (3, 2), (4, 1), (2, 3)]:
        comp = compose(CompositionSpec("DD", "q-d1", "q-d1", m, n))
        cmp = compare_compact(comp, jauch_hill_form(m, n))
        literal.append(cmp.literal)
        leading.append(cmp.leading)
        commute.append(check_superintegrable(comp, strict=False).integral)
    verdict(capsys, 5, "composition matches compact forms", all(literal) and all(commute),
            f"[H,K] = 0 for {sum(commute)}/6; K = c*T + poly(H1,H2) for {sum(literal)}/6; "
            f"leading symbols proportional for {sum(leading)}/6")


def test_criterion_6_polynomial_algebra(capsys):
    dd = algebra_structure(compose(CompositionSpec("DD", "q-d1", "q-d1", 1, 1)))
    dd_ok = dd.R == {(0, 1, 0): 4 * alpha ** 2 * 1} and dd.lam == alpha
    vanish = {}
    for case, entry in (("AA", "q-a3"), ("BB", "q-b1")):
        alg = algebra_structure(compose(CompositionSpec(case, entry, entry)))
        vanish[case] = (alg.C.is_zero(), not alg.R and not alg.S)
    ok = dd_ok and all(c and h for c, h in vanish.values())
    detail = (f"DD [A,C] = 4 alpha^2 B: {dd_ok}; "
              + "; ".join(f"{k} C = 0: {c}, higher brackets 0: {h}" for k, (c, h) in vanish.items()))
    verdict(capsys, 6, "polynomial algebra", ok, detail)


def test_criterion_7_painleve_four_numeric(capsys):
    entry = get_entry("q-d3")
    params = {"k1": 0, "k2": 0, "eps": 1}
    start = time.perf_counter()
    rep = numcheck(entry, params, window=(-1, 1), tol=1e-10, via="V through P4")
    tols = np.logspace(-7, -10, 7)
    res = [numcheck(entry, params, window=(-1, 1), tol=t, via="V through P4").residual for t in tols]
    slope = float(np.polyfit(np.log(tols), np.log(res), 1)[0])
    elapsed = time.perf_counter() - start
    ok = rep.residual <= 1e-6 and rep.pole is None and slope >= 0.9 and elapsed < 30
    verdict(capsys, 7, "numeric Painleve-IV ladder", ok,
            f"residual {rep.residual:.2e} at tol 1e-10 on [-1, 1]; log-log slope {slope:.2f} "
            f"over tol 1e-7..1e-10; {elapsed:.1f} s")


def test_criterion_8_classical_first_integral(capsys):
    entry = get_entry("c-d3")
    (printed,) = [c for c in entry.checks if c.name == "quartic as printed is conserved"]
    (divided,) = [c for c in entry.checks if c.name == "quartic divided by x^2 is conserved"]
    F, G = from_json(printed.data["expr"]), from_json(divided.data["expr"])
    rng = np.random.default_rng(0)
    drift_f, drift_g = [], []
    while len(drift_f) < 10:
        d, v0 = float(rng.uniform(-1, 1)), float(rng.uniform(-1, -0.1))
        try:
            jet = integrate_jet(entry.potential, {"k1": d}, init=(1.5, [v0]), window=(1.0, 2.0), tol=1e-12)
        except SingularityInWindow:
            continue
        drift_f.append(first_integral_drift(jet, F))
        drift_g.append(first_integral_drift(jet, G))
    verdict(capsys, 8, "classical quartic first integral", max(drift_f) <= 1e-8,
            f"max relative drift {max(drift_f):.2e} over 10 trajectories "
            f"(quartic divided by x^2: {max(drift_g):.2e})")


def test_criterion_9_property_suites(capsys):
    suites = {
        "Jacobi (commutator)": props.test_jacobi_commutator,
        "Jacobi (Poisson)": props.test_jacobi_poisson,
        "adjoint anti-homomorphism": props.test_adjoint_anti_homomorphism,
        "classical limit": props.test_classical_limit,
    }
    failed = []
    for name, prop in suites.items():
        try:
            settings(max_examples=200, derandomize=True, deadline=None, database=None)(prop)()
        except AssertionError:
            failed.append(name)
    verdict(capsys, 9, "property suites", not failed,
            f"200 fixed-seed cases each for {', '.join(suites)}; failures: {failed or 'none'}")
