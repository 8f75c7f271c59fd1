"""Command-line entry point.

Exit codes: 0 success or verified, 1 verification failure (the report says
why), 2 usage error.  Reports are deterministic for fixed inputs; JSON
output is sorted and carries no timings.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__

FORMATS = ("text", "json")


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunConfig:
    command: str
    format: str = "text"
    seed: int = 0
    params: dict = field(default_factory=dict)
    tol: float | None = None
    window: tuple | None = None
    output: Path | None = None


@dataclass
class Outcome:
    code: int
    report: object
    text: str


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def parse_value(text: str) -> Fraction | float:
    """Rational ("3/2", "-4") or decimal ("0.25", "1e-3")."""
    try:
        return Fraction(text) if "e" not in text.lower() else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None


def parse_params(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name.isidentifier():
            raise UsageError("--param", f"expected name=value, got {item!r}")
        try:
            out[name] = parse_value(value)
        except ValueError as exc:
            raise UsageError("--param", str(exc)) from None
    return out


def parse_window(text: str | None):
    if text is None:
        return None
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--window", f"expected a,b, got {text!r}") from None
    if not a < b:
        raise UsageError("--window", "left end must be smaller than right end")
    return a, b


def parse_init(text: str | None):
    """x0:v0,v1,..."""
    if text is None:
        return None
    try:
        x0, _, vals = text.partition(":")
        return float(x0), [float(v) for v in vals.split(",")]
    except ValueError:
        raise UsageError("--init", f"expected x0:v0,v1,..., got {text!r}") from None


def _expr(text: str | None, flag: str):
    from .symkernel import parse

    if text is None:
        return None
    try:
        return parse(text)
    except Exception as exc:  # parse errors carry their own message
        raise UsageError(flag, f"cannot parse {text!r}: {exc}") from None


def _num(v) -> str:
    return str(v) if isinstance(v, Fraction) else repr(v)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _system(args):
    from .detsys import ConformalOrderTooLow, generate

    try:
        return generate(args.mechanics, args.order, args.type)
    except ConformalOrderTooLow as exc:
        raise UsageError("--order", str(exc)) from None
    except (KeyError, ValueError) as exc:
        raise UsageError("--type", str(exc)) from None


def cmd_derive(args, cfg) -> Outcome:
    from .detsys import solve

    sys_ = _system(args)
    pair = solve(sys_)
    report = {"system": sys_.to_json(), "pair": pair.to_json(), "condition": pair.potential.text()}
    text = "\n".join([sys_.text(), "", pair.text(), "", f"condition: {pair.potential.text()}"])
    return Outcome(0, report, text)


def cmd_solve(args, cfg) -> Outcome:
    from .detsys import solve_all

    pairs = solve_all(_system(args))
    return Outcome(0, {"branches": [p.to_json() for p in pairs]}, "\n\n".join(p.text() for p in pairs))


def _catalog(args):
    from .catalog import load_catalog

    try:
        return load_catalog(args.catalog)
    except (OSError, ValueError) as exc:
        raise UsageError("--catalog", str(exc)) from None


def _entry(cat, entry_id: str, flag: str = "--entry"):
    from .catalog import get_entry

    try:
        return get_entry(entry_id, cat)
    except KeyError as exc:
        raise UsageError(flag, exc.args[0]) from None


def _verify_text(rep: dict) -> str:
    lines = [f"{rep['id']} [{rep['mode']}]: {'verified' if rep['ok'] else 'FAILED'}"]
    for r in rep["residual"]:
        lines.append(f"  residual: {r}")
    if rep.get("ladder_ok") is not None:
        lines.append(f"  ladder product: {'ok' if rep['ladder_ok'] else 'mismatch'}")
    for c in rep["checks"]:
        mark = "ok" if c["ok"] else "UNEXPECTED"
        lines.append(f"  {mark}: {c['name']} (holds={c['holds']}, expected={c['expect']})")
    return "\n".join(lines)


def cmd_verify(args, cfg) -> Outcome:
    from .catalog import verify_all, verify_entry

    cat = _catalog(args)
    if args.report:
        try:
            old = json.loads(Path(args.report).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError("--report", str(exc)) from None
        old = old.get("reports", [old])
        new = [verify_entry(_entry(cat, r["id"], "--report"), cat, strict=False).to_json() for r in old]
        same = [a["ok"] == b["ok"] and [c["holds"] for c in a["checks"]] == [c["holds"] for c in b["checks"]]
                for a, b in zip(old, new)]
        text = "\n".join(f"{r['id']}: {'same verdicts' if s else 'verdicts differ'}" for r, s in zip(new, same))
        return Outcome(0 if all(same) else 1, {"reports": new, "reproduced": all(same)}, text)
    if args.all:
        reps = verify_all(catalog_file=args.catalog)
    elif args.entry:
        reps = [verify_entry(_entry(cat, e), cat, strict=False).to_json() for e in args.entry]
    else:
        raise UsageError("--entry", "give --entry ID (repeatable), --all or --report FILE")
    ok = all(r["ok"] for r in reps)
    report = reps[0] if len(reps) == 1 else {"reports": reps, "ok": ok}
    return Outcome(0 if ok else 1, report, "\n".join(_verify_text(r) for r in reps))


def cmd_list(args, cfg) -> Outcome:
    from .catalog import list_entries

    cat = _catalog(args)
    rows = list_entries(args.mechanics, args.type, args.order, catalog=cat)
    report = [{"id": e.id, "mechanics": e.mechanics, "kind": e.kind, "M": e.M, "mode": e.mode,
               "potential": e.potential.text()} for e in rows]
    text = "\n".join(f"{r['id']:<8} {r['mechanics']:<9} {r['kind']} M={r['M']} {r['mode']:<17} {r['potential']}"
                     for r in report)
    return Outcome(0, report, text)


def _composition(args):
    from .composer import CompositionSpec, KindMismatch, RationalityViolation, compose

    cat = _catalog(args)
    for flag, e in (("--x", args.x), ("--y", args.y)):
        _entry(cat, e, flag)
    try:
        spec = CompositionSpec(args.case, args.x, args.y, args.m or 1, args.n or 1,
                               _expr(args.alpha1, "--alpha1"), _expr(args.alpha2, "--alpha2"))
        return compose(spec, cat)
    except KindMismatch as exc:
        raise UsageError("--case", str(exc)) from None
    except RationalityViolation as exc:
        raise UsageError("--m/--n", str(exc)) from None
    except ValueError as exc:
        raise UsageError("--case", str(exc)) from None


def _composition_text(comp) -> str:
    from .symkernel import to_text

    lines = [f"case {comp.spec.case}: x <- {comp.spec.x}, y <- {comp.spec.y}, m={comp.spec.m}, n={comp.spec.n}",
             f"V = {to_text(comp.potential)}",
             f"K = {comp.K}",
             f"order {comp.order} (expected {comp.expected_order})"]
    if comp.trivial:
        lines.append("K is a polynomial in H1, H2 (trivial integral)")
    lines += [f"note: {n}" for n in comp.notes]
    return "\n".join(lines)


def cmd_compose(args, cfg) -> Outcome:
    from .composer import check_superintegrable

    comp = _composition(args)
    report = {"composition": comp.to_json()}
    text = _composition_text(comp)
    code = 0 if comp.order == comp.expected_order else 1
    if args.check:
        rep = check_superintegrable(comp, strict=False, seed=cfg.seed)
        report["check"] = rep.to_json()
        text += "\n" + _check_text(rep)
        code = max(code, 0 if rep.integral else 1)
    return Outcome(code, report, text)


def _check_text(rep) -> str:
    lines = [f"[H, K] = 0: {not rep.residual_HK}", f"[H, A] = 0: {not rep.residual_HA}",
             f"functional rank of (H, A, K): {rep.functional_rank}",
             f"K independent of polynomials in H, A: {rep.polynomially_independent}"]
    lines += [f"residual [H, K]: {r}" for r in rep.residual_HK[:5]]
    lines += [f"note: {n}" for n in rep.notes]
    return "\n".join(lines)


def cmd_check(args, cfg) -> Outcome:
    from .composer import check_superintegrable, verify_family

    if args.family:
        cat = _catalog(args)
        if args.family not in cat.families:
            raise UsageError("--family", f"unknown family {args.family!r}")
        values = {k: v for k, v in (("m", args.m), ("n", args.n)) if v}
        rep = verify_family(args.family, values, cat)
        text = f"{rep.id} {rep.values}: potential matches {rep.potential_matches}, integral {rep.integral}"
        if rep.detail:
            text += f"\n{rep.detail}"
        return Outcome(0 if rep.ok else 1, rep.to_json(), text)
    if not (args.case and args.x and args.y):
        raise UsageError("--case", "give --family or --case with --x and --y")
    comp = _composition(args)
    rep = check_superintegrable(comp, strict=False, seed=cfg.seed)
    ok = rep.integral and rep.polynomially_independent and rep.functional_rank == 3
    return Outcome(0 if ok else 1, {"composition": comp.to_json(), "check": rep.to_json()},
                   _composition_text(comp) + "\n" + _check_text(rep))


def cmd_algebra(args, cfg) -> Outcome:
    from .composer import NotReducibleToPolynomialAlgebra, algebra_structure

    comp = _composition(args)
    try:
        alg = algebra_structure(comp)
    except NotReducibleToPolynomialAlgebra as exc:
        return Outcome(1, {"error": str(exc), "remainder": str(exc.remainder)}, f"not reducible: {exc}")
    js = alg.to_json()
    lines = [f"C = [A, B] = {js['C']}", f"[A, C] = {js['R']}", f"[B, C] = {js['S']}"]
    for key, label in (("template_R", "[A, C]"), ("template_S", "[B, C]")):
        if js[key] is not None:
            lines.append(f"expected {label} = {js[key]}: {'match' if js[key.replace('template_', '') + '_matches'] else 'MISMATCH'}")
    lines.append(f"Jacobi identity: {'ok' if alg.jacobi_ok else 'FAILED'}")
    lines += [f"note: {n}" for n in alg.notes]
    ok = alg.jacobi_ok is not False and alg.R_matches is not False and alg.S_matches is not False
    return Outcome(0 if ok else 1, {"composition": comp.to_json(), "algebra": js}, "\n".join(lines))


def cmd_painleve(args, cfg) -> Outcome:
    from .painleve import NoNegativeBalance, painleve_verdict
    from .symkernel import from_json

    if args.entry:
        cat = _catalog(args)
        entry = _entry(cat, args.entry)
        checks = [c for c in entry.checks if c.kind == "painleve"]
        if checks:
            ode, unknown = from_json(checks[0].data["expr"]), checks[0].data.get("unknown")
        elif entry.potential.variant == "ode":
            ode, unknown = entry.potential.expr, entry.potential.unknown
        else:
            raise UsageError("--entry", f"{args.entry} has no ODE to test")
    elif args.ode:
        ode, unknown = _expr(args.ode, "--ode"), args.unknown
    else:
        raise UsageError("--ode", "give --ode EXPR or --entry ID")
    try:
        rep = painleve_verdict(ode, unknown)
    except NoNegativeBalance as exc:
        return Outcome(1, {"verdict": "inapplicable", "reason": str(exc)}, f"inapplicable: {exc}")
    except ValueError as exc:
        raise UsageError("--ode", str(exc)) from None
    js = rep.to_json()
    lines = [f"{js['unknown']} order {js['order']}: {js['verdict']}"]
    for b in js["branches"]:
        lines.append(f"  p={b['p']} d0={b['d0']} resonances={b['resonances']} {b['verdict']}"
                     + (f" ({b['reason']})" if b["reason"] else ""))
    return Outcome(0 if rep.verdict == "passes" else 1, js, "\n".join(lines))


def _known_parameters(entry) -> set:
    from .numeric import DEFAULT_PARAMS, parametrizations
    from .detsys import PotentialSpec

    names = set(DEFAULT_PARAMS) | {"alpha1", "alpha2"}
    exprs = list(entry.pair.f) + [entry.potential.expr]
    for c in parametrizations(entry).values():
        spec = PotentialSpec.from_json(c.data["potential"])
        exprs.append(spec.expr)
        exprs += [r.replacement for r in spec.aux]
    for e in exprs:
        names |= {g[1] for g in e.gens() if g[0] == 2}
    return names


def cmd_numcheck(args, cfg) -> Outcome:
    from .numeric import DEFAULT_TOL, DEFAULT_WINDOW, JetOrderInsufficient, SingularityInWindow, numcheck

    cat = _catalog(args)
    entry = _entry(cat, args.entry)
    unknown = set(cfg.params) - _known_parameters(entry)
    if unknown:
        raise UsageError("--param", f"unknown parameter(s) {sorted(unknown)} for {entry.id}")
    try:
        rep = numcheck(entry, cfg.params, cfg.window or DEFAULT_WINDOW, cfg.tol or DEFAULT_TOL,
                       parse_init(args.init), args.via, cfg.seed, args.bound, args.h)
    except KeyError as exc:
        raise UsageError("--via", exc.args[0]) from None
    except SingularityInWindow as exc:
        return Outcome(1, {"id": entry.id, "error": "singularity", "pole": exc.pole,
                           "window": list(exc.window)}, str(exc))
    except (JetOrderInsufficient, ValueError) as exc:
        return Outcome(1, {"id": entry.id, "error": str(exc)}, f"error: {exc}")
    js = rep.to_json()
    js["params"] = {k: _num(v) for k, v in rep.params.items()}
    text = (f"{rep.id} ({rep.mechanics}{', via ' + rep.via if rep.via else ''}): residual {rep.residual:.3e} "
            f"{'<=' if rep.ok else '>'} {rep.bound:.1e} on [{rep.window[0]:g}, {rep.window[1]:g}] at tol {rep.tol:g}\n"
            f"params {js['params']}; ODE residual {rep.ode_residual:.2e}")
    if rep.pole is not None:
        text += f"\npole near {rep.pole:.6g}"
    return Outcome(0 if rep.ok else 1, js, text)


COMMANDS = {"derive": cmd_derive, "solve": cmd_solve, "verify": cmd_verify, "list": cmd_list,
            "compose": cmd_compose, "check": cmd_check, "algebra": cmd_algebra,
            "painleve": cmd_painleve, "numcheck": cmd_numcheck}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    p.add_argument("--output", type=Path, help="also write the report here")
    p.add_argument("--catalog", help="catalogue file (default: $SUPERINT_CATALOG or the bundled one)")
    return p


def _composition_flags(p, required: bool = True):
    p.add_argument("--case", required=required, type=str.upper,
                   choices=["AA", "BB", "CB", "DD", "CC", "AD"])
    p.add_argument("--x", required=required, help="catalogue id on the x axis")
    p.add_argument("--y", required=required, help="catalogue id on the y axis")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha1")
    p.add_argument("--alpha2")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="superint", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"superint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("derive", "determining equations and the principal solution"),
                        ("solve", "all solution branches")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--mechanics", required=True, choices=["quantum", "classical"])
        p.add_argument("--type", required=True, choices=list("abcd"))
        p.add_argument("--order", required=True, type=int)

    p = sub.add_parser("verify", parents=[common], help="verify catalogue entries")
    p.add_argument("--entry", action="append")
    p.add_argument("--all", action="store_true")
    p.add_argument("--report", help="re-run the entries of a saved JSON report and compare verdicts")

    p = sub.add_parser("list", parents=[common], help="list catalogue entries")
    p.add_argument("--mechanics", choices=["quantum", "classical"])
    p.add_argument("--type", choices=list("abcd"))
    p.add_argument("--order", type=int)

    p = sub.add_parser("compose", parents=[common], help="two-dimensional H and K")
    _composition_flags(p)
    p.add_argument("--check", action="store_true", help="also check superintegrability")

    p = sub.add_parser("check", parents=[common], help="superintegrability of a composition or a family")
    _composition_flags(p, required=False)
    p.add_argument("--family")

    p = sub.add_parser("algebra", parents=[common], help="polynomial algebra of a composition")
    _composition_flags(p)

    p = sub.add_parser("painleve", parents=[common], help="Painleve test of an ODE")
    p.add_argument("--ode", help="expression equal to zero, e.g. \"V'' - 6*V^2 - x\"")
    p.add_argument("--unknown")
    p.add_argument("--entry")

    p = sub.add_parser("numcheck", parents=[common], help="numeric residual on an integrated jet")
    p.add_argument("--entry", required=True)
    p.add_argument("--via", help="name (prefix) of a parametrization check to integrate instead")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--tol", type=float)
    p.add_argument("--window", help="a,b")
    p.add_argument("--init", help="x0:v0,v1,... for the ODE's unknown")
    p.add_argument("--h", type=float, help="grid step")
    p.add_argument("--bound", type=float, default=1e-6)
    p.add_argument("--csv", type=Path, help="dump the jet here")
    return parser


def _config(args) -> RunConfig:
    params = parse_params(getattr(args, "param", None))
    tol = getattr(args, "tol", None)
    if tol is not None and not tol > 0:
        raise UsageError("--tol", "must be positive")
    if getattr(args, "h", None) is not None and not args.h > 0:
        raise UsageError("--h", "must be positive")
    for flag in ("m", "n"):
        v = getattr(args, flag, None)
        if v is not None and v < 1:
            raise UsageError(f"--{flag}", "must be a positive integer")
    return RunConfig(args.command, args.format, args.seed, params, tol,
                     parse_window(getattr(args, "window", None)), args.output)


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.report, indent=1, sort_keys=True, default=str)
    return outcome.text


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        outcome = COMMANDS[args.command](args, cfg)
        if args.command == "numcheck" and args.csv and outcome.code == 0:
            _dump_csv(args, cfg)
    except UsageError as exc:
        print(f"superint {args.command}: error: {exc}", file=sys.stderr)
        return 2
    out = render(outcome, cfg.format)
    print(out)
    if cfg.output:
        cfg.output.write_text(out + "\n")
    return outcome.code


def _dump_csv(args, cfg):
    from .catalog import load_catalog
    from .detsys import PotentialSpec
    from .numeric import DEFAULT_TOL, DEFAULT_WINDOW, integrate_jet, parametrizations

    entry = _entry(load_catalog(args.catalog), args.entry)
    spec = entry.potential
    if args.via:
        spec = PotentialSpec.from_json(next(c for n, c in parametrizations(entry).items()
                                            if n.startswith(args.via)).data["potential"])
    if spec.variant == "closed" and not spec.aux:
        return
    jet = integrate_jet(spec, cfg.params, parse_init(args.init), cfg.window or DEFAULT_WINDOW,
                        cfg.tol or DEFAULT_TOL, h=args.h)
    jet.dump_csv(args.csv)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
