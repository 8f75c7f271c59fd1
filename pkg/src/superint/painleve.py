"""Painlevé test for polynomial ODEs in one unknown.

The unknown is expanded as ``d0 (x - x0)^p + ...`` around a generic point
``x0``.  Leading exponents come from two-term dominant balances, resonances from
the indicial polynomial, and compatibility is checked by solving the truncated
Laurent recursion up to the largest resonance.  Parameters stay symbolic, so a
nonzero compatibility condition free of ``x0`` and of the free coefficients is
reported as a parameter constraint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .symkernel import (
    Expr,
    ZERO,
    from_sympy,
    partial,
    substitute,
    sym,
    sym_gen,
    to_sympy,
    to_text,
    var,
    var_gen,
)

X0 = sym("x0")
_TAU = "tau"


class NoNegativeBalance(ValueError):
    """No negative leading exponent balances; the test does not apply."""


class NonIntegerResonance(ValueError):
    def __init__(self, roots):
        super().__init__(f"non-integer resonances: {roots}")
        self.roots = roots


@dataclass
class Branch:
    p: Fraction
    d0: Expr | None
    resonances: list = field(default_factory=list)
    non_integer: list = field(default_factory=list)
    free: list = field(default_factory=list)
    conditions: list = field(default_factory=list)  # (order, residual)
    verdict: str = "passes"
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "d0": None if self.d0 is None else to_text(self.d0),
            "resonances": self.resonances,
            "non_integer": self.non_integer,
            "free": self.free,
            "conditions": [{"order": j, "residual": to_text(r)} for j, r in self.conditions],
            "verdict": self.verdict,
            "reason": self.reason,
        }


@dataclass
class BalanceReport:
    unknown: str
    order: int
    branches: list
    verdict: str

    @property
    def principal(self):
        """First branch whose resonance count (with r = -1) equals the order."""
        for b in self.branches:
            if len(b.resonances) + len(b.non_integer) == self.order:
                return b
        return None

    def to_json(self) -> dict:
        return {
            "unknown": self.unknown,
            "order": self.order,
            "verdict": self.verdict,
            "branches": [b.to_json() for b in self.branches],
        }


# ---------------------------------------------------------------------------
# monomial signatures
# ---------------------------------------------------------------------------

def _unknown(ode: Expr, unknown: str | None) -> str:
    names = {n for n, _ in ode.functions()}
    if unknown is None:
        if len(names) != 1:
            raise ValueError(f"cannot infer the unknown among {sorted(names)}")
        return next(iter(names))
    return unknown


def _signatures(ode: Expr, unknown: str) -> dict:
    """Group ``ode`` by derivative signature ``((k, e), ...)``.

    Coefficients are cleared of negative powers of x first; x0 is generic, so
    multiplying by a power of x changes nothing in the local analysis.
    """
    xg = var_gen("x")
    low = min((min(0, dict(m).get(xg, 0)) for m in ode.terms), default=0)
    if Fraction(low).denominator != 1:
        raise ValueError("fractional powers of x are not supported")
    if low:
        ode = ode * var("x") ** (-int(low))
    sigs: dict = {}
    for m, c in ode.terms.items():
        sig, rest = [], []
        for g, e in m:
            if g[0] == 4 and g[1] == unknown:
                if Fraction(e).denominator != 1 or e < 0:
                    raise ValueError("ODE must be polynomial in the unknown and its derivatives")
                sig.append((g[2], int(e)))
            elif g[0] == 4:
                raise ValueError(f"second unknown {g[1]} in ODE")
            else:
                rest.append((g, e))
        key = tuple(sorted(sig))
        sigs[key] = sigs.get(key, ZERO) + Expr({tuple(rest): c})
    return {k: v for k, v in sigs.items() if not v.is_zero()}


def _degree(sig) -> int:
    return sum(e for _, e in sig)


def _shift(sig) -> int:
    return sum(k * e for k, e in sig)


def _weight(sig, p):
    return _degree(sig) * p - _shift(sig)


def _ff(a, k: int):
    return prod((a - i for i in range(k)), start=1)


def _at_x0(c: Expr) -> Expr:
    return substitute(c, {var_gen("x"): X0})


# ---------------------------------------------------------------------------
# balances and resonances
# ---------------------------------------------------------------------------

def _candidates(sigs) -> list:
    keys = list(sigs)
    out = set()
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            dd = _degree(a) - _degree(b)
            if dd == 0:
                continue
            p = Fraction(_shift(a) - _shift(b), dd)
            if p >= 0:
                continue
            wmin = min(_weight(s, p) for s in keys)
            if _weight(a, p) == wmin:
                out.add(p)
    return sorted(out)


def _leading(sigs, p):
    wmin = min(_weight(s, p) for s in sigs)
    return wmin, {s: c for s, c in sigs.items() if _weight(s, p) == wmin}


def _d0_roots(lead, p) -> list:
    import sympy

    d = sympy.Symbol("d0")
    total = sympy.Integer(0)
    for sig, c in lead.items():
        total += to_sympy(_at_x0(c)) * prod((sympy.Integer(_ff(p, k)) ** e for k, e in sig), start=1) * d ** _degree(sig)
    total = sympy.expand(total)
    if total == 0:
        return []
    poly = sympy.Poly(total, d)
    low = min(m[0] for m in poly.monoms())
    poly = sympy.Poly(sympy.expand(total / d ** low), d)
    if poly.degree() < 1:
        return []
    roots = sympy.roots(poly)
    if sum(roots.values()) != poly.degree():
        raise ValueError(f"could not solve the leading-order equation {poly.as_expr()} = 0")
    return [r for r in roots if r != 0]


def dominant_balance(ode: Expr, unknown: str | None = None) -> list:
    """All negative integer leading exponents with their nonzero ``d0``.

    Returns a list of ``(p, d0)``.  Non-integer exponents are skipped here;
    :func:`painleve_verdict` reports them as algebraic branching.
    """
    name = _unknown(ode, unknown)
    sigs = _signatures(ode, name)
    cands = _candidates(sigs)
    out = []
    for p in cands:
        if p.denominator != 1:
            continue
        _, lead = _leading(sigs, p)
        for r in _d0_roots(lead, p):
            out.append((int(p), from_sympy(r, functions=())))
    if not out and not any(p.denominator != 1 for p in cands):
        raise NoNegativeBalance("no negative exponent gives a consistent dominant balance")
    return out


def _indicial(lead, p, d0):
    import sympy

    r = sympy.Symbol("r")
    d0s = to_sympy(d0)
    q = sympy.Integer(0)
    for sig, c in lead.items():
        base = to_sympy(_at_x0(c)) * d0s ** (_degree(sig) - 1)
        base *= prod((sympy.Integer(_ff(p, k)) ** e for k, e in sig), start=1)
        q += base * sum((e * sympy.ff(p + r, k) / _ff(p, k) for k, e in sig), sympy.Integer(0))
    return sympy.Poly(sympy.expand(q), r)


def _resonance_roots(lead, p, d0):
    import sympy

    poly = _indicial(lead, p, d0)
    if poly.is_zero:
        raise ValueError("degenerate indicial polynomial")
    roots = sympy.roots(poly.monic())
    ints, others = [], []
    for root, mult in roots.items():
        root = sympy.nsimplify(sympy.simplify(root))
        if root.is_integer:
            ints += [int(root)] * mult
        else:
            others += [str(root)] * mult
    if sum(roots.values()) != poly.degree():
        others.append("unsolved factor")
    return sorted(ints), others


def resonances(ode: Expr, p: int, d0: Expr, unknown: str | None = None) -> list:
    """Integer roots, with multiplicity, of the indicial polynomial at (p, d0)."""
    name = _unknown(ode, unknown)
    sigs = _signatures(ode, name)
    _, lead = _leading(sigs, Fraction(p))
    ints, others = _resonance_roots(lead, Fraction(p), d0)
    if others:
        raise NonIntegerResonance(others)
    return ints


# ---------------------------------------------------------------------------
# compatibility
# ---------------------------------------------------------------------------

def _mul_trunc(a: dict, b: dict, cap: int) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= cap:
                out[i + j] = out.get(i + j, ZERO) + x * y
    return out


def _laurent_orders(sigs, p: int, d0: Expr, upto: int) -> tuple:
    """Coefficients of tau^(wmin + j), j = 0..upto, for u = sum d_j tau^(p+j)."""
    wmin = min(_weight(s, p) for s in sigs)
    coeffs = [d0] + [sym(f"d{j}") for j in range(1, upto + 1)]
    tau = var(_TAU)
    cap = wmin + upto
    deriv = {}
    total: dict = {}
    for sig, c in sigs.items():
        cs = substitute(c, {var_gen("x"): X0 + tau}).as_poly(var_gen(_TAU))
        factors = []
        for k, e in sig:
            if k not in deriv:
                deriv[k] = {p + j - k: coeffs[j] * _ff(p + j, k) for j in range(upto + 1) if _ff(p + j, k)}
            factors += [deriv[k]] * e
        mins = [min(f) for f in factors]
        acc = {int(k): v for k, v in cs.items()}
        for idx, f in enumerate(factors):
            acc = _mul_trunc(acc, f, cap - sum(mins[idx + 1:]))
        for k, v in acc.items():
            if k <= cap:
                total[k] = total.get(k, ZERO) + v
    return wmin, [total.get(wmin + j, ZERO) for j in range(upto + 1)]


def _compatibility(sigs, branch: Branch, upto: int):
    import sympy

    p = int(branch.p)
    _, orders = _laurent_orders(sigs, p, branch.d0, upto)
    solved: dict = {}
    res = set(branch.resonances)
    for j in range(1, upto + 1):
        g = sym_gen(f"d{j}")
        s = substitute(orders[j], solved) if solved else orders[j]
        q = partial(s, g)
        rest = substitute(s, {g: ZERO})
        if q.is_zero():
            if j not in res:
                branch.verdict, branch.reason = "undetermined", f"unexpected degeneracy at order {j}"
                return
            branch.free.append(j)
            if not rest.is_zero():
                branch.conditions.append((j, rest))
            continue
        if not partial(q, g).is_zero():
            raise ValueError("Laurent recursion is not linear in the new coefficient")
        if q.is_single_term():
            solved[g] = -rest * q.inverse()
        else:
            val = sympy.cancel(-to_sympy(rest) / to_sympy(q))
            try:
                solved[g] = from_sympy(val, functions=())
            except ValueError:
                branch.verdict, branch.reason = "undetermined", f"non-polynomial coefficient at order {j}"
                return
    if branch.conditions:
        generic = {sym_gen("x0")} | {sym_gen(f"d{j}") for j in branch.free}
        # a numeric remainder, or one involving x0 or a free coefficient,
        # cannot be removed by choosing parameters
        if all(r.gens() and not (r.gens() & generic) for _, r in branch.conditions):
            branch.verdict, branch.reason = "conditional", "parameter constraints at resonances"
        else:
            branch.verdict, branch.reason = "fails", "incompatible resonance condition"


def painleve_verdict(ode: Expr, unknown: str | None = None) -> BalanceReport:
    """Run balances, resonances and resonance compatibility on every branch."""
    name = _unknown(ode, unknown)
    order = ode.max_order(name)
    sigs = _signatures(ode, name)
    cands = _candidates(sigs)
    branches = []
    for p in cands:
        if p.denominator != 1:
            branches.append(Branch(p, None, verdict="fails", reason="non-integer leading exponent"))
            continue
        _, lead = _leading(sigs, p)
        for r in _d0_roots(lead, p):
            b = Branch(p, from_sympy(r, functions=()))
            b.resonances, b.non_integer = _resonance_roots(lead, p, b.d0)
            if b.non_integer:
                b.verdict, b.reason = "fails", "non-integer resonance"
            elif b.resonances and max(b.resonances) > 0:
                _compatibility(sigs, b, max(b.resonances))
            branches.append(b)
    if not branches:
        return BalanceReport(name, order, [], "inapplicable")
    verdicts = {b.verdict for b in branches}
    for v in ("fails", "undetermined", "conditional"):
        if v in verdicts:
            return BalanceReport(name, order, branches, v)
    return BalanceReport(name, order, branches, "passes")
