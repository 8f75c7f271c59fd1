"""Determining equations for one-dimensional algebraic Hamiltonian pairs.

For ``H = p**2/2 + V(x)`` and ``K = sum_{l<=M} f_l(x) p**l`` the bracket
``[H, K]`` (commutator or Poisson bracket) is ``sum Z_l D**l`` (quantum,
D-normal form) or ``sum Z_l p**l`` (classical).  Each algebra type fixes the
right-hand sides; :func:`solve` integrates them from the top coefficient down
and returns the coefficients f_l together with the condition left on V.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .opalg import (HBAR, AlgebraRelation, Kind, bracket, check_relation,
                    hamiltonian, operator)
from .symkernel import (I, ONE, ZERO, Expr, NotExact, RewriteRule, antiderivative, differentiate,
                        fn, fn_gen, from_json, partial, pseudo_reduce, pseudo_remainder, reduce_mod, rule_from_json,
                        rule_to_json, substitute, sym, to_json, to_text, var)

ALPHA = sym("alpha1")
BETA = sym("beta")
X = var("x")
V = fn("V")


class ConformalOrderTooLow(ValueError):
    """Type (c) needs K of order at least two."""


class NotClosedUnderQuadrature(ValueError):
    """A coefficient needs an antiderivative outside the V / u = int V convention."""


class NotReducible(ValueError):
    """K^dagger K is not a polynomial in H modulo the potential condition."""


def f_(l: int) -> Expr:
    return fn(f"f{l}")


def _mech(mechanics: str) -> str:
    m = mechanics.lower()
    if m in ("q", "quantum"):
        return "quantum"
    if m in ("c", "classical"):
        return "classical"
    raise ValueError(f"unknown mechanics {mechanics!r}")


def _relation(kind, alpha) -> AlgebraRelation:
    if isinstance(kind, AlgebraRelation):
        return kind
    if isinstance(kind, str) and not isinstance(kind, Kind):
        kind = Kind.from_letter(kind)
    return AlgebraRelation(kind, ZERO if kind is Kind.ABELIAN else alpha)


# ---------------------------------------------------------------------------
# Z lists
# ---------------------------------------------------------------------------

def z_list(mechanics: str, M: int, f: Sequence[Expr] | None = None, V: Expr = V,
           hbar: Expr = HBAR) -> list[Expr]:
    """Coefficients Z_0..Z_{M+1} of the bracket, written out term by term."""
    mechanics = _mech(mechanics)
    f = list(f) if f is not None else [f_(l) for l in range(M + 1)]
    d = lambda e, k=1: differentiate(e, "x", k)
    dV = lambda k: d(V, k)
    z = [ZERO] * (M + 2)
    if mechanics == "classical":
        z[0] = f[1] * dV(1) if M >= 1 else ZERO
        for l in range(1, M):
            z[l] = (l + 1) * f[l + 1] * dV(1) - d(f[l - 1])
        z[M] = -d(f[M - 1])
        z[M + 1] = -d(f[M])
        return z
    mih = -I * hbar
    half = -hbar ** 2 / 2
    z[M + 1] = mih ** (M + 2) * d(f[M])
    for l in range(1, M + 1):
        zl = half * mih ** (l - 1) * (2 * d(f[l - 1]) - I * hbar * d(f[l], 2))
        for j in range(l + 1, M + 1):
            zl = zl - mih ** j * f[j] * comb(j, l) * dV(j - l)
        z[l] = zl
    z0 = half * d(f[0], 2)
    for j in range(1, M + 1):
        z0 = z0 - mih ** j * f[j] * dV(j)
    z[0] = z0
    return z


def rhs_list(mechanics: str, M: int, rel: AlgebraRelation, f: Sequence[Expr] | None = None,
             V: Expr = V, hbar: Expr = HBAR) -> list[Expr]:
    """Right-hand sides of the determining equations, coefficient by coefficient."""
    mechanics = _mech(mechanics)
    f = list(f) if f is not None else [f_(l) for l in range(M + 1)]
    r = [ZERO] * (M + 2)
    a = rel.alpha
    k = rel.kind
    if k is Kind.HEISENBERG:
        r[0] = a
    elif k is Kind.CONFORMAL:
        r[0] = a * V
        r[2] = a * (-hbar ** 2 / 2 if mechanics == "quantum" else Fraction(1, 2))
    elif k in (Kind.LADDER_LOWER, Kind.LADDER_RAISE):
        sign = -1 if k is Kind.LADDER_LOWER else 1
        for l in range(M + 1):
            c = f[l] * (-I * hbar) ** l if mechanics == "quantum" else f[l] * I
            r[l] = sign * a * c
    return r


@dataclass
class DeterminingSystem:
    mechanics: str
    M: int
    kind: AlgebraRelation
    z: list
    constraints: list
    hbar: Expr = HBAR

    def to_json(self) -> dict:
        return {"mechanics": self.mechanics, "M": self.M, "relation": self.kind.to_json(),
                "z": [to_json(e) for e in self.z], "constraints": [to_json(e) for e in self.constraints]}

    def text(self) -> str:
        lines = [f"{self.mechanics} order {self.M}, type {self.kind.kind.letter} ({self.kind.kind.value})"]
        for l, (zl, c) in enumerate(zip(self.z, self.constraints)):
            lines.append(f"  Z_{l} = {to_text(zl)}")
        for l, c in enumerate(self.constraints):
            lines.append(f"  E_{l}: {to_text(c)} = 0")
        return "\n".join(lines)


def generate(mechanics: str, M: int, kind, alpha: Expr = ALPHA, hbar: Expr = HBAR) -> DeterminingSystem:
    mechanics = _mech(mechanics)
    if M < 1:
        raise ValueError("order M must be >= 1")
    rel = _relation(kind, alpha)
    if rel.kind is Kind.CONFORMAL and M < 2:
        raise ConformalOrderTooLow("type (c) requires M >= 2")
    z = z_list(mechanics, M, hbar=hbar)
    r = rhs_list(mechanics, M, rel, hbar=hbar)
    return DeterminingSystem(mechanics, M, rel, z, [a - b for a, b in zip(z, r)], hbar)


def bracket_coefficients(mechanics: str, M: int, f: Sequence[Expr] | None = None,
                         V: Expr = V, hbar: Expr = HBAR) -> list[Expr]:
    """Z_0..Z_{M+1} computed by expanding the operator bracket directly."""
    mechanics = _mech(mechanics)
    f = list(f) if f is not None else [f_(l) for l in range(M + 1)]
    H = hamiltonian(V, mechanics, hbar=hbar)
    K = operator(f, mechanics, hbar=hbar)
    B = bracket(H, K)
    return [B.coeff(l) for l in range(M + 2)]


# ---------------------------------------------------------------------------
# potential descriptions
# ---------------------------------------------------------------------------

@dataclass
class PotentialSpec:
    """What the potential must satisfy.

    ``variant`` is "closed" (``expr`` is V), "ode" (``expr = 0`` in the
    unknown ``unknown``, of the given ``order``) or "algebraic" (``expr = 0``
    polynomial in V and x).  For ``unknown == "u"`` the potential is u'.
    """

    variant: str
    expr: Expr
    unknown: str = "V"
    order: int = 0
    first_integrals: list = field(default_factory=list)
    parameters: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    aux: list = field(default_factory=list)  # rules defining special functions in expr

    @property
    def top(self):
        return fn_gen(self.unknown, self.order)

    def potential(self) -> Expr:
        if self.variant == "closed":
            return self.expr
        return fn(self.unknown, 1 if self.unknown == "u" else 0)

    def rules(self) -> list[RewriteRule]:
        """Rewrite rules usable by reduce_mod (ODE solved for its top derivative)."""
        if self.variant != "ode":
            return []
        try:
            return [RewriteRule.solve_for(self.expr, self.top)]
        except (ValueError, ZeroDivisionError):
            return []

    def parameter_rules(self) -> list[RewriteRule]:
        """Rules from parameter constraints such as eps**2 - 1 = 0."""
        out = []
        for c in self.constraints:
            g = max((g for g in c.gens() if g[0] == 2), key=lambda g: c.degree(g))
            d = c.degree(g)
            lead = c.coeff(g, d)
            out.append(RewriteRule(g, -(c - lead * Expr.gen(g, d)) / lead, degree=d))
        return out

    def normal_form(self, e: Expr) -> Expr:
        """Equivalent expression with the condition used where that is an
        identity (closed forms, rules solved for the top derivative); other
        conditions are left alone since pseudo-reduction rescales."""
        if self.constraints or self.aux:
            e = reduce_mod(e, self.parameter_rules() + self.aux)
        if self.variant == "ode" and self.rules():
            return reduce_mod(e, self.rules())
        return e

    def reduce(self, e: Expr) -> Expr:
        """Normal form of e on solutions of the condition (up to a nonzero
        factor when the top derivative has a non-monomial coefficient)."""
        if self.constraints or self.aux:
            e = reduce_mod(e, self.parameter_rules() + self.aux)
        if self.variant == "closed" or self.expr.is_zero():
            return e
        if self.variant == "algebraic":
            return _reduce_algebraic(e, self.expr, self.unknown)
        rules = self.rules()
        if rules:
            return reduce_mod(e, rules)
        return pseudo_reduce(e, self.expr, self.top)

    def to_json(self) -> dict:
        return {"variant": self.variant, "unknown": self.unknown, "order": self.order,
                "expr": to_json(self.expr), "first_integrals": [to_json(e) for e in self.first_integrals],
                "parameters": list(self.parameters), "constraints": [to_json(e) for e in self.constraints],
                "aux": [rule_to_json(r) for r in self.aux]}

    @staticmethod
    def from_json(data: dict) -> "PotentialSpec":
        return PotentialSpec(data["variant"], from_json(data["expr"]), data["unknown"], data["order"],
                             [from_json(e) for e in data["first_integrals"]], list(data["parameters"]),
                             [from_json(e) for e in data["constraints"]],
                             [rule_from_json(r) for r in data.get("aux", [])])

    def text(self) -> str:
        if self.variant == "closed":
            return f"V = {to_text(self.expr)}"
        return f"{to_text(self.expr)} = 0"


def _reduce_algebraic(e: Expr, rel: Expr, name: str) -> Expr:
    """Reduce modulo F(V, x) = 0: derivatives of V go through the implicit
    derivative V' F_V + F_x = 0, then e is pseudo-divided by F in V."""
    g0 = fn_gen(name, 0)
    if e.max_order(name) >= 1:
        eq1 = fn(name, 1) * partial(rel, g0) + partial(rel, (3, "x"))
        e = pseudo_reduce(e, eq1, fn_gen(name, 1))
    return pseudo_remainder(e, rel, g0)


@dataclass
class SolvedPair:
    mechanics: str
    M: int
    relation: AlgebraRelation
    f: list
    potential: PotentialSpec
    branch: str = "principal"
    notes: list = field(default_factory=list)
    hbar: Expr = HBAR

    def K(self):
        """K with the potential substituted where it is closed form."""
        f = self.f
        if self.potential.variant == "closed":
            f = [substitute(c, {"V": self.potential.expr}) for c in f]
        elif self.potential.unknown == "u":
            f = [substitute(c, {"V": fn("u", 1)}) for c in f]
        return operator(f, self.mechanics, hbar=self.hbar)

    def H(self):
        return hamiltonian(self.potential.potential(), self.mechanics, hbar=self.hbar)

    def residual(self):
        res = check_relation(self.H(), self.K(), self.relation)
        return res.map(self.potential.reduce)

    def to_json(self) -> dict:
        return {"mechanics": self.mechanics, "M": self.M, "relation": self.relation.to_json(),
                "branch": self.branch, "f": [to_json(c) for c in self.f],
                "potential": self.potential.to_json(), "notes": list(self.notes)}

    @staticmethod
    def from_json(data: dict) -> "SolvedPair":
        return SolvedPair(data["mechanics"], data["M"], AlgebraRelation.from_json(data["relation"]),
                          [from_json(c) for c in data["f"]], PotentialSpec.from_json(data["potential"]),
                          data["branch"], list(data["notes"]))

    def text(self) -> str:
        lines = [f"{self.mechanics} order {self.M} type {self.relation.kind.letter} [{self.branch}]"]
        for l in range(self.M, -1, -1):
            lines.append(f"  f_{l} = {to_text(self.f[l])}")
        lines.append(f"  potential: {self.potential.text()}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

def _to_u(e: Expr) -> Expr:
    return substitute(e, {"V": fn("u", 1)})


def _integrate(p: Expr, state: dict) -> Expr:
    """Antiderivative in x of a differential polynomial in V (or u)."""
    name = state["unknown"]
    try:
        return antiderivative(p, name)
    except NotExact:
        if name == "u":
            raise NotClosedUnderQuadrature(f"no antiderivative for {to_text(p)}")
    # switch to u = int V
    pu = _to_u(p)
    try:
        q = antiderivative(pu, "u")
    except NotExact as exc:
        raise NotClosedUnderQuadrature(f"no antiderivative for {to_text(p)}") from exc
    state["unknown"] = "u"
    return q


def _descend(sys: DeterminingSystem, keep_constants: bool = False):
    """Solve E_M..E_1 for f_{M-1}..f_0 (E_1 only for non-ladder types).

    Returns (f list, remaining condition, state)."""
    M = sys.M
    kind = sys.kind.kind
    ladder = kind in (Kind.LADDER_LOWER, Kind.LADDER_RAISE)
    f: list = [None] * (M + 1)
    f[M] = ONE
    state = {"unknown": "V"}
    gen_names = [f"f{l}" for l in range(M + 1)]

    def current(e: Expr) -> Expr:
        binds = {n: c for n, c in zip(gen_names, f) if c is not None}
        out = substitute(e, binds)
        if state["unknown"] == "u":
            out = _to_u(out)
        return out

    consts = []
    for l in range(M, 0, -1):
        E = current(sys.constraints[l])
        target = fn_gen(f"f{l - 1}", 1)
        if ladder and l == 1:
            break
        try:
            rule = RewriteRule.solve_for(E, target)
        except ValueError:
            raise NotClosedUnderQuadrature(f"E_{l} is not linear in f_{l-1}'")
        dfl = rule.replacement
        if any(g[0] == 4 and g[1].startswith("f") for g in dfl.gens()):
            raise NotClosedUnderQuadrature(f"E_{l} still involves unknown coefficients")
        val = _integrate(dfl, state)
        if state["unknown"] == "u":
            f = [None if c is None else _to_u(c) for c in f]
        keep = (l - 1 == M - 1 and not ladder and not (kind is Kind.CONFORMAL and M == 2))
        if keep:
            val = val + BETA
        elif keep_constants:
            name = f"k{len(consts) + 1}"
            consts.append(name)
            val = val + sym(name)
        f[l - 1] = val
    if ladder:
        # E_1 gives f_0' = P_1; E_0 gives f_0 algebraically (coefficient alpha)
        E1 = current(sys.constraints[1])
        P1 = RewriteRule.solve_for(E1, fn_gen("f0", 1)).replacement
        binds = {n: c for n, c in zip(gen_names[1:], f[1:])}
        E0 = substitute(sys.constraints[0], binds)
        if state["unknown"] == "u":
            E0 = _to_u(E0)
        E0 = substitute(E0, {fn_gen("f0", 2): differentiate(P1, "x")})
        f0 = RewriteRule.solve_for(E0, fn_gen("f0", 0)).replacement
        f[0] = f0
        cond = differentiate(f0, "x") - P1
        return f, cond, state, consts
    E0 = current(sys.constraints[0])
    return f, E0, state, consts


def _content_split(e: Expr) -> tuple[Expr, Expr]:
    """(single-term content, primitive part); the content absorbs the
    rational factor of the leading term and a common factor of i."""
    c = e.content()
    lt = e.leading_term()
    c = c * Expr.num(list(lt.terms.values())[0])
    if all(any(g[0] == 0 for g, _ in m) for m in e.terms):
        c = c * I
    return c, e / c


def _normalize_condition(cond: Expr, unknown: str) -> Expr:
    """Monic in the top derivative when its coefficient is a single term,
    otherwise primitive."""
    if cond.is_zero():
        return cond
    top = cond.max_order(unknown)
    if top < 0:
        return _content_split(cond)[1]
    poly = cond.as_poly(fn_gen(unknown, top))
    lead = poly[max(poly)]
    if lead.is_single_term() and lead.free_of(lambda g: g[0] == 4):
        return cond / lead
    return _content_split(cond)[1]


_FACTORS = (1, -1, 2, -2, 3, -3)


def _lower_order(cond: Expr, unknown: str, keep_exact: bool, constants: list, stop=None) -> Expr:
    """Integrate the condition while it, or an x**k multiple of it, is exact.

    A constant from a plain antiderivative corresponds to a shift of x or
    of the potential and is dropped unless ``keep_exact``; a constant
    produced after an integrating factor is a genuine parameter and is
    always kept (named k1, k2, ... in ``constants``)."""
    while not cond.is_zero() and cond.max_order(unknown) >= 1:
        if stop is not None and stop(cond):
            break
        prim = _content_split(cond)[1]
        try:
            q = antiderivative(prim, unknown)
            keep = keep_exact
        except NotExact:
            for k in _FACTORS:
                try:
                    q = antiderivative(prim * X ** k, unknown)
                    break
                except NotExact:
                    continue
            else:
                break
            keep = True
        if keep:
            name = f"k{len(constants) + 1}"
            constants.append(name)
            q = q + sym(name)
        cond = q
    return cond


def _algebraic_first_integral(cond: Expr, max_degree: int = 3) -> Expr | None:
    """Polynomial F(x, V) constant on solutions of P V' + Q = 0, if one of
    total degree <= max_degree exists.  Found by linear algebra on an ansatz."""
    import sympy

    from .symkernel import from_sympy, to_sympy

    g1 = fn_gen("V", 1)
    poly = cond.as_poly(g1)
    if set(poly) - {0, 1} or 1 not in poly or cond.max_order("V") != 1:
        return None
    P, Q = poly[1], poly.get(0, ZERO)
    if any(k < 0 for m in cond.terms for _, k in m if not isinstance(k, int) or k < 0):
        return None
    if any(not isinstance(k, int) or k < 0 for k in P.as_poly((3, "x"))) or \
            any(not isinstance(k, int) or k < 0 for k in Q.as_poly((3, "x"))):
        return None
    monos = [(i, j) for i in range(max_degree + 1) for j in range(max_degree + 1) if 0 < i + j <= max_degree]
    coef = sympy.symbols(f"a0:{len(monos)}")
    xs, vs = sympy.Symbol("x"), sympy.Symbol("V_")
    F = sum(c * xs ** i * vs ** j for c, (i, j) in zip(coef, monos))
    Ps = to_sympy(P).subs(sympy.Symbol("V"), vs)
    Qs = to_sympy(Q).subs(sympy.Symbol("V"), vs)
    expr = sympy.expand(sympy.diff(F, xs) * Ps - sympy.diff(F, vs) * Qs)
    eqs = sympy.Poly(expr, xs, vs).coeffs()
    A, _ = sympy.linear_eq_to_matrix(eqs, coef)
    null = A.nullspace()
    if not null:
        return None
    # lowest-degree element of the kernel
    vec = min(null, key=lambda v: max(sum(monos[i]) for i, c in enumerate(v) if c != 0))
    Fs = sympy.expand(sum(sympy.simplify(c) * xs ** i * vs ** j for c, (i, j) in zip(vec, monos)))
    Fs = sympy.expand(sympy.cancel(Fs * sympy.denom(sympy.together(Fs))))
    return from_sympy(Fs.subs(vs, sympy.Symbol("V")), functions=("V",))


def _potential_spec(cond: Expr, unknown: str, notes: list, keep_exact: bool,
                    hom_name: str = "gamma") -> PotentialSpec:
    constants: list = []
    raw = cond
    cond = _normalize_condition(cond, unknown)
    if cond.is_zero():
        notes.append("no condition on the potential")
        return PotentialSpec("ode", cond, unknown, -1)
    if cond.max_order(unknown) < 0:
        return PotentialSpec("inconsistent", cond, unknown, -1)
    if cond == fn(unknown, 1) and unknown == "V":
        notes.append("constant potential")
        return PotentialSpec("closed", sym("c"), parameters=["c"])
    closed = _closed_form(cond, unknown, notes, hom_name)
    if closed is not None:
        return closed
    recognized = lambda e: _closed_form(_normalize_condition(e, unknown), unknown, [], hom_name) is not None
    cond = _normalize_condition(_lower_order(raw, unknown, keep_exact, constants, recognized), unknown)
    order = cond.max_order(unknown)
    closed = _closed_form(cond, unknown, notes, hom_name)
    if closed is not None:
        closed.parameters.extend(constants)
        return closed
    if order == 0:
        return PotentialSpec("algebraic", cond, unknown, 0, parameters=constants)
    if unknown == "V" and order == 1:
        F = _algebraic_first_integral(cond)
        if F is not None:
            notes.append(f"first-order condition {to_text(cond)} = 0 integrated to an algebraic relation")
            return PotentialSpec("algebraic", _content_split(F)[1] - sym("c"), "V", 0,
                                 first_integrals=[cond], parameters=constants + ["c"])
    return PotentialSpec("ode", cond, unknown, order, parameters=constants)


def _closed_form(cond: Expr, unknown: str, notes: list, hom_name: str = "gamma") -> PotentialSpec | None:
    """Recognize conditions with an elementary solution."""
    xg = (3, "x")
    if unknown != "V":
        return None
    order = cond.max_order("V")
    g0 = fn_gen("V", 0)
    if order == 0:
        poly = cond.as_poly(g0)
        if set(poly) <= {0, 1} and 1 in poly and poly[1].is_single_term():
            return PotentialSpec("closed", -poly.get(0, ZERO) / poly[1])
        n = max(poly)
        if set(poly) == {0, n} and isinstance(n, int) and n > 1 and all(c.is_single_term() for c in poly.values()):
            root = (-poly[0] / poly[n]) ** Fraction(1, n)
            if n % 2:
                return PotentialSpec("closed", root)
            eps = sym("eps")
            return PotentialSpec("closed", eps * root, parameters=["eps"], constraints=[eps ** 2 - 1])
        if cond.free_of(lambda g: g[0] == 3):
            notes.append("constant potential")
            return PotentialSpec("closed", sym("c"), parameters=["c"])
        return None
    if order != 1:
        return None
    # Euler form a*x*V' + b*V = L(x), a and b constants
    p1 = cond.as_poly(fn_gen("V", 1))
    if set(p1) != {0, 1} and set(p1) != {1}:
        return None
    A = p1[1]
    if not A.is_single_term() or not A.free_of(lambda g: g[0] == 4):
        return None
    scaled = cond * X / A if A.degree(xg) != 1 else cond
    A = scaled.as_poly(fn_gen("V", 1))[1]
    pv = scaled.as_poly(fn_gen("V", 1)).get(0, ZERO).as_poly(g0)
    if set(pv) - {0, 1} or 1 not in pv:
        return None
    a = A / X
    b = pv[1]
    if not a.free_of(lambda g: g[0] in (3, 4)) or not b.free_of(lambda g: g[0] in (3, 4)):
        return None
    try:
        r = (b / a).as_rational()
    except (ValueError, ZeroDivisionError):
        return None
    L = -pv.get(0, ZERO)
    part = ZERO
    for k, ck in L.as_poly(xg).items():
        denom = a * k + b
        if denom.is_zero():
            return None
        part = part + ck / denom * X ** k
    if r == 0:
        notes.append("constant homogeneous term dropped (shift of H)")
        return PotentialSpec("closed", part)
    return PotentialSpec("closed", part + sym(hom_name) * X ** (-r), parameters=[hom_name])


def solve_all(sys: DeterminingSystem, keep_constants: bool = False,
              condition_constants: bool = False) -> list[SolvedPair]:
    """All solution branches: the principal one first, then the branches
    where the free constant beta of f_{M-1} vanishes."""
    pairs = []
    f, cond, state, consts = _descend(sys, keep_constants=keep_constants)
    pairs.append(_finish(sys, f, cond, state["unknown"], "principal", condition_constants))
    beta_in = any(BETA.gens() <= c.gens() for c in [cond] + f if not c.is_zero())
    if beta_in:
        f0 = [substitute(c, {BETA.leading_term().gens().pop(): ZERO}) for c in f]
        c0 = substitute(cond, {BETA.leading_term().gens().pop(): ZERO})
        alt = _finish(sys, f0, c0, state["unknown"], "beta=0", condition_constants)
        if alt.potential.variant != "inconsistent" and \
                (alt.potential.text() != pairs[0].potential.text()):
            pairs.append(alt)
    return pairs


def solve(sys: DeterminingSystem, keep_constants: bool = False, condition_constants: bool = False) -> SolvedPair:
    """Principal solution branch."""
    return solve_all(sys, keep_constants, condition_constants)[0]


def _finish(sys, f, cond, unknown, branch, condition_constants) -> SolvedPair:
    notes: list = []
    used = set().union(*(c.gens() for c in f))
    hom_name = "gamma" if (2, "beta") in used else "beta"
    spec = _potential_spec(cond, unknown, notes, condition_constants, hom_name)
    if spec.variant == "ode" and spec.order < 0:
        notes.append("K is a polynomial in H")
    return SolvedPair(sys.mechanics, sys.M, sys.kind, f, spec, branch=branch, notes=notes, hbar=sys.hbar)


# ---------------------------------------------------------------------------
# ladder product
# ---------------------------------------------------------------------------

def ladder_product(pair: SolvedPair) -> list[Expr]:
    """Coefficients a_0..a_n with K^dagger K = sum a_n H**n for a type (d) pair.

    Quantum: K^dagger is the formal adjoint.  Classical: the partner ladder
    is the complex conjugate of K.  Powers of D (or p) are removed from the
    top: the leading term c D^{2k} is matched by a H^k with
    a = c / (-hbar^2/2)^k (or c / (1/2)^k).  For ODE-defined potentials a
    coefficient need not be an explicit constant; it is accepted when its
    derivative vanishes modulo the potential condition, i.e. when it is a
    first integral."""
    H = pair.H()
    K = pair.K()
    quantum = pair.mechanics == "quantum"
    partner = K.adjoint() if quantum else K.conjugate()
    nf = pair.potential.normal_form
    R = partner.compose(K).map(nf)
    unit = -pair.hbar ** 2 / 2 if quantum else Expr.num(Fraction(1, 2))
    n = R.order // 2
    coeffs = [ZERO] * (n + 1)
    powers = [type(K).scalar(ONE)]
    for _ in range(n):
        powers.append(powers[-1].compose(H).map(nf))
    for k in range(n, -1, -1):
        if R.order > 2 * k:
            raise NotReducible(f"odd leading order {R.order} left: {R}")
        a = nf(R.coeff(2 * k) / unit ** k)
        if not a.free_of(lambda g: g[0] in (3, 4)):
            if not pair.potential.reduce(differentiate(a, "x")).is_zero():
                raise NotReducible(f"coefficient of H^{k} is not constant: {to_text(a)}")
        coeffs[k] = a
        R = (R - powers[k] * a).map(nf)
    if not R.map(pair.potential.reduce).is_zero():
        raise NotReducible(f"remainder {R}")
    return coeffs
