"""Numeric verification for potentials known only through an ODE.

The integrator carries a prolonged jet: besides the state of the defining
ODE it integrates as many further derivatives as the operators need, so
the carried jet is consistent with the ODE only to the integration
tolerance.  Commutator residuals evaluated on that jet therefore measure
the integration error rather than rounding.

hbar and alpha default to 1; every report records the full parameter point.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

from .detsys import PotentialSpec
from .opalg import AlgebraRelation, DiffOp, PhasePoly, check_relation
from .symkernel import Expr, differentiate, fn, fn_gen, substitute, sym_gen

DEFAULT_PARAMS = {"hbar": 1, "alpha": 1}
DEFAULT_WINDOW = (-1.0, 1.0)
DEFAULT_TOL = 1e-10
BLOWUP = 1e8


class SingularityInWindow(RuntimeError):
    def __init__(self, pole: float, reached: float, window):
        super().__init__(f"solution blows up near x = {pole:.6g} (reached {reached:.6g}) "
                         f"inside window {tuple(window)}; choose a smaller window")
        self.pole = pole
        self.reached = reached
        self.window = tuple(window)


class JetOrderInsufficient(ValueError):
    pass


# ---------------------------------------------------------------------------
# compiling expressions
# ---------------------------------------------------------------------------

def _number(c: Fraction) -> str:
    return repr(float(c)) if c.denominator != 1 else str(c.numerator)


def _gen_source(g, names: dict) -> str:
    if g[0] == 0:
        return "1j"
    if g[0] == 1:
        return repr(float(g[1]))
    if g in names:
        return names[g]
    raise KeyError(f"no numeric value for {g}")


def compile_expr(e: Expr, names: dict):
    """Python callable of the arguments named in ``names`` (gen -> identifier)."""
    args = sorted(set(names.values()))
    parts = []
    for m, c in e.terms.items():
        factors = [_number(c)]
        for g, k in m:
            base = _gen_source(g, names)
            factors.append(base if k == 1 else f"{base}**({_number(Fraction(k))})")
        parts.append("*".join(factors))
    body = " + ".join(parts) or "0"
    return eval(f"lambda {', '.join(args)}: {body}", {})


def parameter_point(params: dict | None = None) -> dict:
    """Parameter values with the defaults filled in; alpha1 and alpha2
    follow alpha unless given."""
    out = dict(DEFAULT_PARAMS)
    out.update(params or {})
    for a in ("alpha1", "alpha2"):
        out.setdefault(a, out["alpha"])
    return out


def _exact(v) -> Expr:
    if isinstance(v, complex):
        raise ValueError("complex parameter values are not supported")
    return Expr.num(Fraction(str(v)) if isinstance(v, float) else Fraction(v))


def bind(e: Expr, params: dict) -> Expr:
    hits = {sym_gen(k): _exact(v) for k, v in params.items()}
    return substitute(e, hits)


def _free_parameters(e: Expr) -> set:
    return {g[1] for g in e.gens() if g[0] == 2}


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

@dataclass
class _Problem:
    """The ODE being integrated, solved for its top derivative."""

    unknown: str
    order: int
    eq: Expr
    lead: Expr
    potential: Expr  # V in terms of the unknown's jet

    def rest(self, k: int) -> Expr:
        """k-th derivative of the ODE minus lead * unknown^(order + k)."""
        return _rest(self, k)

    def top(self, k: int):
        return _compiled_rest(self, k)

    def names(self, upto: int) -> dict:
        names = {(3, "x"): "x"}
        for j in range(upto + 1):
            names[fn_gen(self.unknown, j)] = f"t{j}"
        return names

    def __hash__(self):
        return hash((self.unknown, self.order, self.eq, self.potential))


@lru_cache(maxsize=64)
def _rest(p: _Problem, k: int) -> Expr:
    e = p.eq
    for _ in range(k):
        e = differentiate(e)
    top = fn(p.unknown, p.order + k)
    rest = e - p.lead * top
    if rest.max_order(p.unknown) >= p.order + k:
        raise JetOrderInsufficient(f"ODE is not linear in {p.unknown}^({p.order + k})")
    return rest


@lru_cache(maxsize=64)
def _compiled_rest(p: _Problem, k: int):
    """(x, t0..t_{order+k-1}) -> unknown^(order+k)."""
    names = p.names(p.order + k - 1)
    rest = compile_expr(p.rest(k), names)
    lead = compile_expr(p.lead, names)
    args = sorted(set(names.values()), key=_arg_key)

    def f(*vals):
        kw = dict(zip(args, vals))
        return -rest(**kw) / lead(**kw)
    return f


def _arg_key(s: str):
    return (0, 0) if s == "x" else (1, int(s[1:]))


def _problem(spec: PotentialSpec, params: dict) -> _Problem:
    if spec.variant == "ode":
        eq, unknown, order = spec.expr, spec.unknown, spec.order
        potential = spec.potential()
    elif spec.variant == "closed" and spec.aux:
        rule = next(r for r in spec.aux if r.degree == 1 and r.target[0] == 4)
        _, unknown, order, _ = rule.target
        eq = fn(unknown, order) - rule.replacement
        potential = spec.expr
    else:
        raise ValueError("integrate_jet needs a potential defined by an ODE")
    eq, potential = bind(eq, params), bind(potential, params)
    free = (_free_parameters(eq) | _free_parameters(potential)) - set(params)
    if free:
        raise ValueError(f"no value for parameters {sorted(free)}")
    poly = eq.as_poly(fn_gen(unknown, order))
    if set(poly) - {0, 1} or 1 not in poly:
        raise JetOrderInsufficient(f"ODE is not linear in its top derivative {unknown}^({order})")
    return _Problem(unknown, order, eq, poly[1], potential)


@dataclass
class JetSolution:
    """Integrated jet on a uniform grid.

    ``state[:, j]`` is the j-th derivative of ``unknown`` for j <= ``carry``
    (all of them integrated); higher ones come from the solved ODE on demand.
    """

    x: np.ndarray
    state: np.ndarray
    problem: _Problem
    params: dict
    init: tuple
    window: tuple
    tol: float
    h: float
    pole: float | None = None
    steps: int = 0
    notes: list = field(default_factory=list)

    @property
    def unknown(self) -> str:
        return self.problem.unknown

    @property
    def carry(self) -> int:
        return self.state.shape[1] - 1

    @property
    def potential_order(self) -> int:
        """Highest derivative of the unknown inside V."""
        return max(self.problem.potential.max_order(self.unknown), 0)

    @property
    def carried_v_order(self) -> int:
        return self.carry - self.potential_order

    def derivatives(self, upto: int, extend: bool = True) -> np.ndarray:
        """Columns 0..upto of the unknown's jet."""
        cols = [self.state[:, j] for j in range(min(upto, self.carry) + 1)]
        for j in range(self.carry + 1, upto + 1):
            if not extend:
                raise JetOrderInsufficient(f"jet carries {self.unknown} up to order {self.carry}, need {upto}")
            k = j - self.problem.order
            cols.append(self.problem.top(k)(self.x, *cols[:j]))
        return np.stack(cols, axis=1)

    def potential_jet(self, upto: int, extend: bool = False) -> np.ndarray:
        """V, V', ..., V^(upto) at the nodes (columns)."""
        if self.problem.potential == fn(self.unknown):
            return self.derivatives(upto, extend)
        need = upto + self.potential_order
        if need > self.carry and not extend:
            raise JetOrderInsufficient(f"V^({upto}) needs {self.unknown}^({need}); jet carries {self.carry}")
        d = self.derivatives(need, extend)
        names = self.problem.names(need)
        env = {"x": self.x, **{f"t{j}": d[:, j] for j in range(need + 1)}}
        cols, e = [], self.problem.potential
        for _ in range(upto + 1):
            f = compile_expr(e, {g: n for g, n in names.items() if g in e.gens() or n == "x"})
            used = _args_of(f)
            cols.append(np.broadcast_to(f(**{a: env[a] for a in used}), self.x.shape).astype(complex))
            e = differentiate(e)
        out = np.stack(cols, axis=1)
        return out.real if not np.iscomplexobj(self.state) and np.allclose(out.imag, 0) else out

    def ode_residual(self) -> float:
        """Max |ODE| at the nodes using carried derivatives, relative to the
        size of its largest term."""
        p = self.problem
        if self.carry < p.order:
            return 0.0
        d = self.derivatives(p.order)
        names = p.names(p.order)
        env = {"x": self.x, **{f"t{j}": d[:, j] for j in range(p.order + 1)}}
        total = np.zeros(self.x.shape, dtype=complex)
        scale = np.zeros(self.x.shape)
        for m, c in p.eq.terms.items():
            term = Expr({m: c})
            f = compile_expr(term, names)
            v = np.broadcast_to(f(**{a: env[a] for a in _args_of(f)}), self.x.shape)
            total = total + v
            scale = np.maximum(scale, np.abs(v))
        return float(np.max(np.abs(total) / np.maximum(scale, 1.0)))

    def consistency(self) -> float:
        """Max gap between the carried V' and a fourth-order central
        difference of V (interior nodes)."""
        v = self.potential_jet(1, extend=True)
        V, dV = v[:, 0], v[:, 1]
        if len(V) < 5:
            return 0.0
        fd = (V[:-4] - 8 * V[1:-3] + 8 * V[3:-1] - V[4:]) / (12 * self.h)
        return float(np.max(np.abs(fd - dV[2:-2])))

    def env(self, v_order: int, extend: bool = False) -> dict:
        """Values keyed like evaluate(): "x" and ("V", k)."""
        v = self.potential_jet(v_order, extend)
        out = {"x": self.x}
        for k in range(v_order + 1):
            out[("V", k)] = v[:, k]
        return out

    def to_json(self) -> dict:
        return {"unknown": self.unknown, "order": self.problem.order, "carry": self.carry,
                "params": {k: str(v) for k, v in self.params.items()},
                "init": [self.init[0], [str(v) for v in self.init[1]]],
                "window": list(self.window), "tol": self.tol, "h": self.h, "nodes": len(self.x),
                "steps": self.steps, "pole": self.pole, "ode_residual": self.ode_residual(),
                "notes": list(self.notes)}

    def dump_csv(self, path: str | Path, v_order: int = 2) -> None:
        v = self.potential_jet(min(v_order, self.carried_v_order), extend=False)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x"] + [f"V{k}" for k in range(v.shape[1])])
            for xi, row in zip(self.x, v):
                w.writerow([repr(float(xi))] + [repr(complex(r)) if np.iscomplexobj(v) else repr(float(r)) for r in row])


def _args_of(f) -> list:
    return list(f.__code__.co_varnames[:f.__code__.co_argcount])


def default_init(problem_order: int, window) -> tuple:
    """Documented fixture: start at the window centre with unknown = -1/4
    and its derivatives zero."""
    x0 = 0.5 * (window[0] + window[1])
    return x0, [-0.25] + [0.0] * (problem_order - 1)


def _full_state(p: _Problem, x0: float, base, carry: int) -> list:
    vals = list(base)
    for j in range(p.order, carry + 1):
        vals.append(p.top(j - p.order)(x0, *vals))
    return vals


def integrate_jet(spec: PotentialSpec, params: dict | None = None, init: tuple | None = None,
                  window=DEFAULT_WINDOW, tol: float = DEFAULT_TOL, h: float | None = None,
                  carry_v: int | None = None, on_pole: str = "raise") -> JetSolution:
    """Integrate the ODE defining ``spec`` over ``window``.

    ``init = (x0, [u(x0), ..., u^(r-1)(x0)])`` for the ODE's unknown u.
    ``carry_v`` is the highest V-derivative integrated as part of the state
    (default: just the ODE state).  On blow-up (|jet| > 1e8 or step-size
    underflow) raises SingularityInWindow, or with ``on_pole="shrink"``
    returns the part of the window short of the estimated pole.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    params = parameter_point(params)
    p = _problem(spec, params)
    a, b = map(float, window)
    if not a < b:
        raise ValueError("window must be increasing")
    h = h or (b - a) / 400
    x0, base = init or default_init(p.order, (a, b))
    if len(base) != p.order:
        raise ValueError(f"init needs {p.order} values for {p.unknown}")
    pot_order = max(p.potential.max_order(p.unknown), 0)
    carry = max(p.order - 1, (carry_v + pot_order) if carry_v is not None else -1)
    y0 = np.array(_full_state(p, x0, base, carry), dtype=complex if any(isinstance(v, complex) for v in base) else float)
    top = p.top(max(carry + 1 - p.order, 0))

    def rhs(x, y):
        return np.append(y[1:], top(x, *y))

    def blowup(x, y):
        return BLOWUP - np.max(np.abs(y))
    blowup.terminal = True

    n = int(round((b - a) / h))
    grid = np.linspace(a, b, n + 1)
    pieces, steps, pole = [], 0, None
    for end, sel in ((b, grid >= x0), (a, grid < x0)):
        pts = grid[sel]
        if end == a:
            pts = pts[::-1]
        if len(pts) == 0 or end == x0:
            continue
        sol = solve_ivp(rhs, (x0, end), y0, method="DOP853", t_eval=pts, rtol=tol, atol=tol * 1e-2)
        steps += sol.nfev
        ok = sol.status == 0
        if not ok:
            last = sol.t_events[0][0] if sol.status == 1 and len(sol.t_events[0]) else sol.t[-1] if len(sol.t) else x0
            yl = sol.y_events[0][0] if sol.status == 1 and len(sol.y_events[0]) else sol.y[:, -1]
            est = float(np.real(last + (yl[0] / yl[1] if len(yl) > 1 and yl[1] != 0 else 0)))
            if on_pole != "shrink":
                raise SingularityInWindow(est, float(last), (a, b))
            pole = est
            keep = np.abs(sol.t - x0) < 0.9 * abs(last - x0)
            sol.t, sol.y = sol.t[keep], sol.y[:, keep]
        t, y = sol.t, sol.y.T
        if end == a:
            t, y = t[::-1], y[::-1]
        pieces.append((t, y))
    pieces.sort(key=lambda ty: ty[0][0] if len(ty[0]) else np.inf)
    x = np.concatenate([t for t, _ in pieces])
    state = np.concatenate([y for _, y in pieces])
    notes = []
    if pole is not None:
        notes.append(f"window shrunk to [{x[0]:.6g}, {x[-1]:.6g}] short of a pole near {pole:.6g}")
    return JetSolution(x, state, p, params, (x0, list(base)), (float(x[0]), float(x[-1])), tol, h,
                       pole, steps, notes)


# ---------------------------------------------------------------------------
# test functions and residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """poly(x) * exp(-(x - x0)^2); derivatives are exact."""

    __test__ = False  # not a pytest class

    coeffs: tuple = (1.0,)
    x0: float = 0.0

    def derivative(self, x: np.ndarray, k: int) -> np.ndarray:
        q = Polynomial(self.coeffs)
        s = Polynomial([-self.x0, 1.0])
        for _ in range(k):
            q = q.deriv() - 2 * s * q
        return q(x) * np.exp(-(x - self.x0) ** 2)

    @staticmethod
    def triple(x0: float = 0.0) -> list:
        return [TestFunction((1.0,), x0), TestFunction((0.0, 1.0), x0), TestFunction((0.0, 0.0, 1.0), x0)]


def _coeff_values(c: Expr, env: dict, shape) -> np.ndarray:
    names = {}
    for g in c.gens():
        if g[0] == 3:
            names[g] = g[1]
        elif g[0] == 4:
            if g[3] != "x":
                raise ValueError("jet-defined coefficients must depend on x only")
            names[g] = f"{g[1]}{g[2]}"
        elif g[0] == 2:
            raise ValueError(f"no value for parameter {g[1]}")
    f = compile_expr(c, names)
    kw = {}
    for a in _args_of(f):
        if a in ("x", "y"):
            kw[a] = env[a]
        else:
            name = a.rstrip("0123456789")
            kw[a] = env[(name, int(a[len(name):]))]
    return np.broadcast_to(np.asarray(f(**kw), dtype=complex), shape)


def _needed_v_order(op) -> int:
    return max((c.max_order("V") for c in op.terms.values()), default=0)


def quantum_residual(H: DiffOp, K: DiffOp, rel: AlgebraRelation, source=None, psi=None,
                     params: dict | None = None, grid=None, extend: bool = False) -> float:
    """max |([H,K] - rhs) psi| over the grid and the test functions.

    ``source`` is a JetSolution supplying V and its derivatives, or None
    when the coefficients are closed form (then ``grid`` gives the nodes, a
    1D array or an (xs, ys) pair for two-dimensional operators).
    """
    if source is not None:
        params = source.params
    params = parameter_point(params)
    R = check_relation(H, K, rel).map(lambda c: bind(c, params))
    if R.is_zero():
        return 0.0
    if len(R.vars) == 2:
        if source is not None:
            raise ValueError("two-dimensional residuals need closed-form coefficients")
        xs, ys = grid if grid is not None else (np.linspace(-2, 2, 41),) * 2
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        env = {"x": X, "y": Y}
        tests = [(a, b) for a in TestFunction.triple() for b in TestFunction.triple()]
        best = 0.0
        for tx, ty in tests:
            total = np.zeros(X.shape, dtype=complex)
            for (i, j), c in R.terms.items():
                total += _coeff_values(c, env, X.shape) * tx.derivative(X, i) * ty.derivative(Y, j)
            best = max(best, float(np.max(np.abs(total))))
        return best
    if source is not None:
        need = _needed_v_order(R)
        if need > source.carried_v_order and not extend:
            raise JetOrderInsufficient(f"residual needs V^({need}); jet carries V^({source.carried_v_order})")
        env = source.env(need, extend=True)
        x = source.x
    else:
        x = np.asarray(grid if grid is not None else np.linspace(-2, 2, 201), dtype=float)
        env = {"x": x}
    psi = psi or TestFunction.triple(0.5 * (x[0] + x[-1]))
    coeffs = {a[0]: _coeff_values(c, env, x.shape) for a, c in R.terms.items()}
    best = 0.0
    for t in psi:
        total = sum(c * t.derivative(x, k) for k, c in coeffs.items())
        best = max(best, float(np.max(np.abs(total))))
    return best


def phase_values(op: PhasePoly, env: dict, momenta: dict, shape) -> np.ndarray:
    """Evaluate sum c_a(x) p^a at phase points."""
    total = np.zeros(shape, dtype=complex)
    pn = ["px", "py"][:len(op.vars)] if len(op.vars) > 1 else ["px"]
    for a, c in op.terms.items():
        term = _coeff_values(c, env, shape).copy()
        for k, e in zip(pn, a):
            if e:
                term = term * momenta[k] ** e
        total += term
    return total


def classical_residual(H: PhasePoly, K: PhasePoly, rel: AlgebraRelation, source=None,
                       n_points: int = 1000, seed: int = 0, params: dict | None = None,
                       box: float = 2.0, extend: bool = False) -> float:
    """max |{H,K} - rhs| at random phase points.

    Positions are grid nodes of ``source`` (a JetSolution) or uniform in
    [-box, box] (avoiding the origin) for closed forms; momenta are
    uniform in [-box, box].
    """
    if source is not None:
        params = source.params
    params = parameter_point(params)
    R = check_relation(H, K, rel).map(lambda c: bind(c, params))
    if R.is_zero():
        return 0.0
    rng = np.random.default_rng(seed)
    shape = (n_points,)
    if source is not None:
        need = _needed_v_order(R)
        if need > source.carried_v_order and not extend:
            raise JetOrderInsufficient(f"residual needs V^({need}); jet carries V^({source.carried_v_order})")
        idx = rng.integers(0, len(source.x), n_points)
        full = source.env(need, extend=True)
        env = {k: v[idx] for k, v in full.items()}
    else:
        env = {v: _away_from_zero(rng, box, n_points) for v in R.vars}
    momenta = {k: rng.uniform(-box, box, n_points) for k in ("px", "py")}
    return float(np.max(np.abs(phase_values(R, env, momenta, shape))))


def _away_from_zero(rng, box, n):
    return rng.choice([-1.0, 1.0], n) * rng.uniform(0.25, box, n)


# ---------------------------------------------------------------------------
# trajectories and first integrals
# ---------------------------------------------------------------------------

@dataclass
class DriftReport:
    drifts: list
    t_end: float
    tol: float
    starts: list

    @property
    def max_drift(self) -> float:
        return max(self.drifts) if self.drifts else 0.0

    def to_json(self) -> dict:
        return {"max_drift": self.max_drift, "drifts": self.drifts, "t_end": self.t_end,
                "tol": self.tol, "starts": self.starts}


def _phase_callable(op: PhasePoly, params: dict):
    """(q, p) -> value, with every coefficient compiled once."""
    op = op.map(lambda c: bind(c, params))
    names = {(3, v): v for v in op.vars}
    terms = []
    for a, c in op.terms.items():
        if any(g[0] in (2, 4) for g in c.gens()):
            raise ValueError("trajectories need closed-form, fully bound coefficients")
        f = compile_expr(c, {g: n for g, n in names.items() if g in c.gens()})
        terms.append((a, f, _args_of(f)))

    def value(q, p):
        env = dict(zip(op.vars, q))
        total = 0
        for a, f, args in terms:
            term = f(**{k: env[k] for k in args})
            for pk, e in zip(p, a):
                if e:
                    term = term * pk ** e
            total = total + term
        return total
    return value


def trajectory_drift(H: PhasePoly, K: PhasePoly, starts, t_end: float, params: dict | None = None,
                     tol: float = 1e-12) -> DriftReport:
    """Relative drift of K along Hamilton's flow of H from each start
    (q..., p...), for closed-form potentials."""
    params = parameter_point(params)
    n = len(H.vars)
    dHdp = [_phase_callable(H.dp(k), params) for k in range(n)]
    dHdq = [_phase_callable(H.dx(v), params) for v in H.vars]
    Kf = _phase_callable(K, params)

    def rhs(t, s):
        q, p = s[:n], s[n:]
        return np.concatenate([[np.real(f(q, p)) for f in dHdp], [-np.real(f(q, p)) for f in dHdq]])

    drifts = []
    for s0 in starts:
        s0 = np.asarray(s0, dtype=float)
        sol = solve_ivp(rhs, (0.0, t_end), s0, method="DOP853", rtol=tol, atol=tol, dense_output=False)
        if sol.status != 0:
            raise SingularityInWindow(float(sol.t[-1]), float(sol.t[-1]), (0.0, t_end))
        k = np.abs(Kf(sol.y[:n], sol.y[n:]) - Kf(s0[:n, None], s0[n:, None]))
        ref = max(abs(complex(Kf(s0[:n, None], s0[n:, None])[0])), 1e-300)
        drifts.append(float(np.max(k) / ref))
    return DriftReport(drifts, t_end, tol, [list(map(float, s)) for s in starts])


def first_integral_values(jet: JetSolution, F: Expr) -> np.ndarray:
    """F (an Expr in x, V and derivatives, parameters) along the jet."""
    F = bind(F, jet.params)
    need = max(F.max_order("V"), 0)
    return _coeff_values(F, jet.env(need, extend=True), jet.x.shape)


def first_integral_drift(jet: JetSolution, F: Expr) -> float:
    """max |F - F(x0)| / |F(x0)| along the jet (x0 is the initial point)."""
    vals = first_integral_values(jet, F)
    i0 = int(np.argmin(np.abs(jet.x - jet.init[0])))
    ref = abs(vals[i0])
    return float(np.max(np.abs(vals - vals[i0])) / max(ref, 1e-300))


# ---------------------------------------------------------------------------
# catalogue entries
# ---------------------------------------------------------------------------

@dataclass
class NumericReport:
    id: str
    mechanics: str
    params: dict
    window: tuple
    tol: float
    residual: float
    bound: float
    ode_residual: float
    pole: float | None
    via: str = ""
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound

    def to_json(self) -> dict:
        return {"id": self.id, "mechanics": self.mechanics, "via": self.via,
                "params": {k: str(v) for k, v in self.params.items()}, "window": list(self.window),
                "tol": self.tol, "residual": self.residual, "bound": self.bound, "ok": self.ok,
                "ode_residual": self.ode_residual, "pole": self.pole, "notes": list(self.notes)}


def parametrizations(entry) -> dict:
    """Relation checks of ``entry`` that supply an alternative potential."""
    return {c.name: c for c in entry.checks if c.kind == "relation" and "potential" in c.data}


def numcheck(entry, params: dict | None = None, window=DEFAULT_WINDOW, tol: float = DEFAULT_TOL,
             init: tuple | None = None, via: str | None = None, seed: int = 0,
             bound: float = 1e-6, h: float | None = None) -> NumericReport:
    """Integrate the entry's potential (or the parametrization named by
    ``via``) and evaluate the relation residual on the jet."""
    from .opalg import hamiltonian, operator

    pair = entry.pair
    spec, f, rel = pair.potential, pair.f, pair.relation
    if via:
        matches = [c for n, c in parametrizations(entry).items() if n.startswith(via)]
        if not matches:
            raise KeyError(f"{entry.id} has no parametrization {via!r}")
        data = matches[0].data
        spec = PotentialSpec.from_json(data["potential"])
        if "f" in data:
            from .symkernel import from_json

            f = [from_json(c) for c in data["f"]]
    H = hamiltonian(None, pair.mechanics)
    K = operator(f, pair.mechanics)
    if spec.variant == "closed" and not spec.aux:
        params = parameter_point(params)
        grid = np.linspace(window[0], window[1], 201)
        Kc = operator([substitute(c, {"V": spec.expr}) for c in f], pair.mechanics)
        Hc = hamiltonian(spec.expr, pair.mechanics)
        if pair.mechanics == "quantum":
            res = quantum_residual(Hc, Kc, rel, params=params, grid=grid)
        else:
            res = classical_residual(Hc, Kc, rel, params=params, seed=seed, box=max(map(abs, window)))
        return NumericReport(entry.id, pair.mechanics, params, tuple(window), tol, res, bound, 0.0, None, via or "")
    R = check_relation(H, K, rel)
    jet = integrate_jet(spec, params, init, window, tol, h=h, carry_v=_needed_v_order(R))
    if pair.mechanics == "quantum":
        res = quantum_residual(H, K, rel, jet)
    else:
        res = classical_residual(H, K, rel, jet, seed=seed)
    return NumericReport(entry.id, pair.mechanics, jet.params, jet.window, tol, res, bound,
                         jet.ode_residual(), jet.pole, via or "", jet.notes)


def verify_numeric(entry, strict: bool = True):
    """EntryReport for an entry in numeric-jet mode; settings come from
    ``entry.annotations["numeric"]`` (params, window, tol, init, via, bound)."""
    from .catalog import EntryReport, VerificationFailed

    cfg = dict(entry.annotations.get("numeric", {}))
    init = cfg.get("init")
    rep = numcheck(entry, cfg.get("params"), tuple(cfg.get("window", DEFAULT_WINDOW)),
                   cfg.get("tol", DEFAULT_TOL), None if init is None else (init[0], init[1]),
                   cfg.get("via"), bound=cfg.get("bound", 1e-6))
    residual = [] if rep.ok else [f"numeric residual {rep.residual:.3e} > {rep.bound:.1e}"]
    report = EntryReport(entry.id, entry.mode, residual, None, [])
    if strict and not report.ok:
        raise VerificationFailed(report)
    return report
