"""Differential operators, phase-space polynomials and their brackets.

Quantum operators are stored in D-normal form ``sum c_a(x) D^a`` (derivatives
to the right); classical observables as ``sum f_a(x) p^a``.  Both carry a
tuple of space variables, so the same classes serve one and two dimensions.
The momentum view of a quantum operator uses ``p = -i hbar D``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterable, Mapping, Sequence

from .symkernel import (I, ONE, ZERO, Expr, RewriteRule, differentiate, from_json,
                        pseudo_reduce, reduce_mod, sym, to_json, to_text, fn)

HBAR = sym("hbar")


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if not v.is_zero()}


def _add_into(acc: dict, key, val: Expr):
    cur = acc.get(key)
    acc[key] = val if cur is None else cur + val


class _Poly:
    """Shared arithmetic for DiffOp and PhasePoly."""

    mechanics = ""
    __slots__ = ("vars", "terms")

    def __init__(self, terms: Mapping | None = None, vars: Sequence[str] = ("x",)):
        self.vars = tuple(vars)
        self.terms = _clean({tuple(k) if not isinstance(k, int) else (k,): Expr.num(v) if not isinstance(v, Expr) else v
                             for k, v in (terms or {}).items()})

    # construction helpers
    @classmethod
    def from_list(cls, coeffs: Iterable, var: str = "x"):
        return cls({(l,): c for l, c in enumerate(coeffs)}, (var,))

    @classmethod
    def scalar(cls, c, vars: Sequence[str] = ("x",)):
        return cls({(0,) * len(vars): c}, vars)

    def _new(self, terms):
        return type(self)(terms, self.vars)

    def _align(self, other):
        if isinstance(other, (int, Expr)) or hasattr(other, "numerator"):
            return self.scalar(other, self.vars)
        if type(other) is not type(self):
            raise TypeError(f"cannot mix {type(self).__name__} and {type(other).__name__}")
        if other.vars != self.vars:
            raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
        return other

    # views
    @property
    def order(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    @property
    def coeffs(self) -> list:
        """Coefficient list c_0..c_N (one-variable operators only)."""
        if len(self.vars) != 1:
            raise ValueError("coeffs view is one-dimensional")
        return [self.terms.get((l,), ZERO) for l in range(self.order + 1)]

    def coeff(self, *idx) -> Expr:
        return self.terms.get(tuple(idx), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def map(self, f) -> "_Poly":
        return self._new({k: f(v) for k, v in self.terms.items()})

    # arithmetic
    def __add__(self, other):
        other = self._align(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(acc, k, v)
        return self._new(acc)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return self._align(other) - self

    def __mul__(self, other):
        if isinstance(other, _Poly):
            return self.compose(other)
        other = Expr.num(other) if not isinstance(other, Expr) else other
        return self._new({k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, _Poly):
            return other.compose(self)
        other = Expr.num(other) if not isinstance(other, Expr) else other
        # scalars from the left multiply coefficients (they act multiplicatively)
        return self._new({k: other * v for k, v in self.terms.items()})

    def __pow__(self, n: int):
        out = self.scalar(ONE, self.vars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Expr)):
            other = self.scalar(other, self.vars)
        if not isinstance(other, _Poly):
            return NotImplemented
        return type(self) is type(other) and self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        sym_ = "D" if self.mechanics == "quantum" else "p"
        parts = []
        for k in sorted(self.terms, reverse=True):
            mono = "*".join(f"{sym_}{v}^{e}" if e > 1 else f"{sym_}{v}" for v, e in zip(self.vars, k) if e)
            c = to_text(self.terms[k])
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"mechanics": self.mechanics, "vars": list(self.vars), "order": self.order,
                "coeffs": [{"index": list(k), "expr": to_json(v)} for k, v in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data: dict):
        klass = DiffOp if data["mechanics"] == "quantum" else PhasePoly
        return klass({tuple(t["index"]): from_json(t["expr"]) for t in data["coeffs"]}, data["vars"])

    def reduce(self, rules: Sequence[RewriteRule]) -> "_Poly":
        return self.map(lambda c: reduce_mod(c, rules))


class DiffOp(_Poly):
    """Normal-ordered differential operator ``sum c_a D^a``."""

    mechanics = "quantum"
    __slots__ = ()

    def compose(self, other: "DiffOp") -> "DiffOp":
        other = self._align(other)
        acc: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                for gamma, weight in _sub_indices(a):
                    # D^a cb = sum_gamma C(a,gamma) d^(a-gamma) cb D^gamma
                    dcb = cb
                    for v, k in zip(self.vars, (ai - gi for ai, gi in zip(a, gamma))):
                        if k:
                            dcb = differentiate(dcb, v, k)
                    if dcb.is_zero():
                        continue
                    _add_into(acc, tuple(g + bb for g, bb in zip(gamma, b)), ca * dcb * weight)
        return self._new(acc)

    def apply(self, f: Expr) -> Expr:
        """Action on a function written as an Expr."""
        out = ZERO
        for a, c in self.terms.items():
            g = f
            for v, k in zip(self.vars, a):
                if k:
                    g = differentiate(g, v, k)
            out = out + c * g
        return out

    def adjoint(self) -> "DiffOp":
        """Formal L2 adjoint; parameters and unknown functions are real."""
        out = self._new({})
        for a, c in self.terms.items():
            d = self._new({a: ONE})
            sign = -1 if sum(a) % 2 else 1
            out = out + d.compose(self.scalar(c.conjugate(), self.vars)) * sign
        return out

    def momentum_coeffs(self, hbar: Expr = HBAR) -> dict:
        """f_a with ``self = sum f_a p^a``."""
        return {a: c / (-I * hbar) ** sum(a) for a, c in self.terms.items()}

    @classmethod
    def from_momentum(cls, f: Mapping | Sequence, vars: Sequence[str] = ("x",), hbar: Expr = HBAR) -> "DiffOp":
        if not isinstance(f, Mapping):
            f = {(l,): c for l, c in enumerate(f)}
        return cls({tuple(a) if not isinstance(a, int) else (a,): Expr.num(c) * (-I * hbar) ** (sum(a) if not isinstance(a, int) else a)
                    for a, c in f.items()}, vars)

    def to_phase(self, hbar: Expr = HBAR) -> "PhasePoly":
        return PhasePoly(self.momentum_coeffs(hbar), self.vars)


class PhasePoly(_Poly):
    """Classical observable ``sum f_a p^a`` (commutative)."""

    mechanics = "classical"
    __slots__ = ()

    def compose(self, other: "PhasePoly") -> "PhasePoly":
        other = self._align(other)
        acc: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                _add_into(acc, tuple(i + j for i, j in zip(a, b)), ca * cb)
        return self._new(acc)

    def dx(self, v: str) -> "PhasePoly":
        return self.map(lambda c: differentiate(c, v))

    def dp(self, k: int) -> "PhasePoly":
        acc = {}
        for a, c in self.terms.items():
            if a[k]:
                b = list(a)
                b[k] -= 1
                acc[tuple(b)] = c * a[k]
        return self._new(acc)

    def conjugate(self) -> "PhasePoly":
        return self.map(lambda c: c.conjugate())

    def momentum_coeffs(self, hbar: Expr = HBAR) -> dict:
        return dict(self.terms)

    @classmethod
    def from_momentum(cls, f: Mapping | Sequence, vars: Sequence[str] = ("x",), hbar=None) -> "PhasePoly":
        if not isinstance(f, Mapping):
            f = {(l,): c for l, c in enumerate(f)}
        return cls(f, vars)


def _sub_indices(a: tuple):
    """All gamma <= a with the multinomial weight prod C(a_i, gamma_i)."""
    out = [((), 1)]
    for ai in a:
        out = [(g + (k,), w * comb(ai, k)) for g, w in out for k in range(ai + 1)]
    return out


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------

def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b) - b.compose(a)


def anticommutator(a, b):
    return a.compose(b) + b.compose(a)


def adjoint(a: DiffOp) -> DiffOp:
    return a.adjoint()


def poisson(a: PhasePoly, b: PhasePoly) -> PhasePoly:
    """{a, b} = sum_k da/dx_k db/dp_k - da/dp_k db/dx_k."""
    b = a._align(b)
    out = a._new({})
    for k, v in enumerate(a.vars):
        out = out + a.dx(v).compose(b.dp(k)) - a.dp(k).compose(b.dx(v))
    return out


def bracket(a, b):
    """Commutator for quantum operators, Poisson bracket for classical ones."""
    if isinstance(a, DiffOp):
        return commutator(a, b)
    return poisson(a, b)


def momentum(mechanics: str = "quantum", var: str = "x", vars: Sequence[str] | None = None, hbar: Expr = HBAR):
    vars = tuple(vars or (var,))
    idx = tuple(1 if v == var else 0 for v in vars)
    if mechanics == "quantum":
        return DiffOp({idx: -I * hbar}, vars)
    return PhasePoly({idx: ONE}, vars)


def hamiltonian(V: Expr | None = None, mechanics: str = "quantum", var: str = "x",
                vars: Sequence[str] | None = None, hbar: Expr = HBAR):
    """``p**2/2 + V`` on the given axis."""
    vars = tuple(vars or (var,))
    V = fn("V", 0, var) if V is None else Expr.num(V) if not isinstance(V, Expr) else V
    idx = tuple(2 if v == var else 0 for v in vars)
    zero = (0,) * len(vars)
    if mechanics == "quantum":
        return DiffOp({idx: -hbar ** 2 / 2, zero: V}, vars)
    return PhasePoly({idx: Expr.num(1) / 2, zero: V}, vars)


def operator(f: Mapping | Sequence, mechanics: str = "quantum", vars: Sequence[str] = ("x",), hbar: Expr = HBAR):
    """Build K from momentum-form coefficients."""
    cls = DiffOp if mechanics == "quantum" else PhasePoly
    return cls.from_momentum(f, vars, hbar)


# ---------------------------------------------------------------------------
# algebraic relations
# ---------------------------------------------------------------------------

class Kind(str, Enum):
    ABELIAN = "Abelian"
    HEISENBERG = "Heisenberg"
    CONFORMAL = "Conformal"
    LADDER_LOWER = "LadderLower"
    LADDER_RAISE = "LadderRaise"

    @property
    def letter(self) -> str:
        return {"Abelian": "a", "Heisenberg": "b", "Conformal": "c",
                "LadderLower": "d", "LadderRaise": "d"}[self.value]

    @classmethod
    def from_letter(cls, s: str) -> "Kind":
        table = {"a": cls.ABELIAN, "b": cls.HEISENBERG, "c": cls.CONFORMAL, "d": cls.LADDER_LOWER,
                 "d+": cls.LADDER_RAISE, "d-": cls.LADDER_LOWER}
        if s in table:
            return table[s]
        return cls(s)


@dataclass(frozen=True)
class AlgebraRelation:
    """[H, K] = 0, alpha, alpha*H, -alpha*K or +alpha*K.

    Classical ladders carry the extra factor i: {H, K} = -+ i alpha K.
    """

    kind: Kind
    alpha: Expr = sym("alpha1")

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.alpha, Expr):
            object.__setattr__(self, "alpha", Expr.num(self.alpha))
        if self.kind is not Kind.ABELIAN and self.alpha.is_zero():
            raise ValueError("alpha must be nonzero for non-Abelian relations")

    def rhs(self, H, K):
        classical = isinstance(K, PhasePoly)
        k = self.kind
        if k is Kind.ABELIAN:
            return K._new({})
        if k is Kind.HEISENBERG:
            return K.scalar(self.alpha, K.vars)
        if k is Kind.CONFORMAL:
            return H * self.alpha
        factor = self.alpha * (I if classical else ONE)
        return K * (-factor if k is Kind.LADDER_LOWER else factor)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "alpha": to_json(self.alpha)}

    @staticmethod
    def from_json(data: dict) -> "AlgebraRelation":
        return AlgebraRelation(Kind(data["kind"]), from_json(data["alpha"]))


def check_relation(H, K, rel: AlgebraRelation, rules: Sequence[RewriteRule] | None = None,
                   ode: tuple | None = None):
    """bracket(H, K) - rhs, reduced modulo ``rules`` or pseudo-reduced modulo
    ``ode = (equation, top derivative generator)``.  Zero means the relation
    holds."""
    if type(H) is not type(K):
        raise TypeError("H and K must have the same mechanics")
    res = bracket(H, K) - rel.rhs(H, K)
    if rules:
        res = res.reduce(rules)
    if ode is not None:
        eq, top = ode
        res = res.map(lambda c: pseudo_reduce(c, eq, top))
    return res
