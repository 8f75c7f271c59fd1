"""Exact symbolic expressions over one or two space variables.

An :class:`Expr` is a Laurent polynomial with rational coefficients in a set of
generators: the imaginary unit, prime surds (for radical closed forms),
parameters, space variables and unknown-function derivatives.  Expressions are
immutable and always kept in canonical form, so structural equality is
semantic equality for everything the kernel can represent.

Generators are plain tuples whose natural ordering is the canonical order::

    (0, "I")                      imaginary unit, exponent in {0, 1}
    (1, p)                        surd of the prime p, exponent in (0, 1)
    (2, name)                     parameter
    (3, name)                     space variable
    (4, name, order, var)         d^order/dvar^order of the unknown ``name``
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Gen = tuple
Monomial = tuple  # tuple of (gen, exponent) sorted by gen
Number = Union[int, Fraction]

IMAG: Gen = (0, "I")
_ONE_MONO: Monomial = ()

_mul_cache: dict = {}


def _norm_exp(e):
    if isinstance(e, Fraction) and e.denominator == 1:
        return int(e)
    return e


def _factor_int(n: int) -> dict:
    out: dict = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mono_mul(a: Monomial, b: Monomial):
    """Product of two monomials as (sign-and-rational factor, monomial)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    key = (a, b)
    hit = _mul_cache.get(key)
    if hit is not None:
        return hit
    exps = dict(a)
    for g, e in b:
        exps[g] = exps.get(g, 0) + e
    factor: Number = 1
    items = []
    for g in sorted(exps):
        e = _norm_exp(exps[g])
        if e == 0:
            continue
        if g[0] == 0:
            e %= 4
            if e >= 2:
                factor = -factor
                e -= 2
            if e == 0:
                continue
        elif g[0] == 1:
            whole = math.floor(e)
            if whole:
                factor = factor * Fraction(g[1]) ** whole
                e = _norm_exp(e - whole)
            if e == 0:
                continue
        items.append((g, e))
    res = (factor, tuple(items))
    if len(_mul_cache) > 400_000:
        _mul_cache.clear()
    _mul_cache[key] = res
    return res


def _sort_key(g: Gen):
    if g[0] == 4:
        return (4, g[1], g[3], g[2])
    return g


class Expr:
    """Canonical Laurent polynomial; see the module docstring."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        # terms must already be canonical: monomial -> nonzero Fraction/int
        self.terms = dict(terms) if terms else {}
        self._hash = None

    # ---- construction -------------------------------------------------
    @staticmethod
    def from_terms(pairs: Iterable) -> "Expr":
        acc: dict = {}
        for mono, c in pairs:
            if c:
                acc[mono] = acc.get(mono, 0) + c
        return Expr({m: _norm_exp(Fraction(c)) for m, c in acc.items() if c})

    @staticmethod
    def gen(g: Gen, exp: Number = 1) -> "Expr":
        if g[0] in (0, 1):
            return Expr({(): 1}) * _gen_power(g, exp)
        return Expr({((g, _norm_exp(Fraction(exp))),): 1})

    @staticmethod
    def num(c) -> "Expr":
        if isinstance(c, Expr):
            return c
        if isinstance(c, complex):
            re_ = Fraction(c.real).limit_denominator(10**12)
            im_ = Fraction(c.imag).limit_denominator(10**12)
            return Expr.num(re_) + Expr.num(im_) * I
        c = _norm_exp(Fraction(c))
        return Expr({(): c}) if c else Expr()

    # ---- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_number(self) -> bool:
        return all(all(g[0] in (0, 1) for g, _ in m) for m in self.terms)

    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def as_rational(self):
        if not self.terms:
            return Fraction(0)
        if list(self.terms) == [()]:
            return Fraction(self.terms[()])
        raise ValueError(f"not a rational constant: {self}")

    def gens(self) -> set:
        return {g for m in self.terms for g, _ in m}

    def free_of(self, pred) -> bool:
        return not any(pred(g) for g in self.gens())

    def functions(self) -> set:
        return {(g[1], g[3]) for g in self.gens() if g[0] == 4}

    def max_order(self, name: str, var: str | None = None) -> int:
        """Highest derivative order of ``name`` present, -1 if absent."""
        best = -1
        for g in self.gens():
            if g[0] == 4 and g[1] == name and (var is None or g[3] == var):
                best = max(best, g[2])
        return best

    # ---- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Expr(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Expr()
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                f, m = _mono_mul(m1, m2)
                v = out.get(m, 0) + f * c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Expr({m: _norm_exp(Fraction(c)) if isinstance(c, Fraction) else c for m, c in out.items()})

    __rmul__ = __mul__

    def inverse(self) -> "Expr":
        """Inverse of a single-term expression (monomial denominators only)."""
        if len(self.terms) != 1:
            raise ZeroDivisionError(f"cannot invert non-monomial {self}")
        (m, c), = self.terms.items()
        inv = Expr({(): Fraction(1) / Fraction(c)})
        for g, e in m:
            inv = inv * _gen_power(g, -e)
        return inv

    def __truediv__(self, other):
        other = _coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, k):
        if isinstance(k, Fraction) and k.denominator == 1:
            k = int(k)
        if isinstance(k, int):
            if k < 0:
                return self.inverse() ** (-k)
            result = Expr({(): 1})
            base = self
            while k:
                if k & 1:
                    result = result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        return self._rational_power(Fraction(k))

    def _rational_power(self, q: Fraction) -> "Expr":
        if len(self.terms) != 1:
            raise ValueError(f"rational power of a sum is not supported: ({self})^{q}")
        (m, c), = self.terms.items()
        out = _rational_number_power(Fraction(c), q)
        for g, e in m:
            if g[0] == 0:
                # i^(e*q): only the principal branches of +-1, +-i are allowed
                t = Fraction(e) * q
                if t.denominator != 1:
                    raise ValueError("fractional power of the imaginary unit")
                out = out * _gen_power(g, int(t))
            else:
                out = out * _gen_power(g, Fraction(e) * q)
        return out

    # ---- comparison ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.num(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # ---- structure ----------------------------------------------------
    def conjugate(self) -> "Expr":
        """Complex conjugate; all parameters and unknowns are taken real."""
        return Expr({m: (-c if any(g[0] == 0 for g, _ in m) else c) for m, c in self.terms.items()})

    def degree(self, g: Gen) -> int:
        best = None
        for m in self.terms:
            e = dict(m).get(g, 0)
            best = e if best is None else max(best, e)
        return best if best is not None else 0

    def low_degree(self, g: Gen) -> int:
        best = None
        for m in self.terms:
            e = dict(m).get(g, 0)
            best = e if best is None else min(best, e)
        return best if best is not None else 0

    def coeff(self, g: Gen, k: Number = 1) -> "Expr":
        """Coefficient of g**k (exact exponent match)."""
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            if d.get(g, 0) == k:
                d.pop(g, None)
                out[tuple(sorted(d.items(), key=lambda it: _sort_key(it[0])))] = c
        return Expr(out)

    def as_poly(self, g: Gen) -> dict:
        """Split into {exponent of g: coefficient}."""
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(g, 0)
            rest = tuple(sorted(d.items(), key=lambda it: _sort_key(it[0])))
            out.setdefault(e, {})[rest] = c
        return {e: Expr(t) for e, t in out.items()}

    def content(self, include=lambda g: g[0] in (2, 3)) -> "Expr":
        """Single-term gcd of all terms over the generators selected by
        ``include`` (parameters and space variables by default)."""
        if not self.terms:
            return Expr()
        res = Expr({(): 1})
        for g in self.gens():
            if include(g):
                lo = min(dict(m).get(g, 0) for m in self.terms)
                if lo:
                    res = res * Expr.gen(g, lo)
        return res

    def leading_term(self) -> "Expr":
        m = max(self.terms, key=lambda mm: tuple(_sort_key(g) + (e,) for g, e in mm))
        return Expr({m: self.terms[m]})

    # ---- display --------------------------------------------------------
    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        return to_text(self)

    # ---- calculus -------------------------------------------------------
    def diff(self, var: str = "x") -> "Expr":
        return differentiate(self, var)


Scalar = Union[Expr, int, Fraction]


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Expr.num(v)
    if isinstance(v, complex):
        return Expr.num(v)
    raise TypeError(f"cannot use {type(v).__name__} in an Expr")


def _gen_power(g: Gen, e) -> Expr:
    e = _norm_exp(Fraction(e))
    if e == 0:
        return Expr({(): 1})
    if g[0] not in (0, 1):
        return Expr({((g, e),): 1})
    # fold i**2 and whole powers of surds back into the coefficient
    f, m = _mono_mul(((g, e),), ((g, 0),))
    return Expr({m: _norm_exp(Fraction(f))})


def _rational_number_power(c: Fraction, q: Fraction) -> Expr:
    if c == 0:
        return Expr()
    if q.denominator == 1:
        return Expr.num(c ** int(q))
    sign = 1
    if c < 0:
        if q.denominator % 2 == 1:
            sign = (-1) ** q.numerator
        elif q.denominator == 2:
            sign = 0  # handled via i
        else:
            raise ValueError(f"complex root of negative number: ({c})^{q}")
        c = -c
    out = Expr({(): 1})
    for p, k in _factor_int(c.numerator).items():
        out = out * _gen_power((1, p), Fraction(k) * q)
    for p, k in _factor_int(c.denominator).items():
        out = out * _gen_power((1, p), -Fraction(k) * q)
    if sign == 0:
        # (-1)^(n/2) = i^n on the principal branch
        out = out * _gen_power(IMAG, q.numerator)
    elif sign == -1:
        out = -out
    return out


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

I = Expr.gen(IMAG)
ONE = Expr.num(1)
ZERO = Expr()


def sym(name: str) -> Expr:
    return Expr.gen((2, name))


def var(name: str = "x") -> Expr:
    return Expr.gen((3, name))


def fn(name: str, order: int = 0, v: str = "x") -> Expr:
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    return Expr.gen(fn_gen(name, order, v))


def fn_gen(name: str, order: int = 0, v: str = "x") -> Gen:
    return (4, name, order, v)


def sym_gen(name: str) -> Gen:
    return (2, name)


def var_gen(name: str = "x") -> Gen:
    return (3, name)


def num(c) -> Expr:
    return Expr.num(c)


def normalize(e) -> Expr:
    """Canonical form.  Expr values are canonical on construction; this
    coerces plain numbers and is idempotent."""
    return _coerce(e)


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def _dmono(m: Monomial, v: str):
    """d/dv of a monomial: list of (factor, monomial)."""
    out = []
    for idx, (g, e) in enumerate(m):
        if g[0] == 3 and g[1] == v:
            rest = m[:idx] + m[idx + 1:]
            if e != 1:
                rest_d = dict(rest)
                rest_d[g] = _norm_exp(e - 1)
                rest = tuple(sorted(rest_d.items(), key=lambda it: _sort_key(it[0])))
            out.append((e, rest))
        elif g[0] == 4 and g[3] == v:
            d = dict(m)
            if e == 1:
                del d[g]
            else:
                d[g] = _norm_exp(e - 1)
            ng = (4, g[1], g[2] + 1, v)
            d[ng] = _norm_exp(d.get(ng, 0) + 1)
            if d[ng] == 0:
                del d[ng]
            out.append((e, tuple(sorted(d.items(), key=lambda it: _sort_key(it[0])))))
    return out


def differentiate(e: Expr, v: str = "x", times: int = 1) -> Expr:
    """Total derivative d/dv; unknown functions of v get their order raised."""
    for _ in range(times):
        acc: dict = {}
        for m, c in e.terms.items():
            for f, dm in _dmono(m, v):
                acc[dm] = acc.get(dm, 0) + f * c
        e = Expr({m: _norm_exp(Fraction(c)) for m, c in acc.items() if c})
    return e


def partial(e: Expr, g: Gen) -> Expr:
    """Partial derivative with respect to a generator (treated independent)."""
    acc: dict = {}
    for m, c in e.terms.items():
        d = dict(m)
        k = d.get(g, 0)
        if not k:
            continue
        if k == 1:
            del d[g]
        else:
            d[g] = _norm_exp(k - 1)
        mm = tuple(sorted(d.items(), key=lambda it: _sort_key(it[0])))
        acc[mm] = acc.get(mm, 0) + k * c
    return Expr({m: _norm_exp(Fraction(c)) for m, c in acc.items() if c})


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous substitution.

    Keys are generators, or a bare function name / (name, var) pair meaning
    "this unknown and all its derivatives", whose image is differentiated as
    needed.  Values are Exprs (or numbers).
    """
    gen_map: dict = {}
    fn_map: dict = {}
    for k, v in bindings.items():
        v = _coerce(v)
        if isinstance(k, str):
            fn_map[(k, None)] = v
        elif isinstance(k, tuple) and len(k) == 2 and isinstance(k[0], str):
            fn_map[(k[0], k[1])] = v
        else:
            gen_map[k] = v
    if not gen_map and not fn_map:
        return e
    deriv_cache: dict = {}

    def image(g: Gen):
        if g in gen_map:
            return gen_map[g]
        if g[0] == 4:
            key = (g[1], g[3]) if (g[1], g[3]) in fn_map else (g[1], None)
            if key in fn_map:
                ck = (key, g[2], g[3])
                if ck not in deriv_cache:
                    deriv_cache[ck] = differentiate(fn_map[key], g[3], g[2])
                return deriv_cache[ck]
        return None

    pow_cache: dict = {}
    out = Expr()
    acc: dict = {}
    for m, c in e.terms.items():
        keep = []
        factor = None
        for g, k in m:
            img = image(g)
            if img is None:
                keep.append((g, k))
                continue
            pk = (g, k)
            if pk not in pow_cache:
                pow_cache[pk] = img ** k
            factor = pow_cache[pk] if factor is None else factor * pow_cache[pk]
        if factor is None:
            acc[m] = acc.get(m, 0) + c
            continue
        base = Expr({tuple(keep): c})
        out = out + base * factor
    if acc:
        out = out + Expr({m: c for m, c in acc.items() if c})
    return out


def rename(e: Expr, gen_map: Mapping[Gen, Gen]) -> Expr:
    """Rename generators (e.g. move an x-axis entry onto the y axis)."""
    acc: dict = {}
    for m, c in e.terms.items():
        d: dict = {}
        for g, k in m:
            ng = gen_map.get(g, g)
            d[ng] = d.get(ng, 0) + k
        mm = tuple(sorted(((g, k) for g, k in d.items() if k), key=lambda it: _sort_key(it[0])))
        acc[mm] = acc.get(mm, 0) + c
    return Expr({m: c for m, c in acc.items() if c})


def move_axis(e: Expr, old: str, new: str, fn_names: Mapping[str, str] | None = None,
              params: Mapping[str, str] | None = None) -> Expr:
    """Re-express an expression in ``old`` as one in ``new``."""
    fn_names = fn_names or {}
    params = params or {}
    gmap = {}
    for g in e.gens():
        if g[0] == 3 and g[1] == old:
            gmap[g] = (3, new)
        elif g[0] == 4 and g[3] == old:
            gmap[g] = (4, fn_names.get(g[1], g[1]), g[2], new)
        elif g[0] == 2 and g[1] in params:
            gmap[g] = (2, params[g[1]])
    return rename(e, gmap)


# ---------------------------------------------------------------------------
# reduction modulo defining equations
# ---------------------------------------------------------------------------

class RuleConflict(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    """``target**degree -> replacement``.

    For a derivative target (degree 1) every higher derivative of the same
    unknown is rewritten too, through the differentiated rule.  For
    ``degree > 1`` (algebraic relations such as eps**2 = 1 or
    (P')**2 = 4P**3 - g2*P - g3) only powers of the target itself are reduced.
    """

    target: Gen
    replacement: Expr
    degree: int = 1

    def __post_init__(self):
        t = self.target
        if self.degree == 1 and t[0] == 4:
            if self.replacement.max_order(t[1], t[3]) >= t[2]:
                raise ValueError("replacement must have lower derivative order than the target")
        elif self.replacement.degree(t) >= self.degree:
            raise ValueError("replacement must have lower degree than the target")

    @staticmethod
    def solve_for(eq: Expr, target: Gen) -> "RewriteRule":
        """Rule from ``eq = 0`` solved for ``target`` (must appear linearly
        with a single-term coefficient)."""
        poly = eq.as_poly(target)
        if set(poly) - {0, 1} or 1 not in poly:
            raise ValueError(f"{target} does not appear linearly")
        lc = poly[1]
        return RewriteRule(target, -poly.get(0, ZERO) / lc)


def _check_rules(rules):
    seen = {}
    for r in rules:
        key = (r.target, r.degree)
        if key in seen and seen[key].replacement != r.replacement:
            raise RuleConflict(f"two different rules for {gen_text(r.target)}")
        seen[key] = r


def reduce_mod(e: Expr, rules: Iterable[RewriteRule]) -> Expr:
    """Normal form of ``e`` modulo the given rewrite rules."""
    rules = list(rules)
    _check_rules(rules)
    deriv_rules = [r for r in rules if r.degree == 1 and r.target[0] == 4]
    other = [r for r in rules if not (r.degree == 1 and r.target[0] == 4)]
    rep_cache: dict = {}

    def replacement(rule, order):
        key = (rule.target, order)
        if key not in rep_cache:
            rep_cache[key] = differentiate(rule.replacement, rule.target[3], order - rule.target[2])
        return rep_cache[key]

    for _ in range(10_000):
        changed = False
        for r in deriv_rules:
            name, base, v = r.target[1], r.target[2], r.target[3]
            top = e.max_order(name, v)
            while top >= base:
                g = (4, name, top, v)
                if e.low_degree(g) < 0:
                    raise ValueError(f"cannot reduce negative power of {gen_text(g)}")
                e = substitute(e, {g: replacement(r, top)})
                changed = True
                top = e.max_order(name, v)
        for r in other:
            if e.degree(r.target) >= r.degree:
                e = _reduce_power(e, r)
                changed = True
        if not changed:
            return e
    raise RuntimeError("reduce_mod did not terminate")


def _reduce_power(e: Expr, r: RewriteRule) -> Expr:
    poly = e.as_poly(r.target)
    out = ZERO
    t = Expr.gen(r.target)
    for k, c in poly.items():
        if k < r.degree or not isinstance(k, int):
            out = out + c * (Expr.gen(r.target, k) if k else ONE)
        else:
            q, s = divmod(k, r.degree)
            out = out + c * (r.replacement ** q) * (t ** s)
    return out


def pseudo_reduce(e: Expr, eq: Expr, target: Gen) -> Expr:
    """Reduce ``e`` modulo the differential equation ``eq = 0`` whose highest
    derivative ``target`` may have a non-invertible coefficient.

    The result equals ``L * e`` on solutions of ``eq`` for some power ``L``
    of the leading coefficient, so a zero result means ``e`` vanishes on
    solutions (away from the zeros of the leading coefficient)."""
    name, base, v = target[1], target[2], target[3]
    poly = eq.as_poly(target)
    if set(poly) <= {0, 1} and 1 in poly:
        lc = poly[1]
        rest = poly.get(0, ZERO)
        if lc.is_single_term():
            return reduce_mod(e, [RewriteRule(target, -rest / lc)])
        return _pseudo_linear(e, lc, -rest, name, base, v)
    # algebraic in the top derivative: eliminate higher derivatives with the
    # differentiated equation (linear in the next derivative), then divide
    if e.max_order(name, v) > base:
        deq = differentiate(eq, v)
        e = pseudo_reduce(e, deq, (4, name, base + 1, v))
    return pseudo_remainder(e, eq, target)


def _pseudo_linear(e: Expr, lc: Expr, n0: Expr, name: str, base: int, v: str) -> Expr:
    """Substitute t^(j) = N_j / lc**p_j for every derivative t^(j), t the
    ``base``-th derivative of ``name``, and clear denominators."""
    t = (4, name, base, v)

    def clear(expr, g, num, p):
        # expr polynomial in g -> numerator after g = num / lc**p, and the power
        pol = expr.as_poly(g)
        if any(not isinstance(k, int) or k < 0 for k in pol):
            raise ValueError(f"negative power of {gen_text(g)}")
        d = max(pol)
        out = ZERO
        for k, c in pol.items():
            out = out + c * num ** k * lc ** (p * (d - k))
        return out, p * d

    fracs = {base: (n0, 1)}
    top = e.max_order(name, v)
    for j in range(base + 1, top + 1):
        nj, pj = fracs[j - 1]
        num = differentiate(nj, v) * lc - pj * nj * differentiate(lc, v)
        num, extra = clear(num, t, n0, 1)
        fracs[j] = (num, pj + 1 + extra)
    for j in range(top, base - 1, -1):
        g = (4, name, j, v)
        if e.degree(g) > 0:
            e, _ = clear(e, g, *fracs[j])
    return e


def pseudo_remainder(e: Expr, f: Expr, g: Gen) -> Expr:
    """Pseudo-remainder of e by f as polynomials in the generator g."""
    fp = f.as_poly(g)
    n = max(fp)
    if any(not isinstance(k, int) or k < 0 for k in fp):
        raise ValueError("divisor must be a polynomial in the generator")
    lc = fp[n]
    t = Expr.gen(g)
    tail = f - lc * t ** n
    for _ in range(1000):
        d = e.degree(g)
        if d < n or e.is_zero():
            return e
        if e.low_degree(g) < 0:
            raise ValueError("dividend has negative powers of the generator")
        ce = e.coeff(g, d)
        rest = e - ce * t ** d
        if lc.is_single_term():
            e = rest - (ce / lc) * tail * t ** (d - n)
        else:
            e = lc * rest - ce * tail * t ** (d - n)
    raise RuntimeError("pseudo_remainder did not terminate")


# ---------------------------------------------------------------------------
# antiderivatives of differential polynomials
# ---------------------------------------------------------------------------

class NotExact(ValueError):
    pass


def antiderivative(p: Expr, name: str, v: str = "x") -> Expr:
    """Q with dQ/dv = p, for p polynomial in the derivatives of ``name``.

    Raises NotExact when p is not a total derivative within the kernel
    (including when a logarithm would be needed)."""
    q = ZERO
    for _ in range(200):
        if p.is_zero():
            return q
        n = p.max_order(name, v)
        others = [f for f in p.functions() if f != (name, v) and f[1] == v]
        if others:
            raise NotExact(f"depends on other unknowns {others}")
        if n < 0:
            return q + _integrate_in_var(p, v)
        top = (4, name, n, v)
        poly = p.as_poly(top)
        if n == 0:
            raise NotExact(f"{to_text(p)} depends on {name} without derivatives")
        if set(poly) - {0, 1}:
            raise NotExact(f"nonlinear in {gen_text(top)}")
        a1 = poly[1]
        phi = _integrate_in_gen(a1, (4, name, n - 1, v))
        q = q + phi
        p = p - differentiate(phi, v)
        if p.max_order(name, v) >= n:
            raise NotExact("integration by parts did not lower the order")
    raise NotExact("antiderivative did not terminate")


def _integrate_in_gen(e: Expr, g: Gen) -> Expr:
    out = ZERO
    for k, c in e.as_poly(g).items():
        if k == -1:
            raise NotExact(f"logarithm of {gen_text(g)} required")
        out = out + c * Expr.gen(g, k + 1) / Fraction(k + 1)
    return out


def _integrate_in_var(e: Expr, v: str) -> Expr:
    g = (3, v)
    out = ZERO
    for k, c in e.as_poly(g).items():
        if k == -1:
            raise NotExact(f"logarithm of {v} required")
        if any(gg[0] == 4 and gg[3] == v for gg in c.gens()):
            raise NotExact("unknown function left in x-integration")
        out = out + c * Expr.gen(g, k + 1) / Fraction(k + 1)
    return out


def is_exact(p: Expr, name: str, v: str = "x") -> bool:
    try:
        antiderivative(p, name, v)
        return True
    except NotExact:
        return False


# ---------------------------------------------------------------------------
# numeric evaluation
# ---------------------------------------------------------------------------

def evaluate(e: Expr, env: Mapping):
    """Evaluate with numbers (or numpy arrays) for every non-constant generator.

    ``env`` keys are generators or their names: "hbar", "x", and function
    derivatives as ``(name, order)`` or ``(name, order, var)``.
    """
    total = 0
    for m, c in e.terms.items():
        val = complex(c) if any(g[0] == 0 for g, _ in m) else float(c)
        if any(g[0] == 0 for g, _ in m):
            val = float(c) * 1j
        for g, k in m:
            if g[0] == 0:
                continue
            x = _lookup(env, g)
            val = val * (x ** (float(k) if isinstance(k, Fraction) else k))
        total = total + val
    return total


def _lookup(env, g):
    if g in env:
        return env[g]
    if g[0] == 1:
        return float(g[1])
    if g[0] in (2, 3) and g[1] in env:
        return env[g[1]]
    if g[0] == 4:
        for key in ((g[1], g[2], g[3]), (g[1], g[2])):
            if key in env:
                return env[key]
    raise KeyError(f"no value for {gen_text(g)}")


# ---------------------------------------------------------------------------
# text and JSON forms
# ---------------------------------------------------------------------------

_PRETTY = {"hbar": "ħ", "alpha1": "α₁", "alpha2": "α₂", "alpha": "α", "beta": "β",
           "gamma": "γ", "lambda": "λ", "kappa": "κ", "eps": "ε"}


def gen_text(g: Gen) -> str:
    if g[0] == 0:
        return "I"
    if g[0] == 1:
        return f"surd{g[1]}"
    if g[0] in (2, 3):
        return g[1]
    name, order = g[1], g[2]
    if order == 0:
        return name
    if order <= 3:
        return name + "'" * order
    return f"{name}^({order})"


def _exp_text(e) -> str:
    return str(e) if isinstance(e, int) else f"({e})"


def to_text(e: Expr) -> str:
    """Human-readable infix text (deterministic)."""
    if not e.terms:
        return "0"
    parts = []
    for m in sorted(e.terms, key=_mono_sort_key):
        c = Fraction(e.terms[m])
        factors = []
        for g, k in m:
            if g[0] == 1:
                factors.append(f"{g[1]}^{_exp_text(k)}")
                continue
            s = gen_text(g)
            factors.append(s if k == 1 else f"{s}^{_exp_text(k)}")
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = str(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = f"{a}*" + "*".join(factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _mono_sort_key(m):
    top = max((g[2] for g, _ in m if g[0] == 4), default=-1)
    weight = sum(float(k) for g, k in m if g[0] == 4)
    return (-top, -weight, tuple(_sort_key(g) + (str(k),) for g, k in m))


def to_prefix(e: Expr) -> str:
    """Deterministic prefix form, e.g. ``(+ (* 3/2 (^ hbar 2) (d V x 2)) 1)``."""
    def leaf(g, k):
        if g[0] == 0:
            s = "I"
        elif g[0] == 1:
            return f"(^ {g[1]} {k})"
        elif g[0] == 2:
            s = g[1]
        elif g[0] == 3:
            s = f"(var {g[1]})"
        else:
            s = f"(d {g[1]} {g[3]} {g[2]})"
        return s if k == 1 else f"(^ {s} {k})"

    terms = []
    for m in sorted(e.terms, key=_mono_sort_key):
        items = [str(Fraction(e.terms[m]))] + [leaf(g, k) for g, k in m]
        terms.append(items[0] if len(items) == 1 else "(* " + " ".join(items) + ")")
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def from_prefix(text: str) -> Expr:
    toks = _TOKEN.findall(text)
    pos = 0

    def parse():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t != "(":
            if t == "I":
                return I
            if re.fullmatch(r"-?\d+(/\d+)?", t):
                return Expr.num(Fraction(t))
            return sym(t)
        head = toks[pos]
        pos += 1
        if head == "var":
            name = toks[pos]
            pos += 2
            return var(name)
        if head == "d":
            name, v, k = toks[pos], toks[pos + 1], int(toks[pos + 2])
            pos += 4
            return fn(name, k, v)
        args = []
        while toks[pos] != ")":
            args.append(parse())
        pos += 1
        if head == "+":
            out = ZERO
            for a in args:
                out = out + a
            return out
        if head == "*":
            out = ONE
            for a in args:
                out = out * a
            return out
        if head == "^":
            return args[0] ** args[1].as_rational()
        raise ValueError(f"unknown head {head}")

    return parse()


def to_json(e: Expr) -> dict:
    """JSON tree form."""
    def leaf(g, k):
        if g[0] == 0:
            node = {"I": True}
        elif g[0] == 1:
            return {"op": "^", "args": [{"num": str(g[1])}, {"num": str(k)}]}
        elif g[0] == 2:
            node = {"sym": g[1]}
        elif g[0] == 3:
            node = {"var": g[1]}
        else:
            node = {"fn": g[1], "var": g[3], "order": g[2]}
        return node if k == 1 else {"op": "^", "args": [node, {"num": str(k)}]}

    args = []
    for m in sorted(e.terms, key=_mono_sort_key):
        factors = [{"num": str(Fraction(e.terms[m]))}] + [leaf(g, k) for g, k in m]
        args.append(factors[0] if len(factors) == 1 else {"op": "*", "args": factors})
    return {"op": "+", "args": args}


def from_json(node) -> Expr:
    if isinstance(node, str):
        return from_prefix(node)
    if "num" in node:
        return Expr.num(Fraction(node["num"]))
    if "I" in node:
        return I
    if "sym" in node:
        return sym(node["sym"])
    if "var" in node and "fn" not in node:
        return var(node["var"])
    if "fn" in node:
        return fn(node["fn"], int(node["order"]), node["var"])
    op, args = node["op"], [from_json(a) for a in node["args"]]
    if op == "+":
        out = ZERO
        for a in args:
            out = out + a
        return out
    if op == "*":
        out = ONE
        for a in args:
            out = out * a
        return out
    if op == "^":
        return args[0] ** args[1].as_rational()
    raise ValueError(f"unknown op {op}")


def rule_to_json(r: RewriteRule) -> dict:
    return {"target": list(r.target), "replacement": to_json(r.replacement), "degree": r.degree}


def rule_from_json(data: dict) -> RewriteRule:
    return RewriteRule(tuple(data["target"]), from_json(data["replacement"]), data["degree"])


def dumps(e: Expr) -> str:
    return json.dumps(to_json(e), sort_keys=True)


# ---------------------------------------------------------------------------
# a small infix parser for writing fixtures by hand
# ---------------------------------------------------------------------------

_FN_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(\'+|\^\((\d+)\))?\((x|y)\)")


def parse(text: str, functions: Iterable[str] = ("V", "U", "u", "W", "P", "P4", "wp", "g", "f")) -> Expr:
    """Parse a small infix language: numbers, I, names, ``V(x)``, ``V'(x)``,
    ``V^(4)(x)``, + - * / ^ and parentheses.  Names listed in ``functions``
    written without an argument denote the unknown of x (``V`` = V(x));
    ``x`` and ``y`` are the space variables, every other name is a parameter.
    """
    functions = set(functions)
    src = text.replace("**", "^")
    tokens = re.findall(r"\d+|[A-Za-z][A-Za-z0-9_]*(?:'+|\^\(\d+\))?(?:\((?:x|y)\))?|[-+*/^()]", src)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def atom():
        t = take()
        if t == "(":
            v = expr()
            take()
            return v
        if t == "-":
            return -power()
        if t == "+":
            return power()
        if t.isdigit():
            return Expr.num(int(t))
        if t == "I":
            return I
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)('+|\^\((\d+)\))?(?:\((x|y)\))?", t)
        name, marks, hi, v = m.group(1), m.group(2), m.group(3), m.group(4)
        order = 0
        if marks:
            order = int(hi) if hi else len(marks)
        if v or name in functions and name not in ("x", "y"):
            return fn(name, order, v or "x")
        if name in ("x", "y"):
            return var(name)
        return sym(name)

    def power():
        base = atom()
        if peek() == "^":
            take()
            if peek() == "(":
                take()
                ex = expr()
                take()
            else:
                tok = take()
                neg = False
                if tok == "-":
                    neg = True
                    tok = take()
                ex = Expr.num(-Fraction(tok) if neg else Fraction(tok))
            return base ** ex.as_rational()
        return base

    def term():
        v = power()
        while peek() in ("*", "/"):
            op = take()
            rhs = power()
            v = v * rhs if op == "*" else v / rhs
        return v

    def expr():
        if peek() == "-":
            take()
            v = -term()
        else:
            if peek() == "+":
                take()
            v = term()
        while peek() in ("+", "-"):
            op = take()
            rhs = term()
            v = v + rhs if op == "+" else v - rhs
        return v

    out = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}: {tokens[pos:]}")
    return out


# ---------------------------------------------------------------------------
# sympy bridge (root finding and linear solves only)
# ---------------------------------------------------------------------------

def _sympy_name(g: Gen) -> str:
    if g[0] == 4:
        base = g[1] if g[3] == "x" else f"{g[1]}_{g[3]}"
        return base if g[2] == 0 else f"{base}_d{g[2]}"
    return g[1]


def to_sympy(e: Expr):
    """Convert to a sympy expression; derivative nodes become plain symbols
    named ``V``, ``V_d1``, ``V_d2`` ... (``_y`` suffix for the y axis)."""
    import sympy

    out = sympy.Integer(0)
    for m, c in e.terms.items():
        c = Fraction(c)
        term = sympy.Rational(c.numerator, c.denominator)
        for g, k in m:
            k = Fraction(k)
            kk = sympy.Rational(k.numerator, k.denominator)
            if g[0] == 0:
                base = sympy.I
            elif g[0] == 1:
                base = sympy.Integer(g[1])
            else:
                base = sympy.Symbol(_sympy_name(g))
            term = term * base ** kk
        out = out + term
    return out


_SYMPY_FN = re.compile(r"^([A-Za-z][A-Za-z0-9]*?)(?:_(y))?(?:_d(\d+))?$")


def from_sympy(s, functions: Iterable[str] = ("V", "u", "U", "W", "P")) -> Expr:
    """Inverse of :func:`to_sympy` for expanded polynomial-like results."""
    import sympy

    functions = set(functions)
    s = sympy.expand(s)
    out = ZERO
    for term in sympy.Add.make_args(s):
        coeff, rest = term.as_coeff_Mul()
        val = Expr.num(Fraction(int(sympy.numer(coeff)), int(sympy.denom(coeff)))) if coeff.is_Rational else None
        if val is None:
            raise ValueError(f"non-rational coefficient {coeff}")
        for factor in sympy.Mul.make_args(rest):
            base, ex = factor.as_base_exp()
            ex = Fraction(int(sympy.numer(ex)), int(sympy.denom(ex)))
            if base == sympy.I:
                val = val * I ** ex
            elif base.is_Integer:
                val = val * Expr.num(int(base)) ** ex
            elif base.is_Symbol:
                m = _SYMPY_FN.match(base.name)
                if m and m.group(1) in functions:
                    val = val * fn(m.group(1), int(m.group(3) or 0), m.group(2) or "x") ** ex
                elif base.name in ("x", "y"):
                    val = val * var(base.name) ** ex
                else:
                    val = val * sym(base.name) ** ex
            elif factor == 1:
                continue
            else:
                raise ValueError(f"cannot convert {factor}")
        out = out + val
    return out
