"""Hypothesis strategies for expressions and operators."""
from fractions import Fraction

from hypothesis import strategies as st

from superint.opalg import DiffOp, PhasePoly, operator
from superint.symkernel import Expr, I, fn, sym, var

X = var("x")
HBAR = sym("hbar")
ALPHA = sym("alpha1")

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def _atoms(functions=("V",), max_order=2, with_i=True):
    atoms = [X, ALPHA, HBAR, X ** -1]
    atoms += [fn(f, k) for f in functions for k in range(max_order + 1)]
    if with_i:
        atoms.append(I)
    return st.sampled_from(atoms)


@st.composite
def monomials(draw, atoms):
    out = Expr.num(draw(small.filter(lambda c: c != 0)))
    for a in draw(st.lists(atoms, max_size=3)):
        out = out * a
    return out


def exprs(functions=("V",), max_order=2, max_terms=3, with_i=True, hbar=True):
    atoms = _atoms(functions, max_order, with_i)
    if not hbar:
        atoms = atoms.filter(lambda a: a != HBAR)
    return st.lists(monomials(atoms), min_size=0, max_size=max_terms).map(
        lambda ms: sum(ms, Expr.num(0)))


@st.composite
def diffops(draw, max_order=2, **kw):
    order = draw(st.integers(0, max_order))
    return DiffOp({(k,): draw(exprs(**kw)) for k in range(order + 1)})


@st.composite
def momentum_ops(draw, mechanics="quantum", max_order=2, **kw):
    """Operators built from hbar-free momentum-form coefficients."""
    f = [draw(exprs(hbar=False, **kw)) for _ in range(draw(st.integers(0, max_order)) + 1)]
    return f, operator(f, mechanics)


@st.composite
def phasepolys(draw, max_order=2, **kw):
    order = draw(st.integers(0, max_order))
    return PhasePoly({(k,): draw(exprs(**kw)) for k in range(order + 1)})


__all__ = ["exprs", "diffops", "phasepolys", "momentum_ops", "small", "Fraction", "X", "HBAR", "ALPHA"]
