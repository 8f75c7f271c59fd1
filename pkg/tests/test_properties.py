"""Algebraic laws on randomized expressions and operators (fixed seed)."""
from hypothesis import given

from strategies import diffops, exprs, momentum_ops, phasepolys
from superint.opalg import adjoint, commutator, compose, hamiltonian, operator, poisson
from superint.symkernel import Expr, I, differentiate, sym, sym_gen

HBAR = sym("hbar")


@given(exprs(), exprs(), exprs())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(exprs(max_order=2), exprs(max_order=2), exprs(max_order=2))
def test_differentiate_linear_and_leibniz(a, b, c):
    assert differentiate(a + 3 * b) == differentiate(a) + 3 * differentiate(b)
    assert differentiate(a * b) == differentiate(a) * b + a * differentiate(b)


@given(diffops(max_order=2), diffops(max_order=2), diffops(max_order=2))
def test_jacobi_commutator(a, b, c):
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    assert total.is_zero()


@given(phasepolys(max_order=3), phasepolys(max_order=3), phasepolys(max_order=3))
def test_jacobi_poisson(a, b, c):
    total = poisson(a, poisson(b, c)) + poisson(b, poisson(c, a)) + poisson(c, poisson(a, b))
    assert total.is_zero()


@given(diffops(max_order=2), diffops(max_order=2))
def test_adjoint_anti_homomorphism(a, b):
    assert adjoint(compose(a, b)) == compose(adjoint(b), adjoint(a))


@given(diffops(max_order=3))
def test_adjoint_involutive(a):
    assert adjoint(adjoint(a)) == a


@given(exprs(with_i=False, max_order=3))
def test_real_hamiltonian_self_adjoint(v):
    H = hamiltonian(v)
    assert adjoint(H) == H


def _hbar_expansion(c: Expr, k: int) -> Expr:
    return c.coeff(sym_gen("hbar"), k)


@given(momentum_ops(max_order=2, with_i=False), momentum_ops(max_order=2, with_i=False))
def test_classical_limit(fa, fb):
    (f, A), (g, B) = fa, fb
    q = commutator(A, B).momentum_coeffs()
    pb = poisson(operator(f, "classical"), operator(g, "classical"))
    orders = set(q) | set(pb.terms)
    for a in orders:
        c = q.get(a, Expr.num(0)) / (I * HBAR)
        assert c.low_degree(sym_gen("hbar")) >= 0 if not c.is_zero() else True
        assert _hbar_expansion(c, 0) == pb.terms.get(a, Expr.num(0))
