import numpy as np
import pytest

from superint.opalg import (
    AlgebraRelation, DiffOp, Kind, PhasePoly, adjoint, check_relation, commutator, compose,
    hamiltonian, momentum, operator, poisson,
)
from superint.detsys import bracket_coefficients, f_
from superint.symkernel import ONE, Expr, I, evaluate, fn, substitute, sym, var

x, hbar, a1 = var("x"), sym("hbar"), sym("alpha1")
V = fn("V")
D = DiffOp({(1,): ONE})


def rel(kind, alpha=a1):
    return AlgebraRelation(Kind(kind), alpha)


class TestCompose:
    def test_d_times_x(self):
        assert compose(D, DiffOp({(0,): x})) == DiffOp({(1,): x, (0,): ONE})

    def test_d2_times_v(self):
        out = compose(DiffOp({(2,): ONE}), DiffOp({(0,): V}))
        assert out == DiffOp({(2,): V, (1,): 2 * fn("V", 1), (0,): fn("V", 2)})

    def test_associative_by_action(self):
        # oracle: act on a polynomial test function numerically
        a = DiffOp({(1,): x ** 2, (0,): ONE})
        b = DiffOp({(2,): x, (0,): 3 * x})
        c = DiffOp({(1,): ONE + x})
        left, right = compose(a, compose(b, c)), compose(compose(a, b), c)
        assert left == right
        psi = x ** 5 + 2 * x ** 3 - x
        vals = [complex(evaluate(op.apply(psi), {"x": 0.7})) for op in (left, right)]
        step = complex(evaluate(a.apply(b.apply(c.apply(psi))), {"x": 0.7}))
        assert np.allclose(vals, step)


class TestCommutator:
    def test_h_with_p(self):
        H, p = hamiltonian(), momentum()
        assert commutator(H, p) == DiffOp({(0,): I * hbar * fn("V", 1)})

    def test_linear_potential_gives_identity(self):
        H = hamiltonian(a1 * x / (I * hbar))
        assert commutator(H, momentum()) == DiffOp({(0,): a1})

    def test_self_commutator(self):
        a = DiffOp({(2,): x, (1,): V, (0,): hbar})
        assert commutator(a, a).is_zero()


class TestAdjoint:
    def test_d(self):
        assert adjoint(D) == DiffOp({(1,): -ONE})

    def test_momentum_symmetric(self):
        p = momentum()
        assert adjoint(p) == p

    def test_ladder_partner(self):
        K = operator([-I * a1 * x / hbar, ONE])
        assert adjoint(K) == operator([I * a1 * x / hbar, ONE])

    def test_hamiltonian_self_adjoint(self):
        H = hamiltonian()
        assert adjoint(H) == H


class TestPoisson:
    def test_sign_matches_classical_z_list(self):
        # {a, b} = a_x b_p - a_p b_x, the sign under which Z_0 = f_1 V'
        H = hamiltonian(mechanics="classical")
        assert poisson(H, momentum("classical")) == PhasePoly({(0,): fn("V", 1)})
        assert poisson(momentum("classical"), H) == PhasePoly({(0,): -fn("V", 1)})

    def test_singular_oscillator_ladder(self):
        g = sym("gamma")
        Vd2 = a1 ** 2 * x ** 2 / 8 + g / x ** 2
        H = hamiltonian(Vd2, "classical")
        K = operator([-x * fn("V", 1), I * a1 * x, ONE], "classical")
        K = K.map(lambda c: substitute(c, {"V": Vd2}))
        # {H, K} = i alpha1 K for the classical lowering convention
        assert check_relation(H, K, rel("LadderLower")).is_zero()

    def test_classical_z_list(self):
        M = 3
        z = bracket_coefficients("classical", M)
        f = [f_(l) for l in range(M + 1)]
        d = lambda e: e.diff()
        Vp = fn("V", 1)
        assert z[0] == f[1] * Vp
        for l in range(1, M):
            assert z[l] == (l + 1) * f[l + 1] * Vp - d(f[l - 1])
        assert z[M] == -d(f[M - 1])
        assert z[M + 1] == -d(f[M])


class TestCheckRelation:
    def test_harmonic_ladder(self):
        H = hamiltonian(a1 ** 2 * x ** 2 / (2 * hbar ** 2))
        K = operator([-I * a1 * x / hbar, ONE])
        assert check_relation(H, K, rel("LadderLower")).is_zero()
        assert not check_relation(H, K, rel("LadderRaise")).is_zero()

    def test_conformal_inverse_square(self):
        b = sym("beta")
        H = hamiltonian(b / x ** 2)
        # K = x p + p x up to normalization: D-form x D + 1/2
        K = operator([-I * hbar / 2, x])
        res = check_relation(H, K, AlgebraRelation(Kind.CONFORMAL, Expr.num(-2) * I * hbar))
        assert res.is_zero()

    def test_free_particle(self):
        assert check_relation(hamiltonian(Expr.num(0)), momentum(), rel("Abelian", Expr.num(0))).is_zero()

    def test_mechanics_must_match(self):
        with pytest.raises(TypeError):
            check_relation(hamiltonian(), momentum("classical"), rel("Abelian", Expr.num(0)))
