import math

import numpy as np
import pytest

from wigner_calc import chaos as ch
from wigner_calc import malliavin as mv
from wigner_calc.chaos import ChaosExpansion
from wigner_calc.config import PreconditionError, using
from wigner_calc.instances import (random_chaos, random_direction, random_increasing_chaos,
                                   random_kernel)
from wigner_calc.kernel import Kernel, MultiKernel

e = Kernel.basis
S = ChaosExpansion.field
I = ChaosExpansion.integral
ONE = ChaosExpansion.constant(1)


def test_gradient_of_second_chaos():
    G = mv.gradient(I(e(1, 2)))
    assert G.param_tuples() == [(1,), (2,)]
    assert G.component((1,)) == MultiKernel(2, {(0, 1): e(2)})
    assert G.component((2,)) == MultiKernel(2, {(1, 0): e(1)})


def test_gradient_trivial_below_order(rng):
    F = random_chaos(rng, 2, 4)
    assert mv.gradient(F, 3).is_zero()


def test_second_gradient():
    G = mv.gradient(I(e(1, 2)), 2)
    assert G.param_tuples() == [(1, 2)]
    assert G.component((1, 2)) == MultiKernel.unit(3)


def test_gradient_matches_iterated(rng):
    F = random_chaos(rng, 4, 3)
    for p in range(1, 5):
        assert mv.gradient(F, p) == mv.iterated_gradient(F, p)


def test_pair_gradient_of_field(rng):
    h = random_direction(rng, 4)
    assert mv.directional(S(h), h).allclose(MultiKernel.unit(2, h.norm() ** 2), 1e-14)


def test_pair_gradient_basis_direction(rng):
    F = random_chaos(rng, 3, 4)
    G = mv.gradient(F)
    for j in range(4):
        assert mv.directional(F, e(j)) == G.component((j,))


def test_integration_by_parts(rng):
    F = random_chaos(rng, 3, 4)
    h = random_direction(rng, 4)
    lhs = mv.directional(F, h).trace_all().scalar_value()
    assert lhs == pytest.approx((F * S(h)).trace(), abs=1e-13)


def test_stroock_examples(rng):
    F = I(e(1, 2, 1))
    assert mv.stroock_kernel(F, 3).entries == {(1, 2, 1): 1}
    G = random_chaos(rng, 3, 4)
    assert mv.stroock_kernel(G, 0) == Kernel.scalar(G.trace())
    assert mv.stroock_kernel(G, 5).is_zero()


def test_stroock_round_trip(rng):
    for _ in range(10):
        F = random_chaos(rng, 4, 4)
        assert mv.stroock_reconstruct(F) == F
        assert mv.stroock_reconstruct(F, symmetrized=True).max_abs_diff(F) <= 4 * np.finfo(float).eps


def test_divergence_of_constant_process(rng):
    h = random_direction(rng, 4)
    assert mv.divergence_adjoint(mv.deterministic_multiprocess(h)) == S(h)
    assert mv.divergence_deterministic(h) == S(h)


def test_divergence_of_gradient_is_number_operator(rng):
    F = random_chaos(rng, 4, 3)
    N = ch.apply_spectral(F, "number")
    assert mv.divergence_adjoint(mv.gradient(F)).allclose(N, 1e-13)


def test_divergence_routes_agree(rng):
    for p in range(1, 4):
        U = mv.gradient(random_chaos(rng, 4, 3), p) * (0.5 - 2j)
        assert mv.divergence_adjoint(U).allclose(mv.divergence_adjoint(U, method="matrix"), 1e-13)


def test_duality(rng):
    for p in range(1, 4):
        F = random_chaos(rng, 4, 3)
        U = mv.gradient(random_chaos(rng, 4, 3), p) * (1 + 1j)
        assert mv.gradient(F, p).inner(U) == pytest.approx(ch.inner(F, mv.divergence_adjoint(U)),
                                                           abs=1e-10)


@pytest.mark.parametrize("p", range(1, 7))
def test_divergence_of_tensor_power_is_chebyshev(rng, p):
    h = random_direction(rng, 3, unit=True)
    hp = Kernel.scalar(1)
    for _ in range(p):
        hp = hp.tensor(h)
    with using(max_degree=8):
        assert mv.divergence_deterministic(hp).allclose(ch.chebyshev_eval(p, h), 1e-13)


def test_voiculescu_examples():
    h = e(1)
    assert mv.divergence_elementary(ONE, ONE, h) == S(h)
    assert mv.divergence_elementary(S(e(1)), ONE, e(1)) == I(e(1, 1))


def test_voiculescu_matches_adjoint(rng):
    for _ in range(5):
        A, B = random_chaos(rng, 2, 3), random_chaos(rng, 2, 3)
        h = random_direction(rng, 3)
        assert mv.divergence_elementary(A, B, h).allclose(
            mv.divergence_adjoint(mv.elementary_biprocess(A, B, h)), 1e-10)


def test_adapted_projection_example():
    G = mv.adapted_projection(mv.gradient(I(e(1, 2))))
    assert G.param_tuples() == [(2,)]
    assert G.component((2,)) == MultiKernel(2, {(1, 0): e(1)})


def test_adapted_projection_idempotent(rng):
    G = mv.adapted_projection(mv.gradient(random_chaos(rng, 4, 4)))
    assert mv.adapted_projection(G) == G


def test_adapted_projection_contracts(rng):
    G = mv.gradient(random_chaos(rng, 4, 4))
    assert mv.adapted_projection(G).norm() <= G.norm()


def test_adapted_biprocess_rejects_future_legs():
    with pytest.raises(ValueError):
        mv.AdaptedBiprocess(2, {(1, 0): Kernel(2, [[1, 1]], [1.0])}, 1)


def test_clark_ocone_examples():
    for F in (I(e(1, 2)), I(e(1, 2, 3)), ONE):
        t, G = mv.clark_ocone(F)
        assert ChaosExpansion.constant(t) + mv.ito_integral(G) == F
    t, G = mv.clark_ocone(ONE)
    assert t == 1 and G.is_zero()


def test_clark_ocone_random(rng):
    for _ in range(10):
        F = random_increasing_chaos(rng, 4, 5)
        t, G = mv.clark_ocone(F)
        assert ChaosExpansion.constant(t) + mv.ito_integral(G) == F


def test_clark_ocone_rejects_repeated_indices():
    with pytest.raises(PreconditionError):
        mv.clark_ocone(I(e(1, 1)))


def test_covariance_examples(rng):
    h = random_direction(rng, 4)
    assert mv.covariance_ou(S(h), S(h)) == pytest.approx(h.norm() ** 2, rel=1e-14)
    F = random_chaos(rng, 3, 4)
    assert mv.covariance_ou(F, ONE) == 0


def test_covariance_routes(rng):
    F, G = random_chaos(rng, 3, 3), random_chaos(rng, 3, 3)
    direct = (F * G).trace() - F.trace() * G.trace()
    assert mv.covariance_ou(F, G) == pytest.approx(direct, abs=1e-12)
    assert mv.covariance_ou(F, G, method="quadrature") == pytest.approx(direct, abs=1e-10)


def test_variance_examples(rng):
    h = random_direction(rng, 4)
    assert mv.variance_stroock(ONE) == 0
    assert mv.variance_stroock(S(h)) == pytest.approx(h.norm() ** 2, rel=1e-14)
    assert mv.variance_stroock(ch.chebyshev_eval(2, e(0))) == 1


def test_poincare(rng):
    for _ in range(20):
        F = random_chaos(rng, 4, 4)
        assert mv.gradient(F).norm_squared() >= F.centered().norm() ** 2 - 1e-12


def test_cebron_examples(rng):
    h = random_direction(rng, 4)
    assert mv.cebron_product(S(h), S(h), 1) == pytest.approx(h.norm() ** 2, rel=1e-14)
    A, B = I(random_kernel(rng, 2, 3)), I(random_kernel(rng, 3, 3))
    assert mv.cebron_product(A, B, 2) == 0


def test_cebron_third_chaos(rng):
    A, B = I(random_kernel(rng, 3, 3)), I(random_kernel(rng, 3, 3))
    target = (A * B).trace()
    for p in (1, 2, 3):
        assert mv.cebron_product(A, B, p) == pytest.approx(target, abs=1e-12)


def test_cebron_precondition():
    with pytest.raises(PreconditionError):
        mv.cebron_product(S(e(0)) + 1, ONE, 1)


def test_sobolev_first_order(rng):
    h = random_direction(rng, 4)
    assert mv.sobolev_seminorm(S(h), 1, symmetrized=True) == pytest.approx(h.norm() ** 2, rel=1e-14)


def test_sobolev_norms_carry_factorial(rng):
    # ||D^p F||^2 = (p!)^2 binom(n, p) ||f_n||^2 = p! * n(n-1)...(n-p+1) ||f_n||^2
    F = random_chaos(rng, 5, 3)
    for p in range(1, 5):
        closed = mv.sobolev_closed_form(F, p)
        assert mv.sobolev_seminorm(F, p, symmetrized=True) == pytest.approx(math.factorial(p) * closed,
                                                                              rel=1e-12)
        assert mv.sobolev_seminorm(F, p) == pytest.approx(closed / math.factorial(p), rel=1e-12)


def test_sobolev_third_chaos(rng):
    f = random_kernel(rng, 3, 3)
    assert mv.sobolev_seminorm(I(f), 2, symmetrized=True) == pytest.approx(12 * f.norm() ** 2, rel=1e-13)
    assert mv.sobolev_closed_form(I(f), 2) == pytest.approx(6 * f.norm() ** 2, rel=1e-13)


def test_heisenberg(rng):
    U = mv.gradient(random_chaos(rng, 3, 3))
    assert mv.gradient(mv.divergence_adjoint(U)).allclose(mv.heisenberg_rhs(U), 1e-12)


def test_leibniz(rng):
    F, G = random_chaos(rng, 2, 3), random_chaos(rng, 2, 3)
    for n in (1, 2):
        assert mv.gradient(F * G, n).as_plain().allclose(mv.leibniz_gradient(F, G, n), 1e-12)


def test_ou_commutation(rng):
    F = random_chaos(rng, 4, 3)
    t = 0.4
    for k in (1, 2, 3):
        lhs = mv.gradient(ch.apply_spectral(F, "ou", t), k)
        rhs = mv.gradient(F, k).scale_blocks(lambda deg: math.exp(-k * t) * math.exp(-sum(deg) * t))
        assert lhs.allclose(rhs, 1e-14)


def test_conditional_commutation(rng):
    F = random_chaos(rng, 4, 4)
    A = [0, 2]
    lhs = mv.gradient(ch.conditional_expectation(F, A))
    rhs = mv.gradient(F).restrict_legs(A).filter(lambda idx, deg: np.isin(idx[:, 0], A))
    assert lhs == rhs
