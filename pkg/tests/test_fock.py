import math

import numpy as np
import pytest

from wigner_calc import chaos as ch
from wigner_calc import fock
from wigner_calc import malliavin as mv
from wigner_calc.chaos import ChaosExpansion
from wigner_calc.config import PreconditionError, TruncationError
from wigner_calc.fock import FockOperator, FockSpace, FockVector, Ladder
from wigner_calc.instances import random_chaos, random_direction, random_kernel
from wigner_calc.kernel import Kernel

e = Kernel.basis
S = ChaosExpansion.field
I = ChaosExpansion.integral


def test_layout_round_trip():
    space = FockSpace(3, 4)
    assert space.dim == 1 + 3 + 9 + 27 + 81
    for i in range(space.dim):
        assert space.index(space.word(i)) == i
    assert space.index(()) == 0


def test_left_annihilation_kills_vacuum(rng):
    h = random_direction(rng, 3)
    assert fock.apply_ladder(Ladder.LEFT_ANNIHILATE, h, FockVector.vacuum(), 3).coeffs == {}


def test_left_creation_on_vacuum():
    assert fock.apply_ladder("l", e(1), FockVector.vacuum(), 3) == FockVector({(1,): 1})


def test_right_annihilation_removes_last_letter():
    v = FockVector({(1, 2): 1})
    assert fock.apply_ladder("r*", e(2), v, 3) == FockVector({(1,): 1})
    assert fock.apply_ladder("r*", e(1), v, 3).coeffs == {}


def test_creation_overflow():
    with pytest.raises(TruncationError):
        fock.apply_ladder("r", e(0), FockVector({(0, 0): 1}), 2)


def test_ladder_matrices_match_word_formulas(rng):
    space = FockSpace(2, 3)
    h = Kernel.vector(rng.standard_normal(2) + 1j * rng.standard_normal(2))
    v = FockVector({w: complex(*rng.standard_normal(2)) for w in [(), (0,), (1, 0)]})
    for kind in Ladder:
        got = space.ladder(kind, h) @ v.to_array(space)
        ref = fock.apply_ladder(kind, h, v, space.L).to_array(space)
        assert np.allclose(got, ref, atol=1e-15)


def test_annihilation_is_adjoint_of_creation(rng):
    space = FockSpace(3, 3)
    h = Kernel.vector(rng.standard_normal(3) + 1j * rng.standard_normal(3))
    lc = space.ladder(Ladder.LEFT_CREATE, h).toarray()
    la = space.ladder(Ladder.LEFT_ANNIHILATE, h).toarray()
    assert np.allclose(la, lc.conj().T)


def test_field_moments():
    space = FockSpace(2, 4)
    X = fock.field_operator(e(1), space).matrix
    v = space.vacuum()
    assert np.vdot(v, X @ (X @ v)) == 1
    assert np.vdot(v, X @ (X @ (X @ (X @ v)))) == 2


def test_field_norm_tends_to_two():
    X = fock.field_operator(e(0), FockSpace(1, 40))
    assert abs(fock.operator_norm(X) - 2) < 0.05


def test_second_quantization():
    space = FockSpace(2, 3)
    assert fock.second_quantize(np.eye(2), space).max_abs_diff(FockOperator.identity(space)) == 0
    zero = fock.second_quantize(np.zeros((2, 2)), space)
    assert zero.max_abs_diff(FockOperator.vacuum_projection(space)) == 0
    t = 0.3
    P = fock.second_quantize(math.exp(-t) * np.eye(2), space)
    lengths = space.lengths()
    assert np.allclose(P.matrix.diagonal(), np.exp(-t * lengths))


def test_second_quantization_rejects_expansion():
    with pytest.raises(PreconditionError):
        fock.second_quantize(2 * np.eye(2), FockSpace(2, 2))


def test_chaos_to_operator_examples(rng):
    space = FockSpace(2, 4)
    h = random_direction(rng, 2)
    assert fock.chaos_to_operator(S(h), space).max_abs_diff(fock.field_operator(h, space)) < 1e-15
    X = fock.field_operator(e(0), space)
    U2 = fock.chaos_to_operator(I(e(0, 0)), space)
    # compression of S^2 - 1: the middle factor must see the level above L
    ext = space.extended(1)
    Xe = fock.field_operator(e(0), ext).matrix
    ref = (Xe @ Xe).toarray()[:space.dim, :space.dim] - np.eye(space.dim)
    assert np.abs(U2.to_dense() - ref).max() < 1e-15
    assert np.abs((X @ X).to_dense() - np.eye(space.dim) - U2.to_dense())[:, :space.offsets[-2]].max() < 1e-15
    v = fock.chaos_to_operator(I(e(0, 1)), space) @ space.vacuum()
    assert FockVector.from_array(space, v) == FockVector({(0, 1): 1})


def test_vacuum_expectations(rng):
    space = FockSpace(3, 8)
    assert fock.vacuum_expectation(FockOperator.identity(space)) == 1
    XY = fock.field_operator(e(1), space) @ fock.field_operator(e(2), space)
    assert fock.vacuum_expectation(XY) == 0
    for _ in range(5):
        F = random_chaos(rng, 3, 3)
        X = fock.chaos_to_operator(F, space)
        assert fock.vacuum_expectation(X) == pytest.approx(F.trace(), abs=1e-14)


def test_operator_multiplicativity(rng):
    space = FockSpace(3, 5)
    F, G = random_chaos(rng, 2, 3), random_chaos(rng, 2, 3)
    prod = fock.chaos_to_operator(F * G, space)
    XF, XG = fock.chaos_to_operator(F, space), fock.chaos_to_operator(G, space)
    # compressions multiply exactly on columns that X_G keeps inside the space
    cols = fock.faithful_columns(space, G.degree)
    assert prod.max_abs_diff(XF @ XG, cols) < 1e-13
    assert prod.max_abs_diff(XF @ XG) > 1e-3


def test_lp_norms():
    space = FockSpace(2, 6)
    assert fock.lp_norm_even(FockOperator.identity(space), 4) == pytest.approx(1)
    X = fock.field_operator(e(0), space)
    assert fock.lp_norm_even(X, 4) == pytest.approx(2 ** 0.25, rel=1e-14)
    assert fock.lp_norm_even(X, 2) == pytest.approx(1, rel=1e-14)
    assert fock.lp_norm_chaos(S(e(0)), 4, space) == pytest.approx(2 ** 0.25, rel=1e-14)


def test_lp_norm_headroom():
    space = FockSpace(2, 4)
    with pytest.raises(TruncationError):
        fock.lp_norm_chaos(I(e(0, 0, 0)), 4, space)


def test_lp_norm_two_is_isometry(rng):
    space = FockSpace(2, 6)
    F = random_chaos(rng, 3, 2)
    assert fock.lp_norm_chaos(F, 2, space) == pytest.approx(F.norm(), rel=1e-13)


def test_commutator_with_field():
    space = FockSpace(3, 5)
    P1 = FockOperator.vacuum_projection(space)
    assert fock.commutator_rstar(e(1), S(e(1)), space).max_abs_diff(P1, fock.faithful_columns(space, 1)) == 0
    assert fock.commutator_rstar(e(2), S(e(1)), space).max_abs_diff(
        P1 * 0, fock.faithful_columns(space, 1)) == 0


def test_commutator_with_chebyshev():
    space = FockSpace(2, 6)
    F = ch.chebyshev_eval(2, e(0))
    lhs = fock.commutator_rstar(e(0), F, space)
    rhs = fock.commutator_rstar_rhs(mv.directional(F, e(0)), space)
    # the right side is 1 x U_1 + U_1 x 1 applied around the vacuum projection
    X = fock.field_operator(e(0), space)
    P1 = FockOperator.vacuum_projection(space)
    cols = fock.faithful_columns(space, 2)
    assert lhs.max_abs_diff(rhs, cols) < 1e-14
    assert rhs.max_abs_diff(X @ P1 + P1 @ X, cols) < 1e-14


def test_commutator_random(rng):
    space = FockSpace(3, 6)
    cols = fock.faithful_columns(space, 3)
    for _ in range(3):
        F = random_chaos(rng, 3, 3)
        h = random_direction(rng, 3)
        lhs = fock.commutator_rstar(h, F, space)
        rhs = fock.commutator_rstar_rhs(mv.directional(F, h), space)
        assert lhs.max_abs_diff(rhs, cols) < 1e-12


def test_haagerup_bound(rng):
    space = FockSpace(2, 6)
    for n in range(1, 4):
        f = random_kernel(rng, n, 2)
        norm = fock.operator_norm(fock.chaos_to_operator(I(f), space))
        assert norm <= (n + 1) * f.norm() + 1e-9


def test_direction_outside_space():
    with pytest.raises(ValueError):
        fock.field_operator(e(5), FockSpace(2, 2))
