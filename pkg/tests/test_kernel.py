import numpy as np
import pytest

from wigner_calc.config import TruncationError, using
from wigner_calc.instances import random_kernel
from wigner_calc.kernel import (ContractionArityError, Kernel, MultiKernel, adjoint, contract,
                                inner_product, tensor_product)

e = Kernel.basis


def test_adjoint_reverses_elementary_tensor():
    assert adjoint(e(1, 2)) == e(2, 1)


def test_adjoint_conjugates():
    assert adjoint(e(1, coeff=1j)) == e(1, coeff=-1j)


def test_adjoint_involution(rng):
    for order in range(6):
        f = random_kernel(rng, order, 5)
        assert adjoint(adjoint(f)) == f


def test_tensor_basis():
    assert tensor_product(e(1), e(2)).entries == {(1, 2): 1}


def test_tensor_scalar_unit():
    assert tensor_product(Kernel.scalar(2), e(3)) == e(3, coeff=2)


def test_tensor_norm_multiplicative(rng):
    f, g = random_kernel(rng, 2, 4), random_kernel(rng, 3, 4)
    assert tensor_product(f, g).norm() == pytest.approx(f.norm() * g.norm(), rel=1e-13)


def test_tensor_budget():
    with using(max_degree=3):
        with pytest.raises(TruncationError):
            tensor_product(e(1, 2), e(3, 4))


def test_contract_delta():
    assert contract(e(1, 2), e(2, 3), 1) == e(1, 3)


def test_contract_orthogonal():
    assert contract(e(1, 2), e(3, 4), 1).is_zero()


def test_contract_p0_is_tensor(rng):
    f, g = random_kernel(rng, 2, 4), random_kernel(rng, 2, 4)
    assert contract(f, g, 0) == tensor_product(f, g)


def test_contract_nested_order():
    # the last slot of f meets the first slot of g, then inwards
    f = e(0, 1, 2)
    assert contract(f, e(2, 1, 5), 2) == e(0, 5)
    assert contract(f, e(1, 2, 5), 2).is_zero()


def test_contract_arity_error():
    with pytest.raises(ContractionArityError):
        contract(e(1), e(1, 2), 2)


def test_contract_dense_matches_sparse(rng):
    for p in range(4):
        f, g = random_kernel(rng, 3, 4, density=0.6), random_kernel(rng, 3, 4, density=0.6)
        assert f.contract(g, p, "dense").allclose(f.contract(g, p, "sparse"), 1e-13)


def test_inner_examples():
    assert inner_product(e(1, 2), e(1, 2)) == 1
    assert inner_product(e(1), e(1, 1)) == 0


def test_inner_sum_of_squares(rng):
    f = random_kernel(rng, 3, 5)
    assert inner_product(f, f).real == pytest.approx(np.sum(np.abs(f.val) ** 2), rel=1e-14)
    assert abs(inner_product(f, f).imag) < 1e-14


def test_canonical_form():
    f = Kernel(2, [[1, 0], [0, 1], [1, 0]], [1, 2, 3])
    assert f.idx.tolist() == [[0, 1], [1, 0]]
    assert f.val.tolist() == [2, 4]


def test_pruning():
    f = Kernel(1, [[0], [1]], [1e-16, 1.0])
    assert f.entries == {(1,): 1}


def test_order_zero_single_entry():
    assert Kernel.scalar(0).nnz == 1
    assert Kernel.scalar(3).scalar_value() == 3


def test_dense_round_trip(rng):
    f = random_kernel(rng, 3, 4)
    assert Kernel.from_dense(f.to_dense(4)) == f


def test_multikernel_validates_orders():
    with pytest.raises(ValueError):
        MultiKernel(2, {(1, 1): e(1)})
