import math

import numpy as np
import pytest

from wigner_calc import chaos as ch
from wigner_calc import oracle
from wigner_calc.chaos import ChaosExpansion
from wigner_calc.config import using
from wigner_calc.instances import random_direction, random_word
from wigner_calc.kernel import Kernel

e = Kernel.basis


def test_small_pairings():
    assert oracle.enumerate_nc_pairings(2) == [((1, 2),)]
    assert oracle.enumerate_nc_pairings(4) == [((1, 2), (3, 4)), ((1, 4), (2, 3))]
    assert oracle.enumerate_nc_pairings(3) == []


@pytest.mark.parametrize("k", range(0, 13, 2))
def test_pairing_counts_are_catalan(k):
    assert len(oracle.enumerate_nc_pairings(k)) == oracle.catalan(k // 2)
    assert oracle.catalan(4) == 14


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_nc_pairings_are_the_noncrossing_ones(k):
    brute = [p for p in oracle.all_pairings(k) if oracle.is_noncrossing(p)]
    assert brute == oracle.enumerate_nc_pairings(k)
    assert len(oracle.all_pairings(k)) == math.prod(range(1, k, 2))


def test_wick_examples():
    assert oracle.wick_moment([e(1), e(2), e(2), e(1)]) == 1
    assert oracle.wick_moment([e(1), e(2), e(1), e(2)]) == 0


@pytest.mark.parametrize("k", range(1, 6))
def test_even_powers(rng, k):
    h = random_direction(rng, 3)
    assert oracle.wick_moment([h] * (2 * k)) == pytest.approx(oracle.catalan(k) * h.norm() ** (2 * k),
                                                              rel=1e-12)


def test_recursive_edge_cases():
    assert oracle.wick_recursive([]) == 1
    assert oracle.wick_recursive([e(0)]) == 0


def test_recursive_matches_enumeration(rng):
    for _ in range(20):
        word = random_word(rng, 8, 3)
        assert oracle.wick_recursive(word) == pytest.approx(oracle.wick_moment(word), abs=1e-12)


def test_product_formula_matches_oracle(rng):
    with using(max_degree=10):
        for length in range(11):
            word = random_word(rng, length, 3)
            assert ch.word_moment(word) == pytest.approx(oracle.wick_moment(word), rel=1e-10, abs=1e-12)


def test_gue_hermitian_and_reproducible():
    cfg = oracle.GueConfig(20, 1, seed=7)
    a = oracle.gue_sample_family(cfg, 2)
    b = oracle.gue_sample_family(cfg, 2)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
        assert np.array_equal(x, x.conj().T)
    c = oracle.gue_sample_family(cfg, 2, sample=1)
    assert not np.array_equal(a[0], c[0])


def test_gue_second_moment():
    cfg = oracle.GueConfig(300, 200, seed=1)
    est, err = oracle.gue_estimate([e(0), e(0)], cfg)
    assert abs(est - 1) < 0.05


def test_gue_fourth_moment_and_odd_word():
    cfg = oracle.GueConfig(300, 200, seed=2)
    est, err = oracle.gue_estimate([e(0)] * 4, cfg)
    assert abs(est - 2) <= 3 * err
    est, err = oracle.gue_estimate([e(0)] * 3, cfg)
    assert abs(est) <= 3 * err


def test_gue_opnorm_haagerup():
    cfg = oracle.GueConfig(500, 3, seed=3)
    est, _ = oracle.gue_estimate(ChaosExpansion.integral(e(0, 0)), cfg, "opnorm")
    assert est <= 3 * 1 + 0.3


def test_gue_config_validation():
    with pytest.raises(ValueError):
        oracle.GueConfig(1, 5)
    with pytest.raises(ValueError):
        oracle.GueConfig(10, 0)
