"""Independent moment oracles: non-crossing pairings, the Wick recursion, GUE sampling."""

from __future__ import annotations

import enum
import functools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .chaos import ChaosExpansion, represent_apply
from .kernel import Kernel

__all__ = [
    "GueConfig",
    "Statistic",
    "all_pairings",
    "catalan",
    "enumerate_nc_pairings",
    "gue_estimate",
    "gue_sample_family",
    "is_noncrossing",
    "wick_moment",
    "wick_recursive",
]

Pairing = tuple[tuple[int, int], ...]


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


@functools.lru_cache(maxsize=None)
def _nc_pairings(lo: int, hi: int) -> tuple[Pairing, ...]:
    # non-crossing pairings of lo..hi (inclusive); lo pairs with some j, then
    # the inside and the outside are paired independently
    if lo > hi:
        return ((),)
    out = []
    for j in range(lo + 1, hi + 1, 2):
        for inside in _nc_pairings(lo + 1, j - 1):
            for outside in _nc_pairings(j + 1, hi):
                out.append(tuple(sorted(((lo, j),) + inside + outside)))
    return tuple(out)


def enumerate_nc_pairings(k: int) -> list[Pairing]:
    """All non-crossing pair partitions of ``{1..k}`` (empty list for odd ``k``)."""
    if k % 2:
        return []
    return sorted(_nc_pairings(1, k))


def all_pairings(k: int) -> list[Pairing]:
    """Every pair partition of ``{1..k}``, crossing or not."""
    def rec(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for pos, partner in enumerate(rest):
            for tail in rec(rest[:pos] + rest[pos + 1:]):
                yield ((first, partner),) + tail
    if k % 2:
        return []
    return sorted(tuple(sorted(p)) for p in rec(tuple(range(1, k + 1))))


def is_noncrossing(pairing: Pairing) -> bool:
    for a, c in pairing:
        for b, d in pairing:
            if a < b < c < d:
                return False
    return True


def _covariance(h: Kernel, g: Kernel) -> complex:
    # tau(S(h) S(g)) = h ~1 g, the bilinear pairing (equal to <h, g> for real directions)
    return h.contract(g, 1).scalar_value()


def wick_moment(word: Sequence[Kernel]) -> complex:
    """``tau(S(h_1)...S(h_k))`` as a sum over non-crossing pairings."""
    k = len(word)
    if k % 2:
        return 0j
    cov = {}
    total = 0j
    for pairing in enumerate_nc_pairings(k):
        term = 1 + 0j
        for a, b in pairing:
            if (a, b) not in cov:
                cov[a, b] = _covariance(word[a - 1], word[b - 1])
            term *= cov[a, b]
            if term == 0:
                break
        total += term
    return total


def wick_recursive(word: Sequence[Kernel]) -> complex:
    """Moment via the recursion on the last letter.

    ``tau(S(h_1)...S(h_m) S(h)) = sum_k tau(S(h_k) S(h)) tau(h_1..h_{k-1}) tau(h_{k+1}..h_m)``.
    """
    word = list(word)

    @functools.lru_cache(maxsize=None)
    def seg(i: int, j: int) -> complex:
        if i == j:
            return 1 + 0j
        if (j - i) % 2:
            return 0j
        last = word[j - 1]
        total = 0j
        for k in range(i, j - 1, 2):
            c = _covariance(word[k], last)
            if c:
                total += c * seg(i, k) * seg(k + 1, j - 1)
        return total

    return seg(0, len(word))


@dataclass(frozen=True)
class GueConfig:
    """Matrix dimension ``N``, sample count ``M`` and the seed of the sample stream."""

    N: int
    M: int
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("GUE dimension must be at least 2")
        if self.M < 1:
            raise ValueError("need at least one sample")


class Statistic(enum.Enum):
    TRACE = "trace"
    OPNORM = "opnorm"


def gue_sample_family(cfg: GueConfig, count: int, sample: int = 0) -> list[np.ndarray]:
    """``count`` independent Hermitian matrices with entry variance ``1/N``.

    The matrices of sample ``sample`` are drawn from the stream seeded by
    ``(cfg.seed, sample)``, so any sample can be regenerated on its own.
    """
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, sample]))
    N = cfg.N
    out = []
    for _ in range(count):
        G = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)
        out.append((G + G.conj().T) / math.sqrt(2 * N))
    return out


def _word_matrix(word: Sequence[Kernel], mats: list[np.ndarray]) -> np.ndarray:
    N = mats[0].shape[0] if mats else 1
    out = np.eye(N, dtype=complex)
    for h in word:
        S = np.zeros((N, N), dtype=complex)
        for (i,), c in h.items():
            S += c * mats[i]
        out = out @ S
    return out


def _basis_size(obj) -> int:
    if isinstance(obj, ChaosExpansion):
        return max((k.bound for k in obj.components.values()), default=0)
    return max((h.bound for h in obj), default=0)


def gue_estimate(obj, cfg: GueConfig, statistic: Statistic | str = Statistic.TRACE) -> tuple[float, float]:
    """Monte Carlo mean and standard error of a matrix statistic.

    ``obj`` is a word (sequence of order-1 kernels) or a chaos expansion; the
    basis vector ``e_i`` is replaced by the ``i``-th GUE matrix of each sample.
    TRACE is the normalised trace (real part), OPNORM the largest singular value.
    """
    statistic = Statistic(statistic)
    d = max(_basis_size(obj), 1)
    values = []
    for s in range(cfg.M):
        mats = gue_sample_family(cfg, d, sample=s)
        if isinstance(obj, ChaosExpansion):
            X = represent_apply(obj, mats, np.eye(cfg.N, dtype=complex))
        else:
            X = _word_matrix(obj, mats)
        if statistic is Statistic.TRACE:
            values.append(np.trace(X).real / cfg.N)
        else:
            values.append(np.linalg.norm(X, 2))
    values = np.asarray(values)
    stderr = values.std(ddof=1) / math.sqrt(len(values)) if len(values) > 1 else float("nan")
    return float(values.mean()), float(stderr)
