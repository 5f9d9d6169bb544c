"""Seeded random kernels, chaos expansions and words for identity checks.

Kernels are sparse: each index tuple is kept with probability ``density`` (at
least one entry is always kept), with coefficients uniform on the complex unit
disk.
"""

from __future__ import annotations

import itertools

import numpy as np

from .chaos import ChaosExpansion
from .kernel import Kernel

DENSITY = 0.3


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for an independent named substream of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def unit_disk(rng: np.random.Generator, size) -> np.ndarray:
    r = np.sqrt(rng.random(size))
    theta = rng.uniform(0, 2 * np.pi, size)
    return r * np.exp(1j * theta)


def random_kernel(rng: np.random.Generator, order: int, d: int, density: float = DENSITY,
                  real: bool = False) -> Kernel:
    if order == 0:
        c = unit_disk(rng, 1)[0]
        return Kernel.scalar(c.real if real else c)
    total = d ** order
    mask = rng.random(total) < density
    if not mask.any():
        mask[rng.integers(total)] = True
    flat = np.flatnonzero(mask)
    idx = np.stack(np.unravel_index(flat, (d,) * order), axis=1)
    vals = unit_disk(rng, flat.size)
    if real:
        vals = vals.real
    return Kernel(order, idx, vals)


def random_increasing_kernel(rng: np.random.Generator, order: int, d: int,
                             density: float = DENSITY) -> Kernel:
    """Kernel supported on strictly increasing index tuples."""
    tuples = list(itertools.combinations(range(d), order))
    if not tuples:
        raise ValueError(f"no strictly increasing {order}-tuples over {d} indices")
    mask = rng.random(len(tuples)) < density
    if not mask.any():
        mask[rng.integers(len(tuples))] = True
    chosen = np.array([t for t, m in zip(tuples, mask) if m], dtype=np.int64).reshape(-1, order)
    return Kernel(order, chosen, unit_disk(rng, len(chosen)))


def random_chaos(rng: np.random.Generator, degree: int, d: int, density: float = DENSITY,
                 degrees=None, real: bool = False) -> ChaosExpansion:
    """Expansion with one random component for every degree in ``degrees``
    (default ``0..degree``)."""
    degrees = range(degree + 1) if degrees is None else degrees
    return ChaosExpansion({n: random_kernel(rng, n, d, density, real) for n in degrees})


def random_increasing_chaos(rng: np.random.Generator, degree: int, d: int,
                            density: float = DENSITY) -> ChaosExpansion:
    comps = {0: Kernel.scalar(unit_disk(rng, 1)[0])}
    for n in range(1, degree + 1):
        comps[n] = random_increasing_kernel(rng, n, d, density)
    return ChaosExpansion(comps)


def random_direction(rng: np.random.Generator, d: int, unit: bool = False) -> Kernel:
    """Real order-1 kernel with standard normal coefficients."""
    h = rng.standard_normal(d)
    if unit:
        h /= np.linalg.norm(h)
    return Kernel.vector(h)


def random_word(rng: np.random.Generator, length: int, d: int, basis_only: bool = False) -> list[Kernel]:
    if basis_only:
        return [Kernel.basis(int(i)) for i in rng.integers(d, size=length)]
    return [random_direction(rng, d) for _ in range(length)]
