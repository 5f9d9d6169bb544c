"""Finite Wigner chaos expansions ``F = sum_n I_n(f_n)`` and their algebra."""

from __future__ import annotations

import enum
import itertools
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .config import PreconditionError, TruncationError, settings, using
from .kernel import Kernel, MultiKernel

__all__ = [
    "ChaosExpansion",
    "DomainError",
    "SpectralMode",
    "adjoint_functional",
    "apply_spectral",
    "chebyshev_eval",
    "conditional_expectation",
    "dilate",
    "inner",
    "linear_combine",
    "multiply",
    "project_chaos",
    "represent_apply",
    "rotate_pair",
    "spectral_eigenvalue",
    "trace",
    "word_moment",
]


class DomainError(ValueError):
    pass


def _sum_kernels(order: int, kernels: list[Kernel]) -> Kernel:
    if not kernels:
        return Kernel.zero(order) if order else Kernel.scalar(0)
    if len(kernels) == 1:
        return kernels[0]
    return Kernel(order, np.concatenate([k.idx for k in kernels]),
                  np.concatenate([k.val for k in kernels]))


class ChaosExpansion:
    """Finite sum of multiple Wigner integrals, stored as ``{degree: kernel}``.

    Zero components are never stored, so two expansions are equal exactly when
    their component dictionaries are.
    """

    __slots__ = ("components",)

    def __init__(self, components: Mapping[int, Kernel] | None = None):
        clean = {}
        for n, k in (components or {}).items():
            if k.order != n:
                raise ValueError(f"component {n} holds a kernel of order {k.order}")
            if not k.is_zero():
                clean[int(n)] = k
        self.components = dict(sorted(clean.items()))

    @classmethod
    def zero(cls) -> ChaosExpansion:
        return cls()

    @classmethod
    def constant(cls, c: complex) -> ChaosExpansion:
        return cls({0: Kernel.scalar(c)})

    @classmethod
    def integral(cls, f: Kernel) -> ChaosExpansion:
        """``I_n(f)`` for a kernel of order ``n``."""
        return cls({f.order: f})

    @classmethod
    def field(cls, h: Kernel) -> ChaosExpansion:
        """Semicircular element ``S(h) = I_1(h)``."""
        if h.order != 1:
            raise ValueError("S(h) needs an order-1 kernel")
        return cls({1: h})

    @classmethod
    def from_multikernel(cls, mk: MultiKernel) -> ChaosExpansion:
        if mk.arity != 1 or mk.params:
            raise ValueError("only arity-1, parameter-free multikernels are functionals")
        return cls({d[0]: k for d, k in mk.blocks.items()})

    def to_multikernel(self) -> MultiKernel:
        return MultiKernel(1, {(n,): k for n, k in self.components.items()})

    def __getitem__(self, n: int) -> Kernel:
        if n in self.components:
            return self.components[n]
        return Kernel.zero(n) if n else Kernel.scalar(0)

    @property
    def degree(self) -> int:
        """Largest degree with a nonzero component (0 for constants and zero)."""
        return max(self.components, default=0)

    def degrees(self) -> list[int]:
        return list(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def trace(self) -> complex:
        return self[0].scalar_value()

    def centered(self) -> ChaosExpansion:
        return ChaosExpansion({n: k for n, k in self.components.items() if n})

    def norm(self) -> float:
        """``||F||_2``, computed through the isometry."""
        return math.sqrt(sum(k.norm() ** 2 for k in self.components.values()))

    def adjoint(self) -> ChaosExpansion:
        return ChaosExpansion({n: k.adjoint() for n, k in self.components.items()})

    def max_abs_diff(self, other: ChaosExpansion) -> float:
        with using(prune=0.0):
            diff = self - other
        return max((float(np.abs(k.val).max()) for k in diff.components.values() if k.nnz), default=0.0)

    def allclose(self, other: ChaosExpansion, tol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChaosExpansion):
            return NotImplemented
        return self.components.keys() == other.components.keys() and all(
            k == other.components[n] for n, k in self.components.items())

    __hash__ = None

    def __repr__(self) -> str:
        parts = ", ".join(f"{n}: nnz={k.nnz}" for n, k in self.components.items())
        return f"ChaosExpansion({{{parts}}})"

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = ChaosExpansion.constant(other)
        if not isinstance(other, ChaosExpansion):
            return NotImplemented
        return linear_combine([(1, self), (1, other)])

    __radd__ = __add__

    def __neg__(self) -> ChaosExpansion:
        return ChaosExpansion({n: -k for n, k in self.components.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = ChaosExpansion.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ChaosExpansion):
            return multiply(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return ChaosExpansion({n: k * other for n, k in self.components.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def map_components(self, fn) -> ChaosExpansion:
        """Replace each ``f_n`` by ``fn(n, f_n)``."""
        return ChaosExpansion({n: fn(n, k) for n, k in self.components.items()})


def linear_combine(terms: Iterable[tuple[complex, ChaosExpansion]]) -> ChaosExpansion:
    acc: dict[int, list[Kernel]] = defaultdict(list)
    for c, F in terms:
        if c == 0:
            continue
        for n, k in F.components.items():
            acc[n].append(k * c if c != 1 else k)
    return ChaosExpansion({n: _sum_kernels(n, ks) for n, ks in acc.items()})


def multiply(F: ChaosExpansion, G: ChaosExpansion) -> ChaosExpansion:
    """Product via ``I_n(f) I_m(g) = sum_p I_{n+m-2p}(f ~p g)``.

    Raises :class:`TruncationError` if a pair of nonzero components has
    ``n + m`` above ``max_degree``.
    """
    budget = settings().max_degree
    acc: dict[int, list[Kernel]] = defaultdict(list)
    for n, f in F.components.items():
        for m, g in G.components.items():
            if n + m > budget:
                raise TruncationError(f"product of degrees {n} and {m} exceeds max_degree {budget}")
            for p in range(min(n, m) + 1):
                acc[n + m - 2 * p].append(f.contract(g, p))
    return ChaosExpansion({n: _sum_kernels(n, ks) for n, ks in acc.items()})


def adjoint_functional(F: ChaosExpansion) -> ChaosExpansion:
    return F.adjoint()


def trace(F: ChaosExpansion) -> complex:
    return F.trace()


def inner(F: ChaosExpansion, G: ChaosExpansion) -> complex:
    """``tau(G* F) = sum_n <f_n, g_n>``."""
    return sum((k.inner(G.components[n]) for n, k in F.components.items() if n in G.components), 0j)


def project_chaos(F: ChaosExpansion, n: int) -> ChaosExpansion:
    return ChaosExpansion({n: F.components[n]} if n in F.components else {})


class SpectralMode(enum.Enum):
    OU = "ou"
    GENERATOR = "generator"
    NUMBER = "number"
    CAUCHY = "cauchy"
    PSEUDO_INVERSE = "pseudo_inverse"


def spectral_eigenvalue(mode: SpectralMode, n: int, t: float | None = None) -> float:
    """Eigenvalue of the chosen operator on the ``n``-th chaos."""
    if mode is SpectralMode.OU:
        if t is None or t < 0:
            raise ValueError("the semigroup needs a time t >= 0")
        return math.exp(-n * t)
    if mode is SpectralMode.GENERATOR:
        return -float(n)
    if mode is SpectralMode.NUMBER:
        return float(n)
    if mode is SpectralMode.CAUCHY:
        return -math.sqrt(n)
    if mode is SpectralMode.PSEUDO_INVERSE:
        return -1.0 / n if n else 0.0
    raise ValueError(f"unknown spectral mode {mode!r}")


def apply_spectral(F: ChaosExpansion, mode: SpectralMode | str, t: float | None = None) -> ChaosExpansion:
    mode = SpectralMode(mode)
    if mode is SpectralMode.OU:
        spectral_eigenvalue(mode, 0, t)
    return F.map_components(lambda n, k: k * spectral_eigenvalue(mode, n, t))


def dilate(F: ChaosExpansion, lam: complex) -> ChaosExpansion:
    """``F_lam = tau(F) + sum_n lam^n I_n(f_n)``."""
    return F.map_components(lambda n, k: k * lam ** n if n else k)


def _check_unit_direction(h: Kernel) -> None:
    if h.order != 1:
        raise PreconditionError("direction must be an order-1 kernel")
    if np.any(h.val.imag != 0):
        raise PreconditionError("direction must be real")
    if abs(h.norm() - 1.0) > 1e-12:
        raise PreconditionError(f"direction must have unit norm, got {h.norm():.3g}")


def chebyshev_eval(p: int, h: Kernel) -> ChaosExpansion:
    """``U_p(S(h))`` from ``U_{k+1} = X U_k - U_{k-1}`` with ``X = S(h)``."""
    _check_unit_direction(h)
    X = ChaosExpansion.field(h)
    prev, cur = ChaosExpansion.constant(1), X
    if p == 0:
        return prev
    for _ in range(p - 1):
        prev, cur = cur, X * cur - prev
    return cur


def conditional_expectation(F: ChaosExpansion, A: Iterable[int]) -> ChaosExpansion:
    """Keep the entries of every kernel whose indices all lie in ``A``."""
    A = sorted(set(A))
    return F.map_components(lambda n, k: k.restrict(A))


def rotate_kernel(f: Kernel, t: float, d: int) -> Kernel:
    """Substitute ``e_i -> cos(t) e_i + sin(t) e_{i+d}`` in every slot."""
    if f.order == 0:
        return f
    if f.nnz and f.idx.max() >= d:
        raise DomainError(f"kernel uses index {int(f.idx.max())} outside the first block 0..{d - 1}")
    c, s = math.cos(t), math.sin(t)
    idx_parts, val_parts = [], []
    for bits in itertools.product((0, 1), repeat=f.order):
        k = sum(bits)
        coeff = c ** (f.order - k) * s ** k
        if coeff == 0:
            continue
        idx_parts.append(f.idx + d * np.asarray(bits, dtype=np.int64))
        val_parts.append(f.val * coeff)
    if not idx_parts:
        return Kernel.zero(f.order)
    return Kernel(f.order, np.concatenate(idx_parts), np.concatenate(val_parts))


def rotate_pair(F: ChaosExpansion, t: float, d: int) -> ChaosExpansion:
    """Rotation automorphism mixing the first basis block with its copy ``d..2d-1``."""
    return F.map_components(lambda n, k: rotate_kernel(k, t, d))


def word_moment(word: Sequence[Kernel]) -> complex:
    """``tau(S(h_1) ... S(h_k))`` by folding the product formula."""
    budget = settings().max_degree
    if len(word) > budget:
        raise TruncationError(f"word of length {len(word)} exceeds max_degree {budget}")
    acc = ChaosExpansion.constant(1)
    for pos, h in enumerate(word):
        acc = acc * ChaosExpansion.field(h)
        left = len(word) - pos - 1
        # components above the number of remaining letters cannot reach degree 0
        acc = ChaosExpansion({n: k for n, k in acc.components.items() if n <= left})
    return acc.trace()


def represent_apply(F: ChaosExpansion, fields: Sequence, block):
    """Apply the operator standing for ``F`` to ``block``.

    ``fields[i]`` is any operator representing ``S(e_i)`` (a numpy array or
    scipy sparse matrix).  The operator of ``I_n(f)`` is expanded over its
    first slot with the product formula,
    ``op(I_n(f)) = sum_i S(e_i) op(I_{n-1}(f[i, ...])) - op(I_{n-2}(sum_i f[i, i, ...]))``,
    and every sub-kernel is evaluated once.
    """
    cache: dict = {}

    def op(f: Kernel):
        if f.is_zero():
            return block * 0
        key = (f.order, f.idx.tobytes(), f.val.tobytes())
        if key in cache:
            return cache[key]
        if f.order == 0:
            out = block * complex(f.val[0])
        else:
            out = None
            for i in np.unique(f.idx[:, 0]).tolist():
                if i >= len(fields):
                    raise DomainError(f"index {i} has no field operator (only {len(fields)})")
                term = fields[i] @ op(f.slice_first(i))
                out = term if out is None else out + term
            if f.order >= 2:
                diag = f.self_contract(1, 1)
                if not diag.is_zero():
                    out = out - op(diag)
        cache[key] = out
        return out

    total = block * 0
    for f in F.components.values():
        total = total + op(f)
    return total
