"""Free Malliavin calculus on finite chaos expansions.

Gradients of order ``p`` are stored as :class:`Gradient` objects: a
:class:`~wigner_calc.kernel.MultiKernel` with ``p`` parameter slots (the time
variables ``t_1..t_p``, expanded in the basis) and ``p + 1`` legs.  For a kernel
entry of ``f_n`` and positions ``c_1 < ... < c_p`` the derivative moves the
indices at those positions into the parameter slots and splits the remaining
indices into legs of degrees ``(c_1, c_2 - c_1 - 1, ..., n - 1 - c_p)``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence

import numpy as np
from scipy import integrate, sparse

from .chaos import ChaosExpansion, multiply
from .config import PreconditionError, TruncationError, settings
from .kernel import Kernel, MultiKernel

__all__ = [
    "AdaptedBiprocess",
    "Gradient",
    "adapted_projection",
    "cebron_product",
    "clark_ocone",
    "covariance_ou",
    "divergence_adjoint",
    "divergence_deterministic",
    "divergence_elementary",
    "elementary_biprocess",
    "gradient",
    "heisenberg_rhs",
    "ito_integral",
    "iterated_gradient",
    "stroock_reconstruct",
    "deterministic_multiprocess",
    "directional",
    "leibniz_gradient",
    "pair_gradient",
    "sobolev_closed_form",
    "sobolev_seminorm",
    "stroock_kernel",
    "variance_stroock",
]


class Gradient(MultiKernel):
    """Order-``p`` derivative: ``p`` parameter slots and ``p + 1`` legs."""

    __slots__ = ()

    def __init__(self, arity: int, blocks=None, params: int = 0):
        if params < 1 or arity != params + 1:
            raise ValueError(f"a gradient of order {params} must have arity {params + 1}, got {arity}")
        super().__init__(arity, blocks, params)

    @classmethod
    def of(cls, mk: MultiKernel) -> Gradient:
        return cls(mk.arity, mk.blocks, mk.params)

    @classmethod
    def empty(cls, order: int) -> Gradient:
        return cls(order + 1, {}, order)

    @property
    def order(self) -> int:
        return self.params


def _leg_indices_below_param(idx: np.ndarray, params: int) -> np.ndarray:
    if idx.shape[1] == params:
        return np.ones(idx.shape[0], dtype=bool)
    return (idx[:, params:] < idx[:, [0]]).all(axis=1)


class AdaptedBiprocess(Gradient):
    """Order-1 gradient whose component at block ``j`` only uses indices ``< j``."""

    __slots__ = ()

    def __init__(self, arity: int = 2, blocks=None, params: int = 1):
        super().__init__(arity, blocks, params)
        if params != 1:
            raise ValueError("adapted biprocesses have exactly one time parameter")
        for deg, k in self.blocks.items():
            if not _leg_indices_below_param(k.idx, 1).all():
                raise PreconditionError(f"block {deg} has leg indices not below the time index")


def _position_degrees(n: int, positions: Sequence[int]) -> tuple[int, ...]:
    bounds = [-1, *positions, n]
    return tuple(bounds[i + 1] - bounds[i] - 1 for i in range(len(bounds) - 1))


def gradient(F: ChaosExpansion, p: int = 1, symmetrized: bool = False) -> Gradient:
    """``nabla^p F`` (or ``D^p F = p! nabla^p F`` when ``symmetrized``)."""
    if p < 1:
        raise ValueError("gradient order must be at least 1; order 0 is the identity")
    pieces = []
    for n, f in F.components.items():
        for positions in itertools.combinations(range(n), p):
            rest = [c for c in range(n) if c not in positions]
            pieces.append((_position_degrees(n, positions), f.permute(list(positions) + rest)))
    G = Gradient._accumulate(p + 1, pieces, p)
    return G * math.factorial(p) if symmetrized else G


def iterated_gradient(F: ChaosExpansion, p: int) -> Gradient:
    """``nabla^p`` built by differentiating the last leg ``p`` times."""
    mk = F.to_multikernel()
    for _ in range(p):
        mk = mk.leg_gradient(mk.arity - 1)
    return Gradient.of(mk)


def pair_gradient(G: MultiKernel, directions: Sequence[Kernel]) -> MultiKernel:
    """Integrate every time variable against its direction (conjugated)."""
    if len(directions) != G.params:
        raise ValueError(f"need {G.params} directions, got {len(directions)}")
    mk = G.as_plain()
    for h in directions:
        mk = mk.pair_param(0, h)
    return mk


def directional(F: ChaosExpansion, h: Kernel) -> MultiKernel:
    """``nabla^h F = <nabla F, h>`` as an arity-2 multikernel."""
    return pair_gradient(gradient(F, 1), [h])


def stroock_kernel(F: ChaosExpansion, n: int, symmetrized: bool = False) -> Kernel:
    """``tau^{(n+1)}(nabla^n F)`` assembled as an order-``n`` kernel.

    With ``symmetrized`` the kernel is read off ``D^n F`` and divided by ``n!``.
    """
    if n == 0:
        return Kernel.scalar(F.trace())
    G = gradient(F, n, symmetrized=symmetrized)
    k = G.trace_all()
    return k / math.factorial(n) if symmetrized else k


def stroock_reconstruct(F: ChaosExpansion, symmetrized: bool = False) -> ChaosExpansion:
    return ChaosExpansion({n: stroock_kernel(F, n, symmetrized) for n in range(F.degree + 1)})


def _check_budget(n: int) -> None:
    if n > settings().max_degree:
        raise TruncationError(f"divergence would produce degree {n} above max_degree {settings().max_degree}")


def _interleave_perm(p: int, deg: Sequence[int]) -> list[int]:
    perm, cursor = [], p
    for q, a in enumerate(deg):
        perm.extend(range(cursor, cursor + a))
        cursor += a
        if q < p:
            perm.append(q)
    return perm


def _gradient_operator(n: int, p: int, d: int):
    """Explicit sparse matrix of ``nabla^p`` from ``H_n`` (basis size ``d``)."""
    size = d ** n
    shape = (d,) * n
    tuples = np.stack(np.unravel_index(np.arange(size), shape), axis=1)
    rows, offsets = [], {}
    for b, positions in enumerate(itertools.combinations(range(n), p)):
        rest = [c for c in range(n) if c not in positions]
        offsets[_position_degrees(n, positions)] = b * size
        rows.append(b * size + np.ravel_multi_index(tuple(tuples[:, list(positions) + rest].T), shape))
    rows = np.concatenate(rows)
    cols = np.tile(np.arange(size), len(offsets))
    M = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(len(offsets) * size, size))
    return M, offsets


def divergence_adjoint(U: MultiKernel, method: str = "slots") -> ChaosExpansion:
    """Adjoint of ``nabla^p``: ``<nabla^p F, U> = <F, delta^p U>``.

    ``method="slots"`` interleaves the parameter slots back between the legs
    (the inverse of the gradient's slot permutation).  ``method="matrix"``
    assembles ``nabla^p`` on each needed chaos as a sparse matrix and applies
    its conjugate transpose.
    """
    p = U.params
    if p < 1 or U.arity != p + 1:
        raise ValueError("divergence needs a gradient-shaped multikernel")
    for deg in U.blocks:
        _check_budget(p + sum(deg))
    if method == "slots":
        parts: dict[int, list[Kernel]] = {}
        for deg, k in U.blocks.items():
            parts.setdefault(k.order, []).append(k.permute(_interleave_perm(p, deg)))
        return ChaosExpansion({n: Kernel(n, np.concatenate([k.idx for k in ks]),
                                         np.concatenate([k.val for k in ks]))
                               for n, ks in parts.items()})
    if method != "matrix":
        raise ValueError(f"unknown divergence method {method!r}")
    d = max(max((k.bound for k in U.blocks.values()), default=0), 1)
    by_degree: dict[int, list] = {}
    for deg, k in U.blocks.items():
        by_degree.setdefault(k.order, []).append((deg, k))
    out = {}
    for n, blocks in by_degree.items():
        M, offsets = _gradient_operator(n, p, d)
        u = np.zeros(M.shape[0], dtype=complex)
        for deg, k in blocks:
            u[offsets[deg] + np.ravel_multi_index(tuple(k.idx.T), (d,) * n)] = k.val
        out[n] = Kernel.from_dense((M.conj().T @ u).reshape((d,) * n))
    return ChaosExpansion(out)


def divergence_deterministic(f: Kernel) -> ChaosExpansion:
    """``delta^p(f 1^{(p+1)}) = I_p(f)``."""
    return ChaosExpansion.integral(f)


def deterministic_multiprocess(f: Kernel) -> Gradient:
    """The constant gradient-shaped object ``f . 1^{(p+1)}``."""
    return Gradient(f.order + 1, {(0,) * (f.order + 1): f}, f.order)


def elementary_biprocess(A: ChaosExpansion, B: ChaosExpansion, h: Kernel) -> Gradient:
    """``(A x B) . h``: the biprocess ``t -> h(t) A x B``."""
    legs = A.to_multikernel().tensor(B.to_multikernel())
    return Gradient(2, {d: h.tensor(k) for d, k in legs.blocks.items()}, 1)


def divergence_elementary(A: ChaosExpansion, B: ChaosExpansion, h: Kernel) -> ChaosExpansion:
    """Divergence of ``(A x B) . h`` through the Voiculescu-type formula.

    ``A S(h) B - m1((id x tau x id) <(nabla x id + id x nabla)(A x B), h>)``.
    """
    if h.order != 1:
        raise ValueError("direction must be an order-1 kernel")
    AB = A.to_multikernel().tensor(B.to_multikernel())
    main = multiply(multiply(A, ChaosExpansion.field(h)), B)
    left = AB.leg_gradient(0).pair_param(0, h).trace_leg(1).contract_legs(0)
    right = AB.leg_gradient(1).pair_param(0, h).trace_leg(1).contract_legs(0)
    return main - ChaosExpansion.from_multikernel(left) - ChaosExpansion.from_multikernel(right)


def adapted_projection(G: MultiKernel) -> AdaptedBiprocess:
    """Keep, at every time block ``j``, the entries whose leg indices are all ``< j``."""
    if G.params != 1 or G.arity != 2:
        raise ValueError("adapted projection acts on order-1 gradients")
    kept = G.filter(lambda idx, deg: _leg_indices_below_param(idx, 1))
    return AdaptedBiprocess(2, kept.blocks, 1)


def ito_integral(U: MultiKernel) -> ChaosExpansion:
    """Integral of a biprocess by inserting the time index between the legs."""
    return ChaosExpansion.from_multikernel(U.as_plain().insert_param(0, 0))


def clark_ocone(F: ChaosExpansion) -> tuple[complex, AdaptedBiprocess]:
    """``(tau(F), Gamma(nabla F))`` for kernels supported on strictly increasing tuples."""
    for n, k in F.components.items():
        if n >= 2 and not np.all(np.diff(k.idx, axis=1) > 0):
            raise PreconditionError(f"component {n} has index tuples that are not strictly increasing")
    if F.degree == 0:
        return F.trace(), AdaptedBiprocess()
    return F.trace(), adapted_projection(gradient(F, 1))


def covariance_ou(F: ChaosExpansion, G: ChaosExpansion, method: str = "closed") -> complex:
    """``int_0^inf e^{-t} <P_t^{(2)} nabla F, nabla G*> dt``.

    ``method="closed"`` integrates each block exactly (weight ``1/(a+b+1)``);
    ``method="quadrature"`` evaluates the time integral numerically.
    """
    dF, dG = gradient(F, 1), gradient(G.adjoint(), 1)
    if method == "closed":
        return dF.scale_blocks(lambda deg: 1.0 / (sum(deg) + 1)).inner(dG)
    if method != "quadrature":
        raise ValueError(f"unknown covariance method {method!r}")
    weights = {deg: k.inner(dG.blocks[deg]) for deg, k in dF.blocks.items() if deg in dG.blocks}

    def integrand(t, part):
        z = sum(w * math.exp(-(sum(deg) + 1) * t) for deg, w in weights.items())
        return z.real if part == 0 else z.imag

    re = integrate.quad(integrand, 0, np.inf, args=(0,), epsabs=1e-14, epsrel=1e-13)[0]
    im = integrate.quad(integrand, 0, np.inf, args=(1,), epsabs=1e-14, epsrel=1e-13)[0]
    return complex(re, im)


def variance_stroock(F: ChaosExpansion) -> float:
    """``sum_{n >= 1} ||tau^{(n+1)}(nabla^n F)||^2``."""
    return float(sum(stroock_kernel(F, n).norm() ** 2 for n in range(1, F.degree + 1)))


def _single_leg(mk: MultiKernel, keep: int) -> MultiKernel:
    """Apply the trace to every leg except ``keep``."""
    for leg in reversed(range(mk.arity)):
        if leg != keep:
            mk = mk.trace_leg(leg)
    return mk


def cebron_product(A: ChaosExpansion, B: ChaosExpansion, p: int) -> complex:
    """``tau(AB)`` through the order-``p`` Cebron formula.

    For every ``p``-tuple ``t``, the first leg of ``nabla^p A`` at the reversed
    tuple is multiplied with the last leg of ``nabla^p B`` at ``t`` and traced.
    Requires that no degree below ``p`` occurs in both ``A`` and ``B``.
    """
    if p < 1:
        raise PreconditionError("order must be at least 1")
    shared = [n for n in A.components if n < p and n in B.components]
    if shared:
        raise PreconditionError(f"both functionals have components of degree {shared} below {p}")
    left = _single_leg(gradient(A, p), 0).permute_params(list(reversed(range(p))))
    right = _single_leg(gradient(B, p), p)
    total = 0j
    left_parts = left.components()
    for js, rb in right.components().items():
        la = left_parts.get(js)
        if la is None:
            continue
        total += multiply(ChaosExpansion.from_multikernel(la),
                          ChaosExpansion.from_multikernel(rb)).trace()
    return total


def sobolev_seminorm(F: ChaosExpansion, k: int, symmetrized: bool = False) -> float:
    """``||nabla^k F||^2`` (or ``||D^k F||^2``) summed over gradient components."""
    return gradient(F, k, symmetrized=symmetrized).norm_squared()


def sobolev_closed_form(F: ChaosExpansion, k: int) -> float:
    """``sum_n n (n-1) ... (n-k+1) ||f_n||^2``."""
    return float(sum(math.perm(n, k) * f.norm() ** 2 for n, f in F.components.items() if n >= k))


def leibniz_gradient(F: ChaosExpansion, G: ChaosExpansion, n: int) -> MultiKernel:
    """``nabla^n(FG)`` from the derivatives of the factors.

    ``sum_k (id^k x m1 x id^(n-k))(nabla^k F x nabla^(n-k) G)``.
    """
    total = None
    for k in range(n + 1):
        dF = F.to_multikernel() if k == 0 else gradient(F, k).as_plain()
        dG = G.to_multikernel() if k == n else gradient(G, n - k).as_plain()
        term = dF.tensor(dG).contract_legs(k)
        total = term if total is None else total + term
    return total


def heisenberg_rhs(U: MultiKernel) -> MultiKernel:
    """``U_t + (id x delta_s)(nabla_t x id) U_s + (delta_s x id)(id x nabla_t) U_s``.

    The two correction terms differentiate one leg of the biprocess and take the
    divergence in ``s`` over the two remaining adjacent legs.
    """
    if U.params != 1 or U.arity != 2:
        raise ValueError("expected an order-1 gradient")
    U = U.as_plain()
    first = U.leg_gradient(0).insert_param(1, 0)
    second = U.leg_gradient(1).insert_param(0, 0)
    return U + first + second
