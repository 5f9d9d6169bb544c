"""Length-truncated full Fock space over ``span(e_0..e_{d-1})``.

Words of length ``0..L`` are enumerated level by level; the vacuum (empty
word) has index 0 and a word of length ``k`` sits at
``offset(k) + (its letters read as a base-d number)``.  Operators are scipy
sparse matrices on that basis.

Operators attached to chaos expansions are exact *compressions*: the matrix
of ``I_n(f)`` is ``P X P`` where ``X`` is the operator on the full Fock space
and ``P`` projects onto words of length ``<= L``.  It is computed on an
extended space of level ``L + n`` where the first-slot recursion is exact on
every column of length ``<= L``.
"""

from __future__ import annotations

import enum
import functools
import math
from collections.abc import Iterable, Mapping

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from .chaos import ChaosExpansion, represent_apply
from .config import PreconditionError, TruncationError
from .kernel import Kernel, MultiKernel

__all__ = [
    "FockOperator",
    "FockSpace",
    "FockVector",
    "Ladder",
    "apply_chaos",
    "apply_ladder",
    "chaos_to_operator",
    "commutator_rstar",
    "commutator_rstar_rhs",
    "faithful_columns",
    "field_operator",
    "lp_norm_chaos",
    "lp_norm_even",
    "operator_norm",
    "second_quantize",
    "vacuum_expectation",
]


class Ladder(enum.Enum):
    LEFT_CREATE = "l"
    LEFT_ANNIHILATE = "l*"
    RIGHT_CREATE = "r"
    RIGHT_ANNIHILATE = "r*"


class FockSpace:
    """Words over ``d`` letters of length at most ``L``."""

    def __init__(self, d: int, L: int):
        if d < 1 or L < 0:
            raise ValueError("need d >= 1 and L >= 0")
        self.d = d
        self.L = L
        self.offsets = np.cumsum([0] + [d ** k for k in range(L + 1)])
        self.dim = int(self.offsets[-1])
        self._ladders: dict = {}

    def __repr__(self) -> str:
        return f"FockSpace(d={self.d}, L={self.L}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FockSpace) and (self.d, self.L) == (other.d, other.L)

    def __hash__(self) -> int:
        return hash((self.d, self.L))

    def extended(self, extra: int) -> FockSpace:
        return FockSpace(self.d, self.L + extra)

    def index(self, word: Iterable[int]) -> int:
        word = tuple(word)
        if len(word) > self.L:
            raise TruncationError(f"word of length {len(word)} beyond level {self.L}")
        r = 0
        for a in word:
            if not 0 <= a < self.d:
                raise ValueError(f"letter {a} outside 0..{self.d - 1}")
            r = r * self.d + a
        return int(self.offsets[len(word)]) + r

    def word(self, index: int) -> tuple[int, ...]:
        k = int(np.searchsorted(self.offsets, index, side="right")) - 1
        r = index - int(self.offsets[k])
        letters = []
        for _ in range(k):
            r, a = divmod(r, self.d)
            letters.append(a)
        return tuple(reversed(letters))

    def level(self, k: int) -> slice:
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    def lengths(self) -> np.ndarray:
        """Word length of every basis index."""
        return np.repeat(np.arange(self.L + 1), np.diff(self.offsets))

    def embed(self, small: FockSpace) -> np.ndarray:
        """Indices in ``self`` of the basis words of a lower-level space."""
        if small.d != self.d or small.L > self.L:
            raise ValueError("cannot embed a larger space")
        return np.arange(small.dim)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1
        return v

    def ladder_basis(self, kind: Ladder, i: int) -> sparse.csr_matrix:
        """Matrix of the ladder operator for the basis vector ``e_i``."""
        kind = Ladder(kind)
        key = (kind, i)
        if key not in self._ladders:
            if kind is Ladder.LEFT_ANNIHILATE:
                mat = self.ladder_basis(Ladder.LEFT_CREATE, i).T.tocsr()
            elif kind is Ladder.RIGHT_ANNIHILATE:
                mat = self.ladder_basis(Ladder.RIGHT_CREATE, i).T.tocsr()
            else:
                rows, cols = [], []
                for k in range(self.L):
                    src = np.arange(self.d ** k)
                    if kind is Ladder.LEFT_CREATE:
                        dst = i * self.d ** k + src
                    else:
                        dst = src * self.d + i
                    cols.append(self.offsets[k] + src)
                    rows.append(self.offsets[k + 1] + dst)
                rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
                cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
                mat = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(self.dim, self.dim))
            self._ladders[key] = mat
        return self._ladders[key]

    def ladder(self, kind: Ladder, h: Kernel) -> sparse.csr_matrix:
        kind = Ladder(kind)
        _check_direction(h, self.d)
        annihilate = kind in (Ladder.LEFT_ANNIHILATE, Ladder.RIGHT_ANNIHILATE)
        out = sparse.csr_matrix((self.dim, self.dim), dtype=complex)
        for (i,), c in h.items():
            out = out + (np.conj(c) if annihilate else c) * self.ladder_basis(kind, i)
        return out

    @functools.cached_property
    def fields(self) -> list[sparse.csr_matrix]:
        """``S(e_i) = l(e_i) + l*(e_i)`` for every basis letter."""
        return [(self.ladder_basis(Ladder.LEFT_CREATE, i)
                 + self.ladder_basis(Ladder.LEFT_ANNIHILATE, i)).tocsr() for i in range(self.d)]


def _check_direction(h: Kernel, d: int) -> None:
    if h.order != 1:
        raise ValueError("direction must be an order-1 kernel")
    if h.bound > d:
        raise ValueError(f"direction uses index {h.bound - 1} outside the {d} Fock letters")


class FockVector:
    """Finitely supported combination of words."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[tuple, complex] | None = None):
        self.coeffs = {tuple(w): complex(c) for w, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def vacuum(cls) -> FockVector:
        return cls({(): 1})

    @classmethod
    def from_kernel(cls, f: Kernel) -> FockVector:
        return cls(dict(f.items()))

    @classmethod
    def from_array(cls, space: FockSpace, arr) -> FockVector:
        arr = np.asarray(arr)
        return cls({space.word(int(i)): arr[i] for i in np.flatnonzero(arr)})

    def to_array(self, space: FockSpace) -> np.ndarray:
        out = np.zeros(space.dim, dtype=complex)
        for w, c in self.coeffs.items():
            out[space.index(w)] += c
        return out

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def __eq__(self, other) -> bool:
        return isinstance(other, FockVector) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"FockVector({self.coeffs})"


def apply_ladder(kind: Ladder | str, h: Kernel, v: FockVector, L: int) -> FockVector:
    """Ladder operator on a word combination, straight from the defining formulas.

    Creation on a nonzero word of length ``L`` raises :class:`TruncationError`.
    """
    kind = Ladder(kind)
    hd = dict(h.items())
    out: dict[tuple, complex] = {}

    def add(w, c):
        out[w] = out.get(w, 0j) + c

    for w, c in v.coeffs.items():
        if kind in (Ladder.LEFT_CREATE, Ladder.RIGHT_CREATE):
            if len(w) >= L:
                raise TruncationError(f"creation on a word of length {len(w)} at level {L}")
            for (i,), hc in hd.items():
                add((i,) + w if kind is Ladder.LEFT_CREATE else w + (i,), hc * c)
        elif w:
            # <g, h> with the conjugate on h
            if kind is Ladder.LEFT_ANNIHILATE:
                add(w[1:], c * np.conj(hd.get((w[0],), 0)))
            else:
                add(w[:-1], c * np.conj(hd.get((w[-1],), 0)))
    return FockVector(out)


class FockOperator:
    """Sparse matrix on a :class:`FockSpace`.

    ``degree`` records the chaos degree of the functional it came from (if
    any), which bounds how far it moves word lengths.
    """

    __slots__ = ("matrix", "space", "degree")

    def __init__(self, matrix, space: FockSpace, degree: int | None = None):
        matrix = sparse.csr_matrix(matrix, dtype=complex)
        if matrix.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match {space}")
        self.matrix = matrix
        self.space = space
        self.degree = degree

    @classmethod
    def identity(cls, space: FockSpace) -> FockOperator:
        return cls(sparse.identity(space.dim, dtype=complex, format="csr"), space, 0)

    @classmethod
    def vacuum_projection(cls, space: FockSpace) -> FockOperator:
        """``P_1 = |Omega><Omega|``."""
        return cls(sparse.csr_matrix(([1.0], ([0], [0])), shape=(space.dim, space.dim)), space)

    def _combine_degree(self, other, op) -> int | None:
        if self.degree is None or other.degree is None:
            return None
        return op(self.degree, other.degree)

    def __add__(self, other: FockOperator) -> FockOperator:
        return FockOperator(self.matrix + other.matrix, self.space, self._combine_degree(other, max))

    def __sub__(self, other: FockOperator) -> FockOperator:
        return FockOperator(self.matrix - other.matrix, self.space, self._combine_degree(other, max))

    def __mul__(self, c) -> FockOperator:
        return FockOperator(self.matrix * c, self.space, self.degree)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix, self.space,
                                self._combine_degree(other, lambda a, b: a + b))
        return self.matrix @ other

    @property
    def H(self) -> FockOperator:
        return FockOperator(self.matrix.conj().T, self.space, self.degree)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_abs_diff(self, other: FockOperator, columns=None) -> float:
        diff = self.matrix - other.matrix
        if columns is not None:
            diff = diff[:, columns]
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0


def field_operator(h: Kernel, space: FockSpace) -> FockOperator:
    """``S(h) = l(h) + l*(h)``."""
    return FockOperator(space.ladder(Ladder.LEFT_CREATE, h) + space.ladder(Ladder.LEFT_ANNIHILATE, h),
                        space, 1)


def second_quantize(T, space: FockSpace) -> FockOperator:
    """``F(T)``: the tensor power ``T^{(k)}`` on every level ``k``."""
    T = np.asarray(T, dtype=complex)
    if T.shape != (space.d, space.d):
        raise ValueError(f"expected a {space.d}x{space.d} matrix")
    if np.linalg.norm(T, 2) > 1 + 1e-12:
        raise PreconditionError("second quantization needs a contraction (||T|| <= 1)")
    blocks = [sparse.identity(1, dtype=complex, format="csr")]
    Ts = sparse.csr_matrix(T)
    for _ in range(space.L):
        blocks.append(sparse.kron(blocks[-1], Ts, format="csr"))
    return FockOperator(sparse.block_diag(blocks, format="csr"), space)


def _extended_fields(space: FockSpace, degree: int) -> tuple[FockSpace, list]:
    ext = space.extended(degree)
    return ext, ext.fields


def apply_chaos(F: ChaosExpansion, space: FockSpace, block, extend: bool = True) -> np.ndarray:
    """``P X block`` for ``block`` supported on words of length ``<= L``.

    ``block`` is a vector or a dense/sparse matrix with ``space.dim`` rows.
    With ``extend=False`` the recursion runs on ``space`` itself, which is
    exact only for columns of length ``<= L - deg F``.
    """
    if not extend:
        return represent_apply(F, space.fields, block)
    ext, fields = _extended_fields(space, F.degree)
    if sparse.issparse(block):
        padded = sparse.vstack([block, sparse.csr_matrix((ext.dim - space.dim, block.shape[1]))]).tocsr()
    else:
        block = np.asarray(block, dtype=complex)
        padded = np.zeros((ext.dim,) + block.shape[1:], dtype=complex)
        padded[:space.dim] = block
    out = represent_apply(F, fields, padded)
    return out[:space.dim]


def chaos_to_operator(F: ChaosExpansion, space: FockSpace) -> FockOperator:
    """Compression to ``space`` of the operator of ``F``."""
    bound = max((k.bound for k in F.components.values()), default=0)
    if bound > space.d:
        raise ValueError(f"functional uses index {bound - 1} outside the {space.d} Fock letters")
    eye = sparse.identity(space.dim, dtype=complex, format="csr")
    return FockOperator(apply_chaos(F, space, eye), space, F.degree)


def vacuum_expectation(X: FockOperator) -> complex:
    """``<X Omega, Omega>``."""
    return complex(X.matrix[0, 0])


def _moment_chain(apply, apply_adj, p: int, dim: int) -> float:
    if p < 2 or p % 2:
        raise ValueError("p must be an even integer >= 2")
    k = p // 2
    v = np.zeros(dim, dtype=complex)
    v[0] = 1
    # tau((X*X)^k) = ||(X*X)^{k/2} Omega||^2 or ||X (X*X)^{(k-1)/2} Omega||^2
    for step in range(k):
        v = apply(v) if step % 2 == 0 else apply_adj(v)
    return float(np.vdot(v, v).real) ** (1 / p)


def lp_norm_even(X: FockOperator, p: int) -> float:
    """``tau(|X|^p)^(1/p)`` for even ``p``.

    Exact when ``(p/2) * degree <= L``; otherwise :class:`TruncationError`.
    """
    if X.degree is None:
        raise PreconditionError("operator has no recorded degree; headroom cannot be checked")
    if (p // 2) * X.degree > X.space.L:
        raise TruncationError(f"level {X.space.L} is too small for p={p} at degree {X.degree}")
    A, AH = X.matrix, X.matrix.conj().T.tocsr()
    return _moment_chain(lambda v: A @ v, lambda v: AH @ v, p, X.space.dim)


def lp_norm_chaos(F: ChaosExpansion, p: int, space: FockSpace) -> float:
    """``||F||_p`` for even ``p`` computed with vectors only."""
    if (p // 2) * F.degree > space.L:
        raise TruncationError(f"level {space.L} is too small for p={p} at degree {F.degree}")
    Fa = F.adjoint()
    # the headroom check keeps every intermediate vector inside the faithful range
    return _moment_chain(lambda v: apply_chaos(F, space, v, extend=False),
                         lambda v: apply_chaos(Fa, space, v, extend=False), p, space.dim)


def operator_norm(X: FockOperator) -> float:
    """Largest singular value of the matrix."""
    if X.space.dim <= 2000:
        return float(np.linalg.norm(X.to_dense(), 2))
    return float(sparse_linalg.svds(X.matrix, k=1, return_singular_vectors=False, tol=1e-12)[0])


def commutator_rstar(h: Kernel, F: ChaosExpansion, space: FockSpace) -> FockOperator:
    """``[r*(h), X]`` with ``X`` the compression of ``F``.

    Agrees with the compression of the true commutator on columns of length
    ``<= L - deg F`` (see :func:`faithful_columns`).
    """
    R = FockOperator(space.ladder(Ladder.RIGHT_ANNIHILATE, h), space)
    X = chaos_to_operator(F, space)
    return R @ X - X @ R


def faithful_columns(space: FockSpace, degree: int) -> np.ndarray:
    return np.flatnonzero(space.lengths() <= space.L - degree)


def commutator_rstar_rhs(grad_h: MultiKernel, space: FockSpace) -> FockOperator:
    """``sum a P_1 b`` over the elementary terms ``a x b`` of an arity-2 multikernel.

    ``a P_1 b`` is the rank-one map ``|a Omega><b* Omega|``; the row vector
    ``<Omega| b`` has entry ``b(reversed word)``.
    """
    if grad_h.arity != 2 or grad_h.params:
        raise ValueError("expected a parameter-free arity-2 multikernel")
    rows, cols, vals = [], [], []
    for (a, b), k in grad_h.blocks.items():
        for key, c in k.items():
            rows.append(space.index(key[:a]))
            cols.append(space.index(key[a:][::-1]))
            vals.append(c)
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(space.dim, space.dim), dtype=complex)
    return FockOperator(mat, space)
