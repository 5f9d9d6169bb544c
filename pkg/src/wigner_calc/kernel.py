"""Sparse tensors over a fixed orthonormal basis of L^2(R_+).

A :class:`Kernel` of order ``n`` is a finitely supported map from ``n``-tuples of
basis indices to complex coefficients; it stands for the function
``f = sum c_{i1..in} e_{i1} x ... x e_{in}`` in L^2(R_+^n).  Storage is COO:
an ``(nnz, n)`` integer array of index tuples kept in lexicographic order and a
matching complex coefficient vector.  Every constructor canonicalises: duplicate
tuples are summed and coefficients below the prune threshold are dropped.

A :class:`MultiKernel` groups kernels by a degree vector ``(n_1, ..., n_k)`` and
represents an element of ``H_{n_1} x ... x H_{n_k}`` (one "leg" per entry of the
degree vector).  It optionally carries leading *parameter* slots, which is how
gradients store their time variables: a block with ``params=p`` and degree vector
``(n_1..n_k)`` holds a kernel of order ``p + sum(n_i)`` whose first ``p`` slots
are the parameter indices.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping

import numpy as np

from .config import PreconditionError, TruncationError, settings, using

__all__ = [
    "ContractionArityError",
    "Kernel",
    "MultiKernel",
    "adjoint",
    "contract",
    "inner_product",
    "tensor_product",
]


class ContractionArityError(ValueError):
    pass


def _empty(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros((0, order), dtype=np.int64), np.zeros(0, dtype=complex)


def _canonicalize(order, idx, val, eps):
    if order == 0:
        total = complex(val.sum()) if val.size else 0j
        if abs(total) < eps:
            total = 0j
        return np.zeros((1, 0), dtype=np.int64), np.array([total])
    if val.size == 0:
        return _empty(order)
    if val.size > 1:
        perm = np.lexsort(idx.T[::-1])
        idx = idx[perm]
        val = val[perm]
        starts = np.empty(len(val), dtype=bool)
        starts[0] = True
        np.any(idx[1:] != idx[:-1], axis=1, out=starts[1:])
        if not starts.all():
            first = np.flatnonzero(starts)
            val = np.add.reduceat(val, first)
            idx = idx[first]
    keep = np.abs(val) >= eps
    if not keep.all():
        idx, val = idx[keep], val[keep]
    return np.ascontiguousarray(idx), val


def _row_keys(idx: np.ndarray) -> np.ndarray:
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    return idx.view(np.dtype((np.void, idx.dtype.itemsize * idx.shape[1]))).ravel()


class Kernel:
    """Order-``n`` sparse tensor with complex coefficients.

    Parameters
    ----------
    order : int
        Number of tensor slots.
    idx : array_like of int, shape (nnz, order), optional
        Index tuples; repeated tuples are summed.
    val : array_like of complex, shape (nnz,), optional
        Coefficients.

    Kernels are immutable values; all arithmetic returns new objects.
    """

    __slots__ = ("order", "idx", "val", "_entries")

    def __init__(self, order: int, idx=None, val=None, *, _canonical: bool = False):
        order = int(order)
        if order < 0:
            raise ValueError("kernel order must be non-negative")
        if val is None:
            idx, val = _empty(order)
        else:
            val = np.asarray(val, dtype=complex).ravel()
            idx = np.asarray(() if idx is None else idx, dtype=np.int64)
            if order == 0:
                idx = np.zeros((val.size, 0), dtype=np.int64)
            elif idx.size == 0:
                idx = np.zeros((0, order), dtype=np.int64)
            if idx.ndim != 2 or idx.shape[1] != order:
                raise ValueError(f"index tuples must have length {order}, got shape {idx.shape}")
            if idx.shape[0] != val.size:
                raise ValueError("index and value arrays disagree in length")
            if idx.size and idx.min() < 0:
                raise ValueError("basis indices must be non-negative")
        if not _canonical or order == 0:
            idx, val = _canonicalize(order, idx, val, settings().prune)
        self.order = order
        self.idx = idx
        self.val = val
        self._entries = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> Kernel:
        return cls(order)

    @classmethod
    def scalar(cls, c: complex) -> Kernel:
        return cls(0, None, [c])

    @classmethod
    def basis(cls, *indices: int, coeff: complex = 1.0) -> Kernel:
        """Elementary tensor ``coeff * e_{i1} x ... x e_{in}``."""
        return cls(len(indices), [list(indices)], [coeff])

    @classmethod
    def vector(cls, coeffs) -> Kernel:
        """Order-1 kernel ``sum_i coeffs[i] e_i``."""
        coeffs = np.asarray(coeffs, dtype=complex).ravel()
        return cls(1, np.arange(coeffs.size)[:, None], coeffs)

    @classmethod
    def from_entries(cls, order: int, entries: Mapping[tuple, complex]) -> Kernel:
        if not entries:
            return cls(order)
        keys = list(entries)
        return cls(order, np.array(keys, dtype=np.int64).reshape(len(keys), order),
                   [entries[k] for k in keys])

    @classmethod
    def from_dense(cls, arr) -> Kernel:
        arr = np.asarray(arr, dtype=complex)
        if arr.ndim == 0:
            return cls.scalar(complex(arr))
        nz = np.nonzero(np.abs(arr) >= settings().prune)
        # C-order nonzero scan is already lexicographic
        return cls(arr.ndim, np.stack(nz, axis=1), arr[nz], _canonical=True)

    # -- views ------------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.val.size)

    @property
    def bound(self) -> int:
        """Smallest ``d`` such that every stored index is ``< d``."""
        if self.order == 0 or self.idx.size == 0:
            return 0
        return int(self.idx.max()) + 1

    @property
    def entries(self) -> dict[tuple, complex]:
        if self._entries is None:
            self._entries = dict(self.items())
        return self._entries

    def items(self) -> Iterator[tuple[tuple, complex]]:
        return zip(map(tuple, self.idx.tolist()), self.val.tolist())

    def __getitem__(self, key) -> complex:
        return self.entries.get(tuple(key), 0j)

    def scalar_value(self) -> complex:
        if self.order != 0:
            raise ValueError("not an order-0 kernel")
        return complex(self.val[0])

    def is_zero(self) -> bool:
        return not np.any(self.val)

    def to_dense(self, size: int | None = None) -> np.ndarray:
        if self.order == 0:
            return np.array(self.val[0])
        size = self.bound if size is None else size
        if size < self.bound:
            raise ValueError(f"dense size {size} smaller than index bound {self.bound}")
        arr = np.zeros((size,) * self.order, dtype=complex)
        if self.nnz:
            arr[tuple(self.idx.T)] = self.val
        return arr

    def __repr__(self) -> str:
        if self.order == 0:
            return f"Kernel.scalar({self.val[0]!r})"
        head = ", ".join(f"{k}: {v:.6g}" for k, v in list(self.items())[:4])
        more = ", ..." if self.nnz > 4 else ""
        return f"Kernel(order={self.order}, {{{head}{more}}})"

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Kernel):
            return NotImplemented
        return (self.order == other.order and self.idx.shape == other.idx.shape
                and np.array_equal(self.idx, other.idx) and np.array_equal(self.val, other.val))

    __hash__ = None

    def max_abs_diff(self, other: Kernel) -> float:
        if self.order != other.order:
            raise ValueError("orders differ")
        with using(prune=0.0):
            d = self - other
        return float(np.abs(d.val).max()) if d.nnz else 0.0

    def allclose(self, other: Kernel, tol: float = 1e-12) -> bool:
        return self.order == other.order and self.max_abs_diff(other) <= tol

    # -- linear structure -------------------------------------------------

    def __add__(self, other: Kernel) -> Kernel:
        if not isinstance(other, Kernel):
            return NotImplemented
        if self.order != other.order:
            raise ValueError(f"cannot add kernels of order {self.order} and {other.order}")
        return Kernel(self.order, np.concatenate([self.idx, other.idx]),
                      np.concatenate([self.val, other.val]))

    def __neg__(self) -> Kernel:
        return Kernel(self.order, self.idx, -self.val, _canonical=True)

    def __sub__(self, other: Kernel) -> Kernel:
        return self + (-other)

    def __mul__(self, c) -> Kernel:
        if isinstance(c, Kernel):
            return NotImplemented
        c = complex(c)
        if c == 0:
            return Kernel(self.order) if self.order else Kernel.scalar(0)
        return Kernel(self.order, self.idx, self.val * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> Kernel:
        return self * (1 / complex(c))

    def conj(self) -> Kernel:
        return Kernel(self.order, self.idx, self.val.conj(), _canonical=True)

    # -- structural operations -------------------------------------------

    def adjoint(self) -> Kernel:
        """Mirror adjoint ``f*(t_1..t_n) = conj f(t_n..t_1)``."""
        return Kernel(self.order, self.idx[:, ::-1], self.val.conj())

    def permute(self, perm) -> Kernel:
        """New kernel whose slot ``k`` is old slot ``perm[k]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.order)):
            raise ValueError(f"{perm} is not a permutation of {self.order} slots")
        if perm == sorted(perm):
            return self
        return Kernel(self.order, self.idx[:, perm], self.val)

    def tensor(self, other: Kernel) -> Kernel:
        """Concatenation ``(f x g)(a, b) = f(a) g(b)`` with no degree budget check."""
        n, m = self.order, other.order
        if n == 0:
            return other * self.val[0]
        if m == 0:
            return self * other.val[0]
        a, b = self.nnz, other.nnz
        idx = np.concatenate([np.repeat(self.idx, b, axis=0), np.tile(other.idx, (a, 1))], axis=1)
        val = np.outer(self.val, other.val).ravel()
        # (row of f, row of g) enumeration is already lexicographic
        return Kernel(n + m, idx, val, _canonical=True) if np.all(np.abs(val) >= settings().prune) \
            else Kernel(n + m, idx, val)

    def contract(self, other: Kernel, p: int, method: str = "auto") -> Kernel:
        """Nested contraction of order ``p``.

        ``(f ~p g)(a, b) = sum_s f(a, s_p, ..., s_1) g(s_1, ..., s_p, b)``; the last
        ``p`` slots of ``f`` are read in reverse and nothing is conjugated.

        ``method`` is ``"dense"`` (numpy tensordot), ``"sparse"`` (hash join on
        the shared indices) or ``"auto"``.
        """
        n, m = self.order, other.order
        if p < 0 or p > min(n, m):
            raise ContractionArityError(f"cannot contract {p} slots of orders {n} and {m}")
        if p == 0:
            return self.tensor(other)
        out = n + m - 2 * p
        if method == "auto":
            method = self._pick_method(other, p)
        if method == "dense":
            size = max(self.bound, other.bound, 1)
            axes_f = list(range(n - 1, n - p - 1, -1))
            res = np.tensordot(self.to_dense(size), other.to_dense(size), axes=(axes_f, list(range(p))))
            return Kernel.from_dense(res) if out else Kernel.scalar(complex(res))
        if method != "sparse":
            raise ValueError(f"unknown contraction method {method!r}")
        groups = defaultdict(list)
        for key, c in other.items():
            groups[key[:p]].append((key[p:], c))
        acc = defaultdict(complex)
        for key, c in self.items():
            head, tail = key[:n - p], key[n - p:][::-1]
            for rest, d in groups.get(tail, ()):
                acc[head + rest] += c * d
        return Kernel.from_entries(out, acc) if out else Kernel.scalar(sum(acc.values()))

    def _pick_method(self, other: Kernel, p: int) -> str:
        if self.nnz * other.nnz <= 4096:
            return "sparse"
        size = max(self.bound, other.bound, 1)
        limit = settings().dense_limit
        orders = (self.order, other.order, self.order + other.order - 2 * p)
        if all(float(size) ** k <= limit for k in orders):
            return "dense"
        return "sparse"

    def self_contract(self, boundary: int, p: int) -> Kernel:
        """Contract the ``p`` slots left of ``boundary`` against the ``p`` slots to its right.

        Slot ``boundary - 1 - q`` is paired with slot ``boundary + q``; this is the
        nested contraction performed in place inside a concatenated tensor.
        """
        if p == 0:
            return self
        if boundary - p < 0 or boundary + p > self.order:
            raise ContractionArityError("self-contraction runs past the kernel slots")
        mask = np.ones(self.nnz, dtype=bool)
        for q in range(p):
            mask &= self.idx[:, boundary - 1 - q] == self.idx[:, boundary + q]
        keep = [c for c in range(self.order) if not boundary - p <= c < boundary + p]
        return Kernel(self.order - 2 * p, self.idx[mask][:, keep], self.val[mask])

    def inner(self, other: Kernel) -> complex:
        """``<f, g> = sum f[i] conj(g[i])``; zero across different orders."""
        if self.order != other.order:
            return 0j
        if self.order == 0:
            return complex(self.val[0] * np.conj(other.val[0]))
        if not self.nnz or not other.nnz:
            return 0j
        _, i, j = np.intersect1d(_row_keys(self.idx), _row_keys(other.idx),
                                 assume_unique=True, return_indices=True)
        return complex(np.sum(self.val[i] * other.val[j].conj()))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.val) ** 2)))

    def restrict(self, allowed: Iterable[int]) -> Kernel:
        """Keep entries whose every index lies in ``allowed``."""
        if self.order == 0:
            return self
        mask = np.isin(self.idx, np.fromiter(allowed, dtype=np.int64)).all(axis=1)
        return Kernel(self.order, self.idx[mask], self.val[mask], _canonical=True)

    def filter(self, mask: np.ndarray) -> Kernel:
        return Kernel(self.order, self.idx[mask], self.val[mask], _canonical=True)

    def map_slots(self, matrix) -> Kernel:
        """Apply the linear map ``matrix`` (shape ``(out, in)``) to every slot."""
        matrix = np.asarray(matrix, dtype=complex)
        if self.order == 0:
            return self
        arr = self.to_dense(matrix.shape[1])
        for axis in range(self.order):
            arr = np.moveaxis(np.tensordot(matrix, arr, axes=(1, axis)), 0, axis)
        return Kernel.from_dense(arr)

    def slice_first(self, i: int) -> Kernel:
        """``g(rest) = f(i, rest)``."""
        if self.order == 0:
            raise ValueError("order-0 kernel has no slots")
        mask = self.idx[:, 0] == i
        return Kernel(self.order - 1, self.idx[mask][:, 1:], self.val[mask], _canonical=True)


def adjoint(f: Kernel) -> Kernel:
    return f.adjoint()


def _budget(order: int) -> None:
    if order > settings().max_degree:
        raise TruncationError(f"order {order} exceeds max_degree {settings().max_degree}")


def tensor_product(f: Kernel, g: Kernel) -> Kernel:
    _budget(f.order + g.order)
    return f.tensor(g)


def contract(f: Kernel, g: Kernel, p: int, method: str = "auto") -> Kernel:
    if p < 0 or p > min(f.order, g.order):
        raise ContractionArityError(f"cannot contract {p} slots of orders {f.order} and {g.order}")
    _budget(f.order + g.order - 2 * p)
    return f.contract(g, p, method)


def inner_product(f: Kernel, g: Kernel) -> complex:
    return f.inner(g)


DegreeVector = tuple


class MultiKernel:
    """Graded element of ``H_{n_1} x ... x H_{n_k}``, optionally parameterised.

    ``blocks`` maps a degree vector of length ``arity`` to a :class:`Kernel` of
    order ``params + sum(degrees)``.  The first ``params`` kernel slots are
    parameter indices (gradient time variables); the remaining slots are split
    among the legs according to the degree vector.
    """

    __slots__ = ("arity", "params", "blocks")

    def __init__(self, arity: int, blocks: Mapping[DegreeVector, Kernel] | None = None,
                 params: int = 0):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        clean = {}
        for deg, k in (blocks or {}).items():
            deg = tuple(int(x) for x in deg)
            if len(deg) != arity or min(deg) < 0:
                raise ValueError(f"degree vector {deg} invalid for arity {arity}")
            if k.order != params + sum(deg):
                raise ValueError(f"block {deg} holds kernel of order {k.order}, "
                                 f"expected {params + sum(deg)}")
            if not k.is_zero():
                clean[deg] = k
        self.arity = arity
        self.params = params
        self.blocks = dict(sorted(clean.items()))

    @classmethod
    def unit(cls, arity: int, coeff: complex = 1.0) -> MultiKernel:
        return cls(arity, {(0,) * arity: Kernel.scalar(coeff)})

    @classmethod
    def _accumulate(cls, arity, pieces, params=0) -> MultiKernel:
        acc: dict[tuple, list[Kernel]] = defaultdict(list)
        for deg, k in pieces:
            acc[deg].append(k)
        blocks = {}
        for deg, ks in acc.items():
            blocks[deg] = ks[0] if len(ks) == 1 else Kernel(
                ks[0].order, np.concatenate([k.idx for k in ks]), np.concatenate([k.val for k in ks]))
        return cls(arity, blocks, params)

    def __repr__(self) -> str:
        return f"MultiKernel(arity={self.arity}, params={self.params}, blocks={list(self.blocks)})"

    def _check_shape(self, other: MultiKernel) -> None:
        if (self.arity, self.params) != (other.arity, other.params):
            raise ValueError("multikernel shapes differ: "
                             f"({self.arity}, {self.params}) vs ({other.arity}, {other.params})")

    # -- linear structure -------------------------------------------------

    def __add__(self, other: MultiKernel) -> MultiKernel:
        if not isinstance(other, MultiKernel):
            return NotImplemented
        self._check_shape(other)
        return type(self)._accumulate(
            self.arity, list(self.blocks.items()) + list(other.blocks.items()), self.params)

    def __neg__(self) -> MultiKernel:
        return self * -1

    def as_plain(self) -> MultiKernel:
        return MultiKernel(self.arity, self.blocks, self.params)

    def __sub__(self, other: MultiKernel) -> MultiKernel:
        return self + (-other)

    def __mul__(self, c) -> MultiKernel:
        if isinstance(c, (Kernel, MultiKernel)):
            return NotImplemented
        return type(self)(self.arity, {d: k * c for d, k in self.blocks.items()}, self.params)

    __rmul__ = __mul__

    def scale_blocks(self, fn: Callable[[tuple], complex]) -> MultiKernel:
        return type(self)(self.arity, {d: k * fn(d) for d, k in self.blocks.items()}, self.params)

    def inner(self, other: MultiKernel) -> complex:
        self._check_shape(other)
        return sum((k.inner(other.blocks[d]) for d, k in self.blocks.items() if d in other.blocks), 0j)

    def norm_squared(self) -> float:
        return float(sum(k.norm() ** 2 for k in self.blocks.values()))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def is_zero(self) -> bool:
        return not self.blocks

    def max_abs_diff(self, other: MultiKernel) -> float:
        self._check_shape(other)
        with using(prune=0.0):
            diff = self - other
        return max((float(np.abs(k.val).max()) for k in diff.blocks.values() if k.nnz), default=0.0)

    def allclose(self, other: MultiKernel, tol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiKernel):
            return NotImplemented
        return ((self.arity, self.params) == (other.arity, other.params)
                and self.blocks.keys() == other.blocks.keys()
                and all(k == other.blocks[d] for d, k in self.blocks.items()))

    __hash__ = None

    # -- leg algebra ------------------------------------------------------

    def tensor(self, other: MultiKernel) -> MultiKernel:
        """Concatenate legs (and parameters, self's first)."""
        q1, q2 = self.params, other.params
        pieces = []
        for d1, f in self.blocks.items():
            l1 = sum(d1)
            for d2, g in other.blocks.items():
                l2 = sum(d2)
                perm = (list(range(q1)) + list(range(q1 + l1, q1 + l1 + q2))
                        + list(range(q1, q1 + l1)) + list(range(q1 + l1 + q2, q1 + l1 + q2 + l2)))
                pieces.append((d1 + d2, f.tensor(g).permute(perm)))
        return MultiKernel._accumulate(self.arity + other.arity, pieces, q1 + q2)

    def contract_legs(self, i: int) -> MultiKernel:
        """Multiply legs ``i`` and ``i+1`` with the free product formula."""
        if not 0 <= i < self.arity - 1:
            raise ValueError(f"no adjacent leg pair at {i} for arity {self.arity}")
        pieces = []
        for deg, k in self.blocks.items():
            a, b = deg[i], deg[i + 1]
            boundary = self.params + sum(deg[:i]) + a
            for p in range(min(a, b) + 1):
                pieces.append((deg[:i] + (a + b - 2 * p,) + deg[i + 2:], k.self_contract(boundary, p)))
        return MultiKernel._accumulate(self.arity - 1, pieces, self.params)

    def trace_leg(self, i: int) -> MultiKernel:
        """Apply the trace to leg ``i`` (only its degree-0 part survives)."""
        if self.arity == 1:
            raise ValueError("cannot trace the only leg")
        blocks = {d[:i] + d[i + 1:]: k for d, k in self.blocks.items() if d[i] == 0}
        return MultiKernel(self.arity - 1, blocks, self.params)

    def trace_all(self) -> Kernel:
        """Trace every leg; the result is the kernel over the parameter slots."""
        return self.blocks.get((0,) * self.arity, Kernel.zero(self.params) if self.params
                               else Kernel.scalar(0))

    def leg_gradient(self, i: int) -> MultiKernel:
        """Differentiate leg ``i``; the new time variable becomes the last parameter."""
        q = self.params
        pieces = []
        for deg, k in self.blocks.items():
            n = deg[i]
            off = q + sum(deg[:i])
            for pos in range(n):
                slot = off + pos
                rest = [c for c in range(q, k.order) if c != slot]
                new = deg[:i] + (pos, n - pos - 1) + deg[i + 1:]
                pieces.append((new, k.permute(list(range(q)) + [slot] + rest)))
        return MultiKernel._accumulate(self.arity + 1, pieces, q + 1)

    def insert_param(self, i: int, j: int) -> MultiKernel:
        """Fuse legs ``i`` and ``i+1`` by inserting parameter slot ``j`` between them.

        This is the divergence in the variable ``j`` acting on the two legs.
        """
        if not 0 <= i < self.arity - 1 or not 0 <= j < self.params:
            raise ValueError("leg or parameter position out of range")
        q = self.params
        pieces = []
        for deg, k in self.blocks.items():
            cut = q + sum(deg[:i + 1])
            perm = [c for c in range(q) if c != j] + list(range(q, cut)) + [j] + list(range(cut, k.order))
            pieces.append((deg[:i] + (deg[i] + 1 + deg[i + 1],) + deg[i + 2:], k.permute(perm)))
        return MultiKernel._accumulate(self.arity - 1, pieces, q - 1)

    def pair_param(self, j: int, h: Kernel) -> MultiKernel:
        """Integrate parameter ``j`` against ``conj(h)``."""
        if h.order != 1:
            raise ValueError("direction must be an order-1 kernel")
        hc = h.conj()
        blocks = {}
        for deg, k in self.blocks.items():
            moved = k.permute([j] + [c for c in range(k.order) if c != j])
            blocks[deg] = hc.contract(moved, 1)
        return MultiKernel(self.arity, blocks, self.params - 1)

    def permute_params(self, perm) -> MultiKernel:
        perm = list(perm)
        return type(self)(self.arity, {d: k.permute(perm + list(range(self.params, k.order)))
                                        for d, k in self.blocks.items()}, self.params)

    def filter(self, fn: Callable[[np.ndarray, tuple], np.ndarray]) -> MultiKernel:
        """Keep entries selected by ``fn(idx, degrees) -> bool mask``."""
        return type(self)(self.arity, {d: k.filter(fn(k.idx, d)) for d, k in self.blocks.items()},
                           self.params)

    def restrict_legs(self, allowed: Iterable[int]) -> MultiKernel:
        allowed = np.fromiter(allowed, dtype=np.int64)
        q = self.params
        return self.filter(lambda idx, d: np.isin(idx[:, q:], allowed).all(axis=1))

    def param_tuples(self) -> list[tuple]:
        if self.params == 0:
            return [()] if self.blocks else []
        found = set()
        for k in self.blocks.values():
            found.update(map(tuple, k.idx[:, :self.params].tolist()))
        return sorted(found)

    def component(self, js) -> MultiKernel:
        """Fix every parameter slot to the indices ``js``."""
        js = tuple(js)
        if len(js) != self.params:
            raise ValueError(f"expected {self.params} parameter indices")
        q = self.params
        blocks = {}
        for deg, k in self.blocks.items():
            mask = np.all(k.idx[:, :q] == np.asarray(js, dtype=np.int64), axis=1) if q else \
                np.ones(k.nnz, dtype=bool)
            blocks[deg] = Kernel(k.order - q, k.idx[mask][:, q:], k.val[mask], _canonical=True)
        return MultiKernel(self.arity, blocks)

    def components(self) -> dict[tuple, MultiKernel]:
        return {js: self.component(js) for js in self.param_tuples()}

    def degree(self) -> int:
        return max((sum(d) for d in self.blocks), default=0)


def check_kernel_order(k: Kernel, order: int, what: str = "kernel") -> None:
    if k.order != order:
        raise PreconditionError(f"{what} must have order {order}, got {k.order}")
