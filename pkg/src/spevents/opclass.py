"""Locality and invertibility of linear maps on tensor-product spaces.

A map is *local* for a factorization ``d_0 x d_1 x ...`` when it equals a
tensor product of maps on the factors, and *LI* when it is also invertible.
Locality is decided by realigning the matrix against every single-factor cut
and checking that the realigned matrix has rank one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .errors import ArgumentError, PreconditionError, ShapeError
from .qcore import StateVec

RANK_TOL = 1e-9
RAY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix; entries are copied into a read-only array."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"operator must be a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ArgumentError("operator entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix @ other.matrix)

    def kron(self, other: "Operator") -> "Operator":
        return Operator(np.kron(self.matrix, other.matrix))

    def __repr__(self):
        return f"Operator(dim={self.dim})"


@dataclass(frozen=True)
class Factorization:
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ArgumentError(f"factor dimensions must be positive, got {dims}")
        if prod(dims) > 1 and any(d < 2 for d in dims):
            raise ArgumentError(f"factor dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @classmethod
    def qubits(cls, n: int) -> "Factorization":
        return cls((2,) * n)

    @property
    def dim(self) -> int:
        return prod(self.factor_dims)

    def __len__(self):
        return len(self.factor_dims)


@dataclass(frozen=True)
class OpClass:
    local: bool
    invertible: bool
    zero_operator: bool = False
    # set when invertibility was judged on the state's ray instead of the full space
    ray_restricted: bool = False
    note: str = field(default="", compare=False)

    @property
    def is_li(self) -> bool:
        return self.local and self.invertible

    def label(self) -> str:
        return "LI" if self.is_li else "non-LI"


class RayAction(enum.Enum):
    IDENTITY = "identity"
    ZERO = "zero"
    OTHER = "other"


def _as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, Operator) else Operator(op).matrix


def _check_factorization(m: np.ndarray, f: Factorization):
    if f.dim != m.shape[0]:
        raise ShapeError(f"factorization {f.factor_dims} does not match dimension {m.shape[0]}")


def _rank(sv: np.ndarray, tol: float) -> int:
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def matrix_rank(op, tol: float = RANK_TOL) -> int:
    return _rank(np.linalg.svd(_as_matrix(op), compute_uv=False), tol)


def is_invertible(op, tol: float = RANK_TOL) -> bool:
    m = _as_matrix(op)
    return matrix_rank(m, tol) == m.shape[0]


def realign(op, f: Factorization, cut: int) -> np.ndarray:
    """Matrix with rows indexed by factor ``cut``'s (row, col) pair and columns by the rest.

    ``op`` equals ``A (x) B`` across the cut exactly when this matrix has rank one.
    """
    m = _as_matrix(op)
    _check_factorization(m, f)
    k = len(f)
    if not 0 <= cut < k:
        raise ArgumentError(f"cut {cut} outside factor indices 0..{k - 1}")
    dims = f.factor_dims
    t = m.reshape(dims + dims)
    rest = [i for i in range(k) if i != cut]
    axes = [cut, k + cut] + rest + [k + i for i in rest]
    d = dims[cut]
    return t.transpose(axes).reshape(d * d, -1)


def operator_schmidt_rank(op, f: Factorization, cut: int, tol: float = RANK_TOL) -> int:
    sv = np.linalg.svd(realign(op, f, cut), compute_uv=False)
    return _rank(sv, tol)


def is_local(op, f: Factorization, tol: float = RANK_TOL) -> bool:
    """Full tensor factorization over ``f``. The zero operator is non-local by convention."""
    m = _as_matrix(op)
    _check_factorization(m, f)
    if not np.any(m):
        return False
    if len(f) == 1:
        return True
    return all(operator_schmidt_rank(m, f, i, tol) == 1 for i in range(len(f)))


def classify(op, f: Factorization, tol: float = RANK_TOL) -> OpClass:
    m = _as_matrix(op)
    zero = not np.any(m)
    note = "zero operator: non-local by convention" if zero else ""
    return OpClass(
        local=is_local(m, f, tol),
        invertible=is_invertible(m, tol),
        zero_operator=zero,
        note=note,
    )


def _fix_phase(a: np.ndarray) -> np.ndarray:
    flat = a.reshape(-1)
    pivot = flat[int(np.argmax(np.abs(flat) > np.abs(flat).max() * (1 - 1e-12)))]
    return a * (abs(pivot) / pivot)


def factor(op, f: Factorization, tol: float = RANK_TOL) -> list[Operator]:
    """Split a local operator into per-factor operators.

    Every factor after the first has Frobenius norm ``sqrt(d_i)`` and its first
    largest-modulus entry real positive; the first factor carries the scalar.
    """
    m = _as_matrix(op)
    if not is_local(m, f, tol):
        raise PreconditionError("operator is not local with respect to the factorization")
    dims = f.factor_dims
    tail = []
    for i in range(1, len(dims)):
        u, _, _ = np.linalg.svd(realign(m, f, i))
        t = u[:, 0].reshape(dims[i], dims[i])
        t = t * (sqrt(dims[i]) / np.linalg.norm(t))
        tail.append(_fix_phase(t))
    rest = reduce(np.kron, tail, np.eye(1, dtype=complex))
    d0, dr = dims[0], rest.shape[0]
    t4 = m.reshape(d0, dr, d0, dr)
    first = np.einsum("akbl,kl->ab", t4, rest.conj()) / np.vdot(rest, rest).real
    return [Operator(first)] + [Operator(t) for t in tail]


def tensor_all(ops: Sequence) -> Operator:
    return Operator(reduce(np.kron, [_as_matrix(o) for o in ops]))


def ray_action(op, psi: StateVec, tol: float = RAY_TOL) -> RayAction:
    """Induced map on the one-dimensional space spanned by ``psi``: ``*1`` or ``*0``."""
    m = np.asarray(getattr(op, "matrix", op), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[1] != psi.amps.size:
        return RayAction.OTHER
    if np.linalg.norm(m @ psi.amps) <= tol:
        return RayAction.ZERO
    return RayAction.IDENTITY


@dataclass(frozen=True)
class RoundTrip:
    forward: OpClass
    inverse: OpClass
    composite: OpClass
    identity_residual: float


def inverse_roundtrip(op, f: Factorization, tol: float = RANK_TOL) -> RoundTrip:
    """Classify ``op``, its inverse and ``op^-1 op``; the composite must be the identity."""
    m = _as_matrix(op)
    if not is_invertible(m, tol):
        raise PreconditionError("operator is not invertible")
    inv = np.linalg.inv(m)
    comp = inv @ m
    return RoundTrip(
        forward=classify(m, f, tol),
        inverse=classify(inv, f, tol),
        composite=classify(comp, f, tol),
        identity_residual=float(np.linalg.norm(comp - np.eye(m.shape[0]))),
    )
