"""Exact small-dimension pure-state algebra on qubits.

Conventions
-----------
Qubits are addressed 0-based. Qubit 0 is the leftmost tensor factor and the
most significant bit of a basis index, so ``|01>`` has index 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, CapacityError, ShapeError

TOL_NORM = 1e-9
MAX_QUBITS = 12

_S2 = 1 / sqrt(2)
_SINGLE = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_S2, _S2], dtype=complex),
    "-": np.array([_S2, -_S2], dtype=complex),
}


class BellKind(enum.Enum):
    """The four Bell states; definition order is the Bell-measurement outcome order."""

    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"

    @property
    def outcome_index(self) -> int:
        return list(BellKind).index(self) + 1

    @classmethod
    def from_outcome(cls, index: int) -> "BellKind":
        members = list(cls)
        if not 1 <= index <= len(members):
            raise ArgumentError(f"Bell outcome index must be in 1..4, got {index}")
        return members[index - 1]


@dataclass(frozen=True, eq=False)
class StateVec:
    """Immutable amplitude vector over ``n_qubits`` qubits.

    Amplitudes are stored as a read-only complex array of length
    ``2**n_qubits``. Unless ``unnormalized`` is set, the squared norm must be
    1 within :data:`TOL_NORM`.
    """

    amps: np.ndarray
    unnormalized: bool = False
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        size = amps.size
        if size < 2 or size & (size - 1):
            raise ShapeError(f"amplitude vector length {size} is not a power of two >= 2")
        n = size.bit_length() - 1
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
        if not np.all(np.isfinite(amps)):
            raise ArgumentError("amplitudes must be finite")
        if not self.unnormalized:
            norm2 = float(np.vdot(amps, amps).real)
            if abs(norm2 - 1.0) >= TOL_NORM:
                raise ArgumentError(f"state is not normalized (|s|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "n_qubits", n)

    def __len__(self):
        return self.amps.size

    def __getitem__(self, index):
        return complex(self.amps[index])

    def __neg__(self):
        return StateVec(-self.amps, unnormalized=self.unnormalized)

    def __mul__(self, scalar):
        return StateVec(scalar * self.amps, unnormalized=True)

    __rmul__ = __mul__

    def __add__(self, other: "StateVec"):
        _same_size(self, other)
        return StateVec(self.amps + other.amps, unnormalized=True)

    def __sub__(self, other: "StateVec"):
        _same_size(self, other)
        return StateVec(self.amps - other.amps, unnormalized=True)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVec":
        norm = self.norm
        if norm <= TOL_NORM:
            raise ArgumentError("cannot normalize a (numerically) zero vector")
        return StateVec(self.amps / norm)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit."""
        return self.amps.reshape((2,) * self.n_qubits)

    def __repr__(self):
        terms = []
        for idx in np.flatnonzero(np.abs(self.amps) > 1e-12):
            terms.append(f"{complex(self.amps[idx]):.6g}|{idx:0{self.n_qubits}b}>")
        return "StateVec(" + " + ".join(terms or ["0"]) + ")"


def _same_size(a: StateVec, b: StateVec):
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def ket(label: str) -> StateVec:
    """Product state from a string over ``0 1 + -``, e.g. ``ket("0-")``."""
    if not label:
        raise ArgumentError("empty ket label")
    try:
        vecs = [_SINGLE[ch] for ch in label]
    except KeyError as exc:
        raise ArgumentError(f"unknown single-qubit label {exc.args[0]!r}") from None
    out = vecs[0]
    for v in vecs[1:]:
        out = np.kron(out, v)
    return StateVec(out)


def basis(index: int, n_qubits: int) -> StateVec:
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[index] = 1
    return StateVec(amps)


def tensor(a: StateVec, b: StateVec) -> StateVec:
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return StateVec(np.kron(a.amps, b.amps), unnormalized=a.unnormalized or b.unnormalized)


def inner(a: StateVec, b: StateVec) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _same_size(a, b)
    return complex(np.vdot(a.amps, b.amps))


def global_phase_residual(a: StateVec, b: StateVec) -> tuple[float, complex]:
    """Best unit-modulus ``c`` minimising ``||a - c b||`` and that residual."""
    _same_size(a, b)
    ov = np.vdot(b.amps, a.amps)
    c = ov / abs(ov) if abs(ov) > 0 else 1.0 + 0j
    return float(np.linalg.norm(a.amps - c * b.amps)), complex(c)


def equal_up_to_global_phase(a: StateVec, b: StateVec, tol: float = TOL_NORM) -> bool:
    _same_size(a, b)
    return abs(inner(a, b)) >= 1 - tol


def bell(kind: BellKind) -> StateVec:
    amps = np.zeros(4, dtype=complex)
    if kind in (BellKind.PHI_PLUS, BellKind.PHI_MINUS):
        amps[0b00] = _S2
        amps[0b11] = _S2 if kind is BellKind.PHI_PLUS else -_S2
    else:
        amps[0b01] = _S2
        amps[0b10] = _S2 if kind is BellKind.PSI_PLUS else -_S2
    return StateVec(amps)


def _check_cut(n: int, qubits: Iterable[int]) -> tuple[int, ...]:
    cut = tuple(sorted(set(int(q) for q in qubits)))
    if not cut or len(cut) >= n:
        raise ArgumentError(f"cut {cut} must be a nonempty proper subset of 0..{n - 1}")
    if cut[0] < 0 or cut[-1] >= n:
        raise ArgumentError(f"cut {cut} refers to qubits outside 0..{n - 1}")
    return cut


def bipartition_matrix(s: StateVec, left_qubits: Iterable[int]) -> np.ndarray:
    """Amplitudes reshaped to a (left, right) matrix for the given cut."""
    n = s.n_qubits
    left = _check_cut(n, left_qubits)
    right = tuple(q for q in range(n) if q not in left)
    t = np.transpose(s.tensor(), left + right)
    return t.reshape(2 ** len(left), 2 ** len(right))


def _rank(sv: np.ndarray, tol: float) -> int:
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def schmidt_rank(s: StateVec, left_qubits: Iterable[int], tol: float = TOL_NORM) -> int:
    sv = np.linalg.svd(bipartition_matrix(s, left_qubits), compute_uv=False)
    return _rank(sv, tol)


def concurrence(s: StateVec) -> float:
    if s.n_qubits != 2:
        raise ShapeError(f"concurrence needs a 2-qubit state, got {s.n_qubits}")
    a = s.amps
    return float(2 * abs(a[0] * a[3] - a[1] * a[2]))


def apply(op, s: StateVec) -> StateVec:
    """Matrix-vector product. ``op`` is an array or anything with ``.matrix``."""
    m = np.asarray(getattr(op, "matrix", op), dtype=complex)
    if m.ndim != 2 or m.shape[1] != s.amps.size:
        raise ShapeError(f"operator shape {m.shape} does not act on {s.n_qubits} qubits")
    if m.shape[0] != m.shape[1]:
        raise ShapeError("apply needs a square operator")
    return StateVec(m @ s.amps, unnormalized=True)


def _check_order(n: int, order: Sequence[int]) -> tuple[int, ...]:
    order = tuple(int(q) for q in order)
    if sorted(order) != list(range(n)):
        raise ArgumentError(f"{order} is not a permutation of 0..{n - 1}")
    return order


def permute_qubits(s: StateVec, order: Sequence[int]) -> StateVec:
    """Reorder tensor factors: qubit ``k`` of the result is qubit ``order[k]`` of ``s``."""
    order = _check_order(s.n_qubits, order)
    return StateVec(np.transpose(s.tensor(), order).reshape(-1), unnormalized=s.unnormalized)


def drop_qubits(s: StateVec, qubits: Iterable[int]) -> StateVec:
    """Delete qubits from every basis ket string and renormalise.

    Coefficients of ket strings that coincide after deletion are summed. This
    is an amplitude re-indexing, not a partial trace.
    """
    n = s.n_qubits
    drop = _check_cut(n, qubits)
    keep = [q for q in range(n) if q not in drop]
    out = np.zeros(2 ** len(keep), dtype=complex)
    for idx in np.flatnonzero(s.amps):
        bits = [(int(idx) >> (n - 1 - q)) & 1 for q in keep]
        new = 0
        for b in bits:
            new = (new << 1) | b
        out[new] += s.amps[idx]
    return StateVec(out, unnormalized=True).normalized()


def qubit_index_map(n: int, order: Sequence[int]) -> np.ndarray:
    """``perm`` with ``permute_qubits(s, order).amps == s.amps[perm]``."""
    order = _check_order(n, order)
    return np.arange(2**n).reshape((2,) * n).transpose(order).reshape(-1)


def embed(matrix, targets: Sequence[int], n: int) -> np.ndarray:
    """Full ``2**n`` matrix acting as ``matrix`` on ``targets`` and identity elsewhere."""
    m = np.asarray(matrix, dtype=complex)
    targets = tuple(int(t) for t in targets)
    k = len(targets)
    if m.shape != (2**k, 2**k):
        raise ShapeError(f"operator shape {m.shape} does not match {k} target qubits")
    if len(set(targets)) != k or any(not 0 <= t < n for t in targets):
        raise ArgumentError(f"bad target qubits {targets} for {n} qubits")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    rest = [q for q in range(n) if q not in targets]
    ordered = np.kron(m, np.eye(2 ** len(rest)))
    perm = qubit_index_map(n, targets + tuple(rest))
    full = np.empty_like(ordered)
    full[np.ix_(perm, perm)] = ordered
    return full


def project_out(s: StateVec, qubit: int, vec) -> StateVec:
    """Contract ``qubit`` with ``<vec|``; the result has one qubit fewer and is unnormalised."""
    n = s.n_qubits
    if n < 2:
        raise ShapeError("cannot remove the only qubit of a state")
    if not 0 <= qubit < n:
        raise ArgumentError(f"qubit {qubit} outside 0..{n - 1}")
    v = np.asarray(vec, dtype=complex).reshape(2)
    out = np.tensordot(v.conj(), s.tensor(), axes=([0], [qubit]))
    return StateVec(out.reshape(-1), unnormalized=True)


def factor_out(s: StateVec, qubits: Sequence[int], tol: float = TOL_NORM) -> StateVec | None:
    """The pure state of ``qubits`` if it is a product factor of ``s``, else ``None``.

    The returned state lists the qubits in the order given.
    """
    qubits = tuple(int(q) for q in qubits)
    n = s.n_qubits
    if len(qubits) == n:
        return permute_qubits(s, qubits)
    _check_cut(n, qubits)
    rest = tuple(q for q in range(n) if q not in qubits)
    mat = np.transpose(s.tensor(), qubits + rest).reshape(2 ** len(qubits), -1)
    u, sv, _ = np.linalg.svd(mat)
    if _rank(sv, tol) != 1:
        return None
    return StateVec(u[:, 0]).normalized()


def reduced_density(s: StateVec, qubits: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of ``qubits`` (listed order); used only for entanglement tests."""
    qubits = tuple(int(q) for q in qubits)
    n = s.n_qubits
    rest = tuple(q for q in range(n) if q not in qubits)
    mat = np.transpose(s.tensor(), qubits + rest).reshape(2 ** len(qubits), -1)
    return mat @ mat.conj().T


def pair_entangled(s: StateVec, a: int, b: int, tol: float = TOL_NORM) -> bool:
    """Whether qubits ``a`` and ``b`` are entangled with each other (PPT test, exact for 2 qubits)."""
    rho = reduced_density(s, (a, b))
    rho = rho / np.trace(rho).real
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return bool(np.linalg.eigvalsh(pt)[0] < -tol)
