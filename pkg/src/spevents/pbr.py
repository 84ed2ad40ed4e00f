"""Finite ontological models and the two-qubit preparation-independence argument.

Ontic states are indices ``0..|L|-1``. Single-system preparations are
distributions over ``L``; bipartite preparations are ``|L| x |L|`` arrays, by
default the product of the two single-system preparations. Bipartite
responses ``p(k | M, l1, l2)`` are ``|L| x |L|`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import sqrt
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .errors import ArgumentError, ModelError
from .qcore import StateVec, inner, ket

PROB_TOL = 1e-9
GRID_STEPS = 64
GRID_MAX_LAMBDA = 4

#: Single-system preparations used by the argument, and their product pairs.
PREP_LABELS = ("0", "-")
PREPARATIONS = (("0", "0"), ("0", "-"), ("-", "0"), ("-", "-"))


@dataclass(frozen=True, eq=False)
class OnticModel:
    lambda_size: int
    preparations: Mapping[str, np.ndarray]
    responses: Mapping[tuple[str, int], np.ndarray] = field(default_factory=dict)
    joint_preparations: Mapping[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = int(self.lambda_size)
        if n < 1:
            raise ModelError("ontic space must be nonempty")
        preps = {k: _frozen(v) for k, v in self.preparations.items()}
        for label, p in preps.items():
            _check_distribution(p, (n,), f"preparation {label!r}")
        joints = {tuple(k): _frozen(v) for k, v in self.joint_preparations.items()}
        for label, p in joints.items():
            _check_distribution(p, (n, n), f"joint preparation {label!r}")
        resp = {(m, int(k)): _frozen(v) for (m, k), v in self.responses.items()}
        by_measure: dict[str, list[np.ndarray]] = {}
        for (m, _), r in resp.items():
            if r.shape not in ((n,), (n, n)):
                raise ModelError(f"response for {m!r} has shape {r.shape}")
            if np.any(r < -PROB_TOL) or np.any(r > 1 + PROB_TOL):
                raise ModelError(f"response probabilities for {m!r} leave [0, 1]")
            by_measure.setdefault(m, []).append(r)
        for m, rs in by_measure.items():
            shapes = {r.shape for r in rs}
            if len(shapes) != 1:
                raise ModelError(f"responses for {m!r} mix single and bipartite shapes")
            if not np.allclose(sum(rs), 1, atol=PROB_TOL):
                raise ModelError(f"responses for {m!r} do not sum to 1 over outcomes")
        object.__setattr__(self, "lambda_size", n)
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "joint_preparations", joints)
        object.__setattr__(self, "responses", resp)

    def outcomes(self, measurement: str) -> list[int]:
        return sorted(k for (m, k) in self.responses if m == measurement)

    def prep(self, label) -> np.ndarray:
        """Distribution for a single label or a ``(P1, P2)`` pair."""
        if isinstance(label, tuple):
            if label in self.joint_preparations:
                return self.joint_preparations[label]
            a, b = label
            return np.outer(self.prep(a), self.prep(b))
        try:
            return self.preparations[label]
        except KeyError:
            raise ArgumentError(f"unknown preparation {label!r}") from None


def _frozen(v) -> np.ndarray:
    a = np.array(v, dtype=float)
    a.setflags(write=False)
    return a


def _check_distribution(p: np.ndarray, shape, what: str):
    if p.shape != shape:
        raise ModelError(f"{what} has shape {p.shape}, expected {shape}")
    if np.any(p < -PROB_TOL) or abs(p.sum() - 1) > PROB_TOL:
        raise ModelError(f"{what} is not a probability distribution")


def born_sum(model: OnticModel, prep, measurement: str, outcome: int) -> float:
    """``sum_l p(k | M, l) p(l | P)``."""
    p = model.prep(prep)
    try:
        r = model.responses[(measurement, outcome)]
    except KeyError:
        raise ArgumentError(f"no response for measurement {measurement!r} outcome {outcome}") from None
    if r.shape != p.shape:
        raise ArgumentError(f"response shape {r.shape} does not match preparation shape {p.shape}")
    return float(np.sum(r * p))


def overlap(model: OnticModel, p1: str, p2: str) -> float:
    return float(np.dot(model.prep(p1), model.prep(p2)))


def independence_gap(joint, marginal_a, marginal_b) -> float:
    """``max |p(l1, l2) - p(l1) p(l2)|``; zero iff the joint factorises into these marginals."""
    joint = np.asarray(joint, dtype=float)
    prod = np.outer(marginal_a, marginal_b)
    if joint.shape != prod.shape:
        raise ArgumentError(f"joint shape {joint.shape} does not match marginals {prod.shape}")
    return float(np.max(np.abs(joint - prod)))


# -- the four entangled measurement states -----------------------------------------------

def phi_basis() -> tuple[StateVec, StateVec, StateVec, StateVec]:
    s = 1 / sqrt(2)
    pairs = (("01", "10"), ("0+", "1-"), ("-1", "+0"), ("-+", "+-"))
    return tuple(((ket(a) + ket(b)) * s).normalized() for a, b in pairs)


def prepared_state(prep: tuple[str, str]) -> StateVec:
    return ket("".join(prep))


def phi_table() -> np.ndarray:
    """``|<phi_k | psi_P>|^2``; rows are outcomes k = 1..4, columns follow ``PREPARATIONS``."""
    phis = phi_basis()
    table = np.empty((4, 4))
    for k, phi in enumerate(phis):
        for j, prep in enumerate(PREPARATIONS):
            table[k, j] = abs(inner(phi, prepared_state(prep))) ** 2
    return table


# -- contradiction witness ----------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """An outcome/preparation pair the quantum rule forbids but the model cannot avoid."""

    outcome: int
    preparation: tuple[str, str]
    quantum_probability: float
    lower_bound: float
    model_probability: float
    method: str


def _simplex_grid(parts: int, steps: int) -> np.ndarray:
    rows = []
    for cuts in combinations_with_replacement(range(steps + 1), parts - 1):
        bounds = (0,) + cuts + (steps,)
        rows.append([bounds[i + 1] - bounds[i] for i in range(parts)])
    return np.array(rows, dtype=float) / steps


_GRID_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _grid(parts: int, steps: int) -> np.ndarray:
    key = (parts, steps)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = _simplex_grid(parts, steps)
    return _GRID_CACHE[key]


def _weights(model: OnticModel) -> np.ndarray:
    """Preparation weights per ontic cell, shape (4 preparations, |L|^2)."""
    return np.stack([model.prep(p).reshape(-1) for p in PREPARATIONS])


def _min_forbidden_grid(weights: np.ndarray, target: int) -> float:
    """Exhaustive grid minimum of the target pair's Born sum under the other three zeros.

    A Born sum with nonnegative terms vanishes iff each term does, so the
    constraints act cell by cell and the minimum is a per-cell minimum.
    """
    grid = _grid(4, GRID_STEPS)
    total = 0.0
    for cell in range(weights.shape[1]):
        w = weights[target, cell]
        if w <= 0:
            continue
        forbidden = [j for j in range(4) if j != target and weights[j, cell] > 0]
        ok = np.all(grid[:, forbidden] == 0, axis=1) if forbidden else np.ones(len(grid), bool)
        if not ok.any():
            return float("inf")
        total += w * grid[ok, target].min()
    return total


def _min_forbidden_lp(weights: np.ndarray, target: int) -> float:
    """Linear-programming minimum of the same quantity over all response tables."""
    cells = weights.shape[1]
    nvar = 4 * cells  # r[cell, k] flattened cell-major
    c = np.zeros(nvar)
    c[target::4] = weights[target]
    a_eq, b_eq = [], []
    for cell in range(cells):
        row = np.zeros(nvar)
        row[4 * cell:4 * cell + 4] = 1
        a_eq.append(row)
        b_eq.append(1.0)
    for j in range(4):
        if j == target:
            continue
        row = np.zeros(nvar)
        row[j::4] = weights[j]
        a_eq.append(row)
        b_eq.append(0.0)
    res = linprog(c, A_eq=np.array(a_eq), b_eq=np.array(b_eq), bounds=(0, 1), method="highs")
    if res.status == 2:
        return float("inf")
    if res.status != 0:
        raise ModelError(f"witness linear program failed: {res.message}")
    return float(res.fun)


def min_forbidden_probability(model: OnticModel, target: int, method: str = "auto") -> float:
    """Smallest achievable Born sum for pair ``target`` (0-based) given the other three vanish."""
    weights = _weights(model)
    if method == "auto":
        # grid size grows as |L|^2 * C(67, 3); switch to the LP beyond desk scale
        method = "grid" if model.lambda_size <= GRID_MAX_LAMBDA else "lp"
    if method == "grid":
        return _min_forbidden_grid(weights, target)
    if method == "lp":
        return _min_forbidden_lp(weights, target)
    raise ArgumentError(f"unknown method {method!r}")


def pbr_contradiction_witness(model: OnticModel, measurement: str = "M", method: str = "auto") -> Witness | None:
    """First ``(k, P)`` in zero-chain order whose forbidden outcome the model cannot avoid.

    Returns ``None`` when the two single-system preparations have disjoint
    supports, or when no pair is forced (which happens for suitably
    correlated joint preparations).
    """
    for label in PREP_LABELS:
        model.prep(label)
    outcomes = model.outcomes(measurement)
    if outcomes != [1, 2, 3, 4]:
        raise ModelError(f"measurement {measurement!r} needs responses for outcomes 1..4")
    if any(model.responses[(measurement, k)].ndim != 2 for k in outcomes):
        raise ModelError("the witness needs bipartite responses")
    if overlap(model, *PREP_LABELS) <= PROB_TOL:
        return None
    used = method
    if method == "auto":
        used = "grid" if model.lambda_size <= GRID_MAX_LAMBDA else "lp"
    table = phi_table()
    for j, prep in enumerate(PREPARATIONS):
        bound = min_forbidden_probability(model, j, used)
        if bound > PROB_TOL:
            return Witness(
                outcome=j + 1,
                preparation=prep,
                quantum_probability=float(table[j, j]),
                lower_bound=bound,
                model_probability=born_sum(model, prep, measurement, j + 1),
                method=used,
            )
    return None


# -- desk-scale model family --------------------------------------------------------------

def _uniform_responses(n: int, measurement: str = "M") -> dict:
    return {(measurement, k): np.full((n, n), 0.25) for k in range(1, 5)}


def shared_support_model() -> OnticModel:
    """|L| = 2; both preparations put weight on ontic state 1."""
    return OnticModel(2, {"0": [0.5, 0.5], "-": [0.0, 1.0]}, _uniform_responses(2))


def disjoint_support_model() -> OnticModel:
    return OnticModel(2, {"0": [1.0, 0.0], "-": [0.0, 1.0]}, _uniform_responses(2))


def correlated_model() -> OnticModel:
    """Shared supports, but each joint preparation lives on its own Latin-square diagonal."""
    n = 4
    joints = {}
    for shift, prep in enumerate(PREPARATIONS):
        j = np.zeros((n, n))
        for i in range(n):
            j[i, (i + shift) % n] = 1 / n
        joints[prep] = j
    uniform = np.full(n, 1 / n)
    return OnticModel(n, {"0": uniform, "-": uniform}, _uniform_responses(n), joints)


# -- demonstration joint from a spacetime-event partition --------------------------------

@dataclass(frozen=True, eq=False)
class JointPreparation:
    """Toy bipartite ontic distribution derived from event membership (demonstration model)."""

    ontic_states: tuple[tuple[int, int], ...]
    joint: np.ndarray
    marginal_a: np.ndarray
    marginal_b: np.ndarray
    particles: tuple[str, str]
    shared_event: int | None
    label: str = "demonstration model"

    @property
    def gap(self) -> float:
        return independence_gap(self.joint, self.marginal_a, self.marginal_b)


def merged_event_joint(scenario, partition) -> JointPreparation:
    """Correlate the first two particles' ontic states when they start in one event.

    Ontic states are ``(event id, bit)``. A particle's ontic state is the
    event containing its first segment together with a uniformly random bit
    carried by that event; two particles in the same event carry the same
    bit, particles in different events carry independent bits.
    """
    if len(scenario.particles) < 2:
        raise ArgumentError("need at least two particles")
    a, b = scenario.particles[0].id, scenario.particles[1].id
    ea, eb = partition.first_event(a), partition.first_event(b)
    states = tuple((e, bit) for e in sorted(partition.events) for bit in (0, 1))
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    ma, mb = np.zeros(n), np.zeros(n)
    for bit in (0, 1):
        ma[index[(ea, bit)]] = 0.5
        mb[index[(eb, bit)]] = 0.5
    if ea == eb:
        joint = np.zeros((n, n))
        for bit in (0, 1):
            joint[index[(ea, bit)], index[(eb, bit)]] = 0.5
        shared = ea
    else:
        joint = np.outer(ma, mb)
        shared = None
    return JointPreparation(states, joint, ma, mb, (a, b), shared)
