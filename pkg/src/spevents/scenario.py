"""Scenario model: particles on piecewise-linear worldlines in 1+1 dimensions.

Coordinates are ``(t, x)`` in natural units (light speed 1). Nodes are listed
in time order; equal times are allowed only between spacelike nodes with
disjoint participants, which are processed in listed order. A particle is
born at an inferred event and moves with its first declared velocity; at each
later interaction node it takes part in, the next declared velocity takes
over (the last one is kept once the list runs out). Detectors and absorbing
polarizers end the worldline. Unabsorbed worldlines run to the scenario
horizon, the latest time mentioned anywhere in the scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite, log2
from typing import ClassVar, Union

import numpy as np

from .errors import ArgumentError
from .qcore import BellKind

GEO_TOL = 1e-6
LIGHTSPEED = 1.0


@dataclass(frozen=True, order=True)
class InferredEvent:
    t: float
    x: float

    def __post_init__(self):
        if not (isfinite(self.t) and isfinite(self.x)):
            raise ArgumentError(f"inferred event coordinates must be finite, got ({self.t}, {self.x})")

    def close_to(self, other: "InferredEvent", tol: float = GEO_TOL) -> bool:
        return abs(self.t - other.t) <= tol and abs(self.x - other.x) <= tol

    def key(self, digits: int = 9) -> tuple[float, float]:
        """Rounded coordinates, for matching shared endpoints."""
        return (round(self.t, digits) + 0.0, round(self.x, digits) + 0.0)


@dataclass(frozen=True)
class Particle:
    id: str
    birth: InferredEvent
    velocities: tuple[float, ...]


# -- interaction kinds --------------------------------------------------------------------

@dataclass(frozen=True)
class PreparePair:
    bell: BellKind
    keyword: ClassVar[str] = "pair"
    arity: ClassVar[int] = 2
    terminal: ClassVar[bool] = False


@dataclass(frozen=True)
class BeamSplitterBellMeasure:
    """Bell-basis measurement; outcome ``i`` selects ``BellKind.from_outcome(i)``."""

    outcome: int | None = None
    keyword: ClassVar[str] = "bs"
    arity: ClassVar[int] = 2
    terminal: ClassVar[bool] = False


@dataclass(frozen=True)
class MirrorSeparableMeasure:
    """Product-basis outcome ``i`` in 1..4 selects ``|00>, |01>, |10>, |11>``."""

    outcome: int | None = None
    keyword: ClassVar[str] = "mirror"
    arity: ClassVar[int] = 2
    terminal: ClassVar[bool] = False


@dataclass(frozen=True)
class Polarizer:
    """Passing collapses onto ``|pi/2 - angle>``; absorption onto ``|angle>`` and ends the worldline."""

    angle: float
    passes: bool = True
    keyword: ClassVar[str] = "polarizer"
    arity: ClassVar[int] = 1

    @property
    def terminal(self) -> bool:
        return not self.passes


@dataclass(frozen=True)
class Detector:
    """Computational-basis detection; absorbs the particle."""

    outcome: int | None = None
    keyword: ClassVar[str] = "detector"
    arity: ClassVar[int] = 1
    terminal: ClassVar[bool] = True


@dataclass(frozen=True)
class Gate:
    """Arbitrary operator on the participants, rows/cols in participant order."""

    matrix: tuple[tuple[complex, ...], ...]
    label: tuple[str, ...] | None = None
    keyword: ClassVar[str] = "gate"
    terminal: ClassVar[bool] = False

    @classmethod
    def from_array(cls, matrix, label=None) -> "Gate":
        m = np.asarray(matrix, dtype=complex)
        return cls(tuple(tuple(complex(v) for v in row) for row in m), label)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex)

    @property
    def arity(self) -> int:
        n = len(self.matrix)
        k = log2(n) if n else -1
        return int(k) if k == int(k) else -1


NodeKind = Union[PreparePair, BeamSplitterBellMeasure, MirrorSeparableMeasure, Polarizer, Detector, Gate]
KINDS = {k.keyword: k for k in (PreparePair, BeamSplitterBellMeasure, MirrorSeparableMeasure, Polarizer, Detector, Gate)}


@dataclass(frozen=True)
class InteractionNode:
    at: InferredEvent
    participants: tuple[str, ...]
    kind: NodeKind

    def key(self) -> tuple:
        """Identity of the node apart from where it happens."""
        return (self.kind.keyword, self.participants, self.kind)


@dataclass(frozen=True)
class Scenario:
    particles: tuple[Particle, ...]
    nodes: tuple[InteractionNode, ...]
    name: str = "unnamed"
    description: str = ""

    def particle(self, pid: str) -> Particle:
        for p in self.particles:
            if p.id == pid:
                return p
        raise ArgumentError(f"unknown particle {pid!r}")

    @property
    def particle_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.particles)

    def nodes_of(self, pid: str) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if pid in n.participants]

    @property
    def horizon(self) -> float:
        times = [n.at.t for n in self.nodes] + [p.birth.t for p in self.particles]
        return max(times) if times else 0.0

    @property
    def time_range(self) -> tuple[float, float]:
        times = [n.at.t for n in self.nodes] + [p.birth.t for p in self.particles]
        return (min(times), max(times)) if times else (0.0, 0.0)


# -- worldline geometry ---------------------------------------------------------------------

@dataclass(frozen=True)
class Leg:
    """Straight piece of a worldline between consecutive cut points."""

    particle_id: str
    start: InferredEvent
    end: InferredEvent
    velocity: float
    start_node: int | None  # node index, None at a bare birth
    end_node: int | None  # node index, None at the horizon
    ordinal: int


def worldline(sc: Scenario, pid: str) -> list[Leg]:
    """Legs of ``pid``'s worldline; zero-length legs are dropped."""
    p = sc.particle(pid)
    vels = p.velocities or (0.0,)
    cuts: list[int] = []
    birth_node = None
    for i in sc.nodes_of(pid):
        node = sc.nodes[i]
        if node.at.t <= p.birth.t + GEO_TOL:
            birth_node = i if birth_node is None else birth_node
            if node.kind.terminal:
                return []
            continue
        cuts.append(i)
        if node.kind.terminal:
            break
    legs: list[Leg] = []
    here, start_node = p.birth, birth_node
    ends = [(sc.nodes[i].at.t, i) for i in cuts]
    if not cuts or not sc.nodes[cuts[-1]].kind.terminal:
        ends.append((sc.horizon, None))
    for j, (t_end, node) in enumerate(ends):
        v = vels[min(j, len(vels) - 1)]
        if t_end <= here.t + GEO_TOL:
            start_node = node if node is not None else start_node
            continue
        end = InferredEvent(t_end, here.x + v * (t_end - here.t))
        legs.append(Leg(pid, here, end, v, start_node, node, len(legs)))
        here, start_node = end, node
    return legs


def position(sc: Scenario, pid: str, t: float) -> float | None:
    """Inferred position of ``pid`` at time ``t``, or ``None`` outside its worldline."""
    p = sc.particle(pid)
    if abs(t - p.birth.t) <= GEO_TOL:
        return p.birth.x
    for leg in worldline(sc, pid):
        if leg.start.t - GEO_TOL <= t <= leg.end.t + GEO_TOL:
            return leg.start.x + leg.velocity * (t - leg.start.t)
    return None


# -- validation -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str = field(default="", compare=False)

    def __str__(self):
        return f"[{self.rule}] {self.subject}: {self.message}"

    def to_dict(self) -> dict:
        return {"rule": self.rule, "subject": self.subject, "message": self.message}


def _node_name(i: int, node: InteractionNode) -> str:
    return f"node {i} ({node.kind.keyword} at t={node.at.t!r})"


def validate(sc: Scenario) -> list[Violation]:
    """All rule violations; an empty list means the scenario is valid."""
    out: list[Violation] = []
    ids = [p.id for p in sc.particles]
    known = set(ids)
    for pid in sorted({i for i in ids if ids.count(i) > 1}):
        out.append(Violation("duplicate_particle", pid, "declared more than once"))
    for p in sc.particles:
        if not p.velocities:
            out.append(Violation("speed", p.id, "no velocity declared"))
        for v in p.velocities:
            if not isfinite(v) or abs(v) > LIGHTSPEED:
                out.append(Violation("speed", p.id, f"|velocity| {v!r} exceeds light speed"))

    for i, node in enumerate(sc.nodes):
        name = _node_name(i, node)
        if i:
            prev = sc.nodes[i - 1]
            if node.at.t < prev.at.t:
                out.append(Violation("ordering", name, f"t={node.at.t!r} precedes t={prev.at.t!r}"))
            elif node.at.t == prev.at.t and not _spacelike_tie(sc, i):
                out.append(Violation("ordering", name, f"shares t={node.at.t!r} with a node it is not spacelike to"))
        parts = node.participants
        if len(set(parts)) != len(parts):
            out.append(Violation("distinct_participants", name, f"repeated participant in {parts}"))
        if len(parts) != node.kind.arity:
            out.append(Violation("arity", name, f"needs {node.kind.arity} participants, got {len(parts)}"))
        for pid in parts:
            if pid not in known:
                out.append(Violation("unknown_particle", pid, f"{name} refers to undeclared particle {pid!r}"))
        out.extend(_kind_violations(name, node))

    if any(v.rule in ("duplicate_particle", "unknown_particle", "speed") for v in out):
        return out

    for p in sc.particles:
        absorbed_at = None
        for i in sc.nodes_of(p.id):
            node = sc.nodes[i]
            name = _node_name(i, node)
            if absorbed_at is not None:
                out.append(Violation("after_absorption", name, f"{p.id!r} was absorbed at node {absorbed_at}"))
                continue
            if node.at.t < p.birth.t - GEO_TOL:
                out.append(Violation("before_birth", name, f"{p.id!r} is born at t={p.birth.t!r}"))
                continue
            if isinstance(node.kind, PreparePair) and not node.at.close_to(p.birth):
                out.append(Violation("pair_at_birth", name, f"{p.id!r} must be born where its pair is prepared"))
            x = position(sc, p.id, node.at.t)
            if x is None or abs(x - node.at.x) > GEO_TOL:
                where = "off its worldline" if x is None else f"at x={x!r}"
                out.append(Violation("geometry", name, f"{p.id!r} is {where}, node at x={node.at.x!r}"))
            if node.kind.terminal:
                absorbed_at = i
    return out


def _spacelike_tie(sc: Scenario, i: int) -> bool:
    """Equal-time nodes are allowed only at distinct places with disjoint participants."""
    node = sc.nodes[i]
    for j in range(i - 1, -1, -1):
        other = sc.nodes[j]
        if other.at.t != node.at.t:
            break
        if set(other.participants) & set(node.participants) or abs(other.at.x - node.at.x) <= GEO_TOL:
            return False
    return True


def _kind_violations(name: str, node: InteractionNode) -> list[Violation]:
    k = node.kind
    out = []
    if isinstance(k, (BeamSplitterBellMeasure, MirrorSeparableMeasure)):
        if k.outcome is not None and not 1 <= k.outcome <= 4:
            out.append(Violation("outcome_range", name, f"outcome {k.outcome} outside 1..4"))
    elif isinstance(k, Detector):
        if k.outcome is not None and k.outcome not in (0, 1):
            out.append(Violation("outcome_range", name, f"outcome {k.outcome} outside 0..1"))
    elif isinstance(k, Gate):
        m = k.matrix
        if k.arity < 1 or any(len(row) != len(m) for row in m):
            out.append(Violation("gate_matrix", name, "gate matrix must be square with power-of-two size"))
        elif not all(isfinite(abs(v)) for row in m for v in row):
            out.append(Violation("gate_matrix", name, "gate entries must be finite"))
    elif isinstance(k, Polarizer):
        if not isfinite(k.angle):
            out.append(Violation("polarizer_angle", name, "angle must be finite"))
    return out
