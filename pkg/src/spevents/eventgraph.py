"""Spacetime events from a time-ordered scenario.

``simulate`` replays the scenario on the joint pure state of all live
particles and classifies each node's operator. ``build_partition`` then cuts
worldlines at non-LI nodes, merges past events when a node makes two
previously unentangled particles maximally entangled, and groups the
resulting segments into events.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from math import cos, sin, pi

import numpy as np
from networkx.utils import UnionFind

from .errors import ArgumentError, ContradictionError, GeometryError, ValidationError
from .opclass import Factorization, OpClass, classify
from .qcore import (
    StateVec,
    basis,
    bell,
    concurrence,
    embed,
    factor_out,
    ket,
    pair_entangled,
    project_out,
    tensor,
)
from .scenario import (
    GEO_TOL,
    BeamSplitterBellMeasure,
    Detector,
    Gate,
    InferredEvent,
    InteractionNode,
    Leg,
    MirrorSeparableMeasure,
    Polarizer,
    PreparePair,
    Scenario,
    validate,
    worldline,
)
from .qcore import BellKind

PROB_TOL = 1e-12
MERGE_TOL = 1e-9
# beyond this many live qubits the node operator is classified on its participants only;
# identity factors change neither locality nor invertibility
EMBED_LIMIT = 6


class BoundaryMode(enum.Enum):
    CLOSED = "closed"
    HALF_OPEN = "halfopen"
    OPEN = "open"

    @classmethod
    def parse(cls, value) -> "BoundaryMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for m in cls:
            if m.value == key:
                return m
        raise ArgumentError(f"unknown boundary mode {value!r}; expected one of closed, halfopen, open")


# -- simulation ------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TraceStep:
    index: int
    node: InteractionNode
    op_class: OpClass
    outcome: object
    probability: float
    outcome_probabilities: tuple[float, ...]
    pre_state: StateVec | None
    post_state: StateVec | None
    live_before: tuple[str, ...]
    live_after: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class TimeOrderedTrace:
    scenario: Scenario
    steps: tuple[TraceStep, ...]
    legs: dict  # particle id -> list[Leg]

    @property
    def joint_probability(self) -> float:
        return float(np.prod([s.probability for s in self.steps]))

    @property
    def classes(self) -> list[str]:
        return [s.op_class.label() for s in self.steps]


def _polarizer_vec(angle: float) -> np.ndarray:
    return np.array([cos(angle), sin(angle)], dtype=complex)


def _projectors(node: InteractionNode) -> list[np.ndarray]:
    """Rank-1 projectors for every outcome of a measuring node, in outcome order."""
    k = node.kind
    if isinstance(k, BeamSplitterBellMeasure):
        vecs = [bell(b).amps for b in BellKind]
    elif isinstance(k, MirrorSeparableMeasure):
        vecs = [basis(i, 2).amps for i in range(4)]
    elif isinstance(k, Detector):
        vecs = [basis(i, 1).amps for i in range(2)]
    elif isinstance(k, Polarizer):
        vecs = [_polarizer_vec(pi / 2 - k.angle), _polarizer_vec(k.angle)]
    else:
        raise ArgumentError(f"{k.keyword} is not a measurement")
    return [np.outer(v, v.conj()) for v in vecs]


def _outcome_slot(node: InteractionNode) -> int | None:
    """0-based index of the declared outcome, if any."""
    k = node.kind
    if isinstance(k, (BeamSplitterBellMeasure, MirrorSeparableMeasure)):
        return None if k.outcome is None else k.outcome - 1
    if isinstance(k, Detector):
        return k.outcome
    if isinstance(k, Polarizer):
        return 0 if k.passes else 1
    return None


def _outcome_value(node: InteractionNode, slot: int):
    k = node.kind
    if isinstance(k, (BeamSplitterBellMeasure, MirrorSeparableMeasure)):
        return slot + 1
    if isinstance(k, Polarizer):
        return "pass" if slot == 0 else "absorb"
    return slot


def _classify_local(matrix: np.ndarray, targets: list[int], n: int) -> OpClass:
    if n <= EMBED_LIMIT:
        return classify(embed(matrix, targets, n), Factorization.qubits(n))
    return classify(matrix, Factorization.qubits(len(targets)))


def _lone_particles(sc: Scenario) -> list:
    """Particles not born inside a pair preparation, in birth order."""
    out = []
    for p in sc.particles:
        first = sc.nodes_of(p.id)
        if first and isinstance(sc.nodes[first[0]].kind, PreparePair):
            continue
        out.append(p)
    return sorted(out, key=lambda p: p.birth.t)


def _check(sc: Scenario):
    violations = validate(sc)
    if not violations:
        return
    if all(v.rule == "geometry" for v in violations):
        raise GeometryError(violations)
    raise ValidationError(violations)


def _make_rng(rng):
    if rng is None or isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def simulate(sc: Scenario, rng=None) -> TimeOrderedTrace:
    """Replay ``sc`` node by node.

    Declared outcomes are replayed; an undeclared outcome is drawn from the
    Born distribution when ``rng`` (a generator or a seed) is given and is
    otherwise the first outcome with nonzero probability.
    """
    _check(sc)
    rng = _make_rng(rng)
    state: StateVec | None = None
    live: list[str] = []
    pending = _lone_particles(sc)
    steps = []

    def add(s: StateVec, pids):
        nonlocal state
        state = s if state is None else tensor(state, s)
        live.extend(pids)

    for i, node in enumerate(sc.nodes):
        while pending and pending[0].birth.t <= node.at.t + GEO_TOL:
            add(ket("0"), [pending.pop(0).id])
        pre, live_before = state, tuple(live)
        k = node.kind
        probs: tuple[float, ...] = (1.0,)
        outcome = None

        if isinstance(k, PreparePair):
            add(bell(k.bell), node.participants)
            cls = OpClass(False, False, note="preparation: non-LI by convention")
            prob = 1.0
        elif isinstance(k, Gate):
            targets = [live.index(p) for p in node.participants]
            full = embed(k.array, targets, len(live))
            out = StateVec(full @ state.amps, unnormalized=True)
            prob = out.norm**2
            if prob <= PROB_TOL:
                raise ContradictionError(f"node {i}: gate annihilates the state")
            state = out.normalized()
            cls = _classify_local(k.array, targets, len(live))
        else:
            targets = [live.index(p) for p in node.participants]
            projs = _projectors(node)
            branches = [embed(P, targets, len(live)) @ state.amps for P in projs]
            probs = tuple(float(np.vdot(b, b).real) for b in branches)
            slot = _outcome_slot(node)
            if slot is None:
                if rng is not None:
                    p = np.array(probs) / sum(probs)
                    slot = int(rng.choice(len(p), p=p))
                else:
                    slot = next(j for j, p in enumerate(probs) if p > PROB_TOL)
            prob = probs[slot]
            if prob <= PROB_TOL:
                raise ContradictionError(
                    f"node {i} ({k.keyword} at t={node.at.t!r}): declared outcome has zero probability"
                )
            outcome = _outcome_value(node, slot)
            cls = _classify_local(projs[slot], targets, len(live))
            if k.terminal or (isinstance(k, Polarizer) and slot == 1):
                q = targets[0]
                vec = _polarizer_vec(k.angle) if isinstance(k, Polarizer) else basis(slot, 1).amps
                if len(live) == 1:
                    state = None
                else:
                    state = project_out(state, q, vec).normalized()
                live.pop(q)
            else:
                state = StateVec(branches[slot], unnormalized=True).normalized()
                if cls.local and not cls.invertible:
                    # post-selected rank-1 pass: judged on the state's ray, where it is invertible
                    cls = OpClass(
                        True, True, ray_restricted=True,
                        note="post-selected rank-1 projection, invertible on the state's ray",
                    )
        steps.append(TraceStep(i, node, cls, outcome, float(prob), probs, pre, state, live_before, tuple(live)))

    legs = {p.id: worldline(sc, p.id) for p in sc.particles}
    return TimeOrderedTrace(sc, tuple(steps), legs)


# -- partition -------------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class WorldlineSegment:
    particle_id: str
    start: InferredEvent
    end: InferredEvent
    start_closed: bool
    end_closed: bool
    legs: tuple[int, ...] = ()

    def contains(self, point: InferredEvent, tol: float = GEO_TOL) -> bool:
        t0, t1 = self.start.t, self.end.t
        if point.t < t0 - tol or point.t > t1 + tol:
            return False
        if abs(point.t - t0) <= tol:
            return self.start_closed and abs(point.x - self.start.x) <= tol
        if abs(point.t - t1) <= tol:
            return self.end_closed and abs(point.x - self.end.x) <= tol
        x = self.start.x + (self.end.x - self.start.x) * (point.t - t0) / (t1 - t0)
        return abs(point.x - x) <= tol


@dataclass(frozen=True)
class ShapeSignature:
    n_segments: int
    n_leaves: int
    n_branch_vertices: int
    canonical_name: str | None = None


@dataclass(frozen=True, eq=False)
class EventPartition:
    events: dict  # event id -> frozenset[WorldlineSegment]
    shape: dict  # event id -> ShapeSignature
    boundary_mode: BoundaryMode
    trace: TimeOrderedTrace | None = field(default=None, repr=False)

    def event_of(self, seg: WorldlineSegment) -> int:
        for eid, segs in self.events.items():
            if seg in segs:
                return eid
        raise ArgumentError(f"segment {seg} is not in the partition")

    def segments_of(self, pid: str) -> list[WorldlineSegment]:
        segs = [s for ss in self.events.values() for s in ss if s.particle_id == pid]
        return sorted(segs, key=lambda s: s.start.t)

    def first_event(self, pid: str) -> int:
        segs = self.segments_of(pid)
        if not segs:
            raise ArgumentError(f"particle {pid!r} has no segments")
        return self.event_of(segs[0])

    def membership(self) -> frozenset:
        """Events as sets of ``(particle, leg ordinals)``, independent of timing."""
        return frozenset(frozenset((s.particle_id, s.legs) for s in segs) for segs in self.events.values())


def _entangled_groups(state: StateVec | None, live, pids) -> list[list[str]]:
    """Group ``pids`` by pairwise entanglement in ``state``."""
    uf = UnionFind(pids)
    for a in range(len(pids)):
        for b in range(a + 1, len(pids)):
            ia, ib = live.index(pids[a]), live.index(pids[b])
            if pair_entangled(state, ia, ib):
                uf.union(pids[a], pids[b])
    groups: dict = {}
    for p in pids:
        groups.setdefault(uf[p], []).append(p)
    return list(groups.values())


def _creates_max_entanglement(step: TraceStep) -> bool:
    if len(step.node.participants) != 2 or step.post_state is None:
        return False
    a, b = step.node.participants
    if a not in step.live_after or b not in step.live_after:
        return False
    if a in step.live_before and b in step.live_before:
        if pair_entangled(step.pre_state, step.live_before.index(a), step.live_before.index(b)):
            return False
    else:
        return False
    pair = factor_out(step.post_state, (step.live_after.index(a), step.live_after.index(b)))
    return pair is not None and concurrence(pair) >= 1 - MERGE_TOL


def _node_closes(mode: BoundaryMode) -> tuple[bool, bool]:
    """(end closed, start closed) at a non-LI node for segments ending / starting there."""
    return {
        BoundaryMode.CLOSED: (True, True),
        BoundaryMode.HALF_OPEN: (False, True),
        BoundaryMode.OPEN: (False, False),
    }[mode]


def build_partition(trace: TimeOrderedTrace, boundary_mode) -> EventPartition:
    """Group worldline segments into spacetime events.

    Non-LI nodes end the participants' current events and start fresh ones
    (shared by participants left entangled with each other); LI nodes are
    transparent; a node producing concurrence 1 between previously
    unentangled participants merges their past events. ``boundary_mode``
    decides which side owns each cut point.
    """
    mode = BoundaryMode.parse(boundary_mode)
    sc = trace.scenario
    uf = UnionFind()
    fresh = iter(range(10**9))
    token_after: dict[tuple[str, int], int] = {}
    current: dict[str, int] = {}
    birth_token: dict[str, int] = {}
    for p in _lone_particles(sc):
        birth_token[p.id] = next(fresh)

    for step in trace.steps:
        node, parts = step.node, step.node.participants
        for pid in parts:
            if pid not in current and pid in birth_token:
                current[pid] = birth_token[pid]
        if step.op_class.is_li:
            for pid in parts:
                token_after[(pid, step.index)] = current[pid]
            continue
        if _creates_max_entanglement(step):
            a, b = parts
            uf.union(current[a], current[b])
        survivors = [p for p in parts if p in step.live_after]
        for group in _entangled_groups(step.post_state, list(step.live_after), survivors) if survivors else []:
            tok = next(fresh)
            uf[tok]
            for pid in group:
                current[pid] = tok
        for pid in parts:
            if pid in survivors:
                token_after[(pid, step.index)] = current[pid]
            else:
                current.pop(pid, None)

    li_nodes = {s.index for s in trace.steps if s.op_class.is_li}
    end_cl, start_cl = _node_closes(mode)
    horizon_closed = mode is BoundaryMode.CLOSED
    birth_closed = mode is not BoundaryMode.OPEN
    pieces: list[tuple[int, WorldlineSegment]] = []
    for p in sc.particles:
        run: list[Leg] = []
        run_tok = None

        def flush():
            if not run:
                return
            first, last = run[0], run[-1]
            if first.start_node is None:
                s_closed = birth_closed
            elif first.start_node in li_nodes:
                s_closed = True if first.start_node != _birth_node(sc, p.id) else birth_closed
            else:
                s_closed = start_cl
            if last.end_node is None:
                e_closed = horizon_closed
            elif last.end_node in li_nodes:
                e_closed = True
            else:
                e_closed = end_cl
            seg = WorldlineSegment(
                p.id, first.start, last.end, s_closed, e_closed, tuple(l.ordinal for l in run)
            )
            pieces.append((run_tok, seg))

        for leg in trace.legs[p.id]:
            if leg.start_node is None:
                tok = birth_token[p.id]
            else:
                tok = token_after.get((p.id, leg.start_node))
                if tok is None:
                    tok = birth_token[p.id]
            joinable = (
                run
                and leg.start_node in li_nodes
                and abs(leg.velocity - run[-1].velocity) <= GEO_TOL
                and uf[tok] == uf[run_tok]
            )
            if joinable:
                run.append(leg)
                continue
            flush()
            run, run_tok = [leg], tok
        flush()

    grouped: dict = {}
    for tok, seg in pieces:
        grouped.setdefault(uf[tok], []).append(seg)
    order = {pid: i for i, pid in enumerate(sc.particle_ids)}
    keyed = sorted(
        grouped.values(),
        key=lambda segs: min((s.start.t, order[s.particle_id], s.legs) for s in segs),
    )
    events = {i: frozenset(segs) for i, segs in enumerate(keyed)}
    shapes = {i: shape_signature(segs) for i, segs in events.items()}
    return EventPartition(events, shapes, mode, trace)


def _birth_node(sc: Scenario, pid: str) -> int | None:
    p = sc.particle(pid)
    for i in sc.nodes_of(pid):
        if sc.nodes[i].at.t <= p.birth.t + GEO_TOL:
            return i
        break
    return None


def shape_signature(event) -> ShapeSignature:
    """Segment, leaf and branch-vertex counts with a name for the shapes in the figures."""
    segs = list(event)
    if not segs:
        raise ArgumentError("shape of an empty event")
    times: dict = {}
    degree: Counter = Counter()
    adj: dict = {}
    for s in segs:
        a, b = s.start.key(), s.end.key()
        times[a], times[b] = s.start.t, s.end.t
        degree[a] += 1
        degree[b] += 1
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen, stack = set(), [next(iter(adj))]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(adj[v])
    if len(seen) != len(adj):
        raise ArgumentError("event segments are not connected")
    leaves = [v for v, d in degree.items() if d == 1]
    branch = [v for v, d in degree.items() if d >= 2]
    counts = (len(segs), len(leaves), len(branch))
    return ShapeSignature(*counts, _shape_name(counts, times, adj, leaves, branch))


def _shape_name(counts, times, adj, leaves, branch) -> str | None:
    if counts == (1, 2, 0):
        return "I"
    if counts == (2, 2, 1):
        mid = times[branch[0]]
        if all(mid < times[v] for v in leaves):
            return "V"
        if all(mid > times[v] for v in leaves):
            return "Λ"
        return None
    if counts == (4, 2, 3) and all(len(adj[v]) == 2 for v in branch):
        path = [min(leaves)]
        while len(path) < 5:
            nxt = [v for v in adj[path[-1]] if v not in path]
            if not nxt:
                return None
            path.append(nxt[0])
        t = [times[v] for v in path]
        if t[0] > t[1] < t[2] > t[3] < t[4]:
            return "W"
    return None


# -- comparisons -----------------------------------------------------------------------------

def _node_match_key(node: InteractionNode):
    k = node.kind
    if isinstance(k, (BeamSplitterBellMeasure, MirrorSeparableMeasure)):
        return ("two-party measurement", node.participants)
    return node.key()


def _match_nodes(a: Scenario, b: Scenario) -> list[tuple[int, int]]:
    if len(a.nodes) != len(b.nodes):
        raise ArgumentError("scenarios have different numbers of nodes")
    pool: dict = {}
    for j, node in enumerate(b.nodes):
        pool.setdefault(_node_match_key(node), []).append(j)
    pairs = []
    for i, node in enumerate(a.nodes):
        js = pool.get(_node_match_key(node))
        if not js:
            raise ArgumentError(f"node {i} ({node.kind.keyword} on {','.join(node.participants)}) has no counterpart")
        pairs.append((i, js.pop(0)))
    return pairs


def delayed_choice_equivalence(sc_a: Scenario, sc_b: Scenario, boundary_mode="closed", tol: float = 1e-9) -> bool:
    """Whether two re-timings of one experiment give isomorphic partitions and the same statistics.

    The scenarios must share particles and nodes up to node placement; a
    beam splitter may stand in for a mirror at the same participants.
    """
    if sc_a.particle_ids != sc_b.particle_ids:
        raise ArgumentError("scenarios have different particles")
    pairs = _match_nodes(sc_a, sc_b)
    ta, tb = simulate(sc_a), simulate(sc_b)
    pa, pb = build_partition(ta, boundary_mode), build_partition(tb, boundary_mode)
    if len(pa.events) != len(pb.events):
        return False
    if Counter(pa.shape.values()) != Counter(pb.shape.values()):
        return False
    if pa.membership() != pb.membership():
        return False
    for i, j in pairs:
        if ta.steps[i].outcome != tb.steps[j].outcome:
            return False
    return abs(ta.joint_probability - tb.joint_probability) <= tol


@dataclass(frozen=True)
class CollapsedSupport:
    """Where a collapse at ``t_c`` acts: whole segments, or bare inferred points."""

    segments: frozenset = frozenset()
    points: frozenset = frozenset()
    event_id: int | None = None


def collapsed_support(sc: Scenario, t_c: float, boundary_mode) -> CollapsedSupport:
    """Support of the collapse of the finally measured state, pinned at time ``t_c``.

    The collapse is placed on the measured particle's worldline at ``t_c``.
    If that point belongs to the particle's event (as decided by the
    boundary mode) the whole event collapses; otherwise only the point does.
    """
    lo, hi = sc.time_range
    if not lo - GEO_TOL <= t_c <= hi + GEO_TOL:
        raise ArgumentError(f"t_c={t_c!r} outside the scenario time range [{lo!r}, {hi!r}]")
    trace = simulate(sc)
    part = build_partition(trace, boundary_mode)
    measured = [s for s in trace.steps if s.node.kind.terminal or isinstance(s.node.kind, Detector)]
    if not measured:
        raise ArgumentError("scenario has no final measurement")
    last = measured[-1]
    pid = last.node.participants[0]
    segs = part.segments_of(pid)
    x = None
    for s in segs:
        if s.start.t - GEO_TOL <= t_c <= s.end.t + GEO_TOL:
            dt = s.end.t - s.start.t
            x = s.start.x + (s.end.x - s.start.x) * (t_c - s.start.t) / dt if dt else s.start.x
            break
    if x is None:
        raise ArgumentError(f"measured particle {pid!r} is not present at t_c={t_c!r}")
    point = InferredEvent(float(t_c), float(x))
    eid = part.event_of(segs[-1])
    event = part.events[eid]
    if any(s.contains(point) for s in event):
        return CollapsedSupport(segments=event, event_id=eid)
    return CollapsedSupport(points=frozenset({point}), event_id=eid)
