"""JSON-ready reports for scenario runs and verification suites.

Reports contain no timings or other run-dependent values; dumped with
``sort_keys`` they are byte-stable for fixed input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .eventgraph import EventPartition, TimeOrderedTrace, WorldlineSegment
from .opclass import OpClass
from .qcore import StateVec

DIGITS = 12


@dataclass
class Verdict:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": jsonable(self.value),
            "expected": jsonable(self.expected),
            "detail": self.detail,
        }


@dataclass
class Report:
    title: str
    body: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        d = dict(self.body)
        d["title"] = self.title
        d["verdicts"] = [v.to_dict() for v in self.verdicts]
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [self.title]
        for key in ("boundary_mode", "joint_probability"):
            if key in self.body:
                lines.append(f"  {key}: {self.body[key]}")
        for n in self.body.get("nodes", []):
            lines.append(
                f"  node {n['index']:>2} t={n['t']:<8g} {n['kind']:<9} on {','.join(n['participants']):<6}"
                f" {n['class']['label']:<6} outcome={n['outcome']} p={n['probability']:.6g}"
            )
        for e in self.body.get("events", []):
            members = " ".join(f"{s['particle']}{s['legs']}" for s in e["segments"])
            name = e["shape"]["canonical_name"] or "-"
            lines.append(f"  event {e['id']}: shape {name} {e['shape']['counts']} : {members}")
        for v in self.verdicts:
            lines.append(f"  [{'PASS' if v.passed else 'FAIL'}] {v.name}: {jsonable(v.value)}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def jsonable(v):
    """Plain JSON values; floats rounded, complex numbers as ``[re, im]``."""
    if isinstance(v, (bool, type(None), str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        r = round(float(v), DIGITS)
        return 0.0 if r == 0 else r
    if isinstance(v, (complex, np.complexfloating)):
        return [jsonable(v.real), jsonable(v.imag)]
    if isinstance(v, StateVec):
        return [jsonable(a) for a in v.amps]
    if isinstance(v, np.ndarray):
        return [jsonable(a) for a in v.tolist()]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [jsonable(x) for x in v]
        return sorted(items, key=repr) if isinstance(v, (set, frozenset)) else items
    return str(v)


def class_dict(c: OpClass) -> dict:
    return {
        "label": c.label(),
        "local": c.local,
        "invertible": c.invertible,
        "zero_operator": c.zero_operator,
        "ray_restricted": c.ray_restricted,
        "note": c.note,
    }


def segment_dict(s: WorldlineSegment) -> dict:
    return {
        "particle": s.particle_id,
        "start": [jsonable(s.start.t), jsonable(s.start.x)],
        "end": [jsonable(s.end.t), jsonable(s.end.x)],
        "start_closed": s.start_closed,
        "end_closed": s.end_closed,
        "legs": list(s.legs),
    }


def partition_verdicts(trace: TimeOrderedTrace, part: EventPartition) -> list[Verdict]:
    legs = sorted((pid, leg.ordinal) for pid, ls in trace.legs.items() for leg in ls)
    covered = sorted((s.particle_id, o) for ss in part.events.values() for s in ss for o in s.legs)
    return [
        Verdict("partition_property", legs == covered, len(covered), len(legs),
                "every worldline leg lies in exactly one event"),
        Verdict("events_connected", all(sh is not None for sh in part.shape.values()), len(part.events), None,
                "each event is connected through shared inferred events"),
    ]


def run_report(trace: TimeOrderedTrace, part: EventPartition) -> Report:
    sc = trace.scenario
    nodes = []
    for st in trace.steps:
        n = st.node
        nodes.append({
            "index": st.index,
            "t": jsonable(n.at.t),
            "x": jsonable(n.at.x),
            "kind": n.kind.keyword,
            "participants": list(n.participants),
            "class": class_dict(st.op_class),
            # a non-LI node is where the participants experience time
            "time": "none" if st.op_class.is_li else "fundamental",
            "outcome": st.outcome,
            "probability": jsonable(st.probability),
            "outcome_probabilities": jsonable(st.outcome_probabilities),
        })
    events = []
    for eid, segs in sorted(part.events.items()):
        sh = part.shape[eid]
        events.append({
            "id": eid,
            "shape": {
                "canonical_name": sh.canonical_name,
                "counts": [sh.n_segments, sh.n_leaves, sh.n_branch_vertices],
            },
            "segments": [segment_dict(s) for s in sorted(segs, key=lambda s: (s.particle_id, s.legs))],
        })
    final = trace.steps[-1] if trace.steps else None
    body = {
        "scenario": sc.name,
        "description": sc.description,
        "boundary_mode": part.boundary_mode.value,
        "nodes": nodes,
        "events": events,
        "joint_probability": jsonable(trace.joint_probability),
        "final_state": {
            "particles": list(final.live_after) if final else [],
            "amplitudes": jsonable(final.post_state) if final and final.post_state is not None else [],
        },
    }
    return Report(f"scenario {sc.name}", body, partition_verdicts(trace, part))
