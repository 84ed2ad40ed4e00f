"""Spacetime diagrams as SVG 1.1: x to the right, inferred time upward.

Event ``i`` is stroked with ``PALETTE[i % len(PALETTE)]``: red, blue, then
green, orange, purple, brown. Beam splitters and mirrors get a dotted
horizontal tick, detectors a filled dot in the colour of the event they end.
Output depends only on the partition and scenario, so it is byte-stable.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .eventgraph import EventPartition
from .scenario import BeamSplitterBellMeasure, Detector, MirrorSeparableMeasure, Polarizer, Scenario

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
PLOT = 400.0
MARGIN = 40.0
TICK = 12.0


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_svg(partition: EventPartition, sc: Scenario, path=None) -> str:
    segs = [(eid, s) for eid, ss in sorted(partition.events.items()) for s in sorted(ss)]
    pts = [p for _, s in segs for p in (s.start, s.end)] + [n.at for n in sc.nodes]
    pts += [p.birth for p in sc.particles]
    xs, ts = [p.x for p in pts], [p.t for p in pts]
    x0, t1 = min(xs), max(ts)
    span = max(max(xs) - x0, t1 - min(ts), 1e-9)
    k = PLOT / span
    width = MARGIN * 2 + (max(xs) - x0) * k
    height = MARGIN * 2 + (t1 - min(ts)) * k

    def X(x):
        return _f(MARGIN + (x - x0) * k)

    def Y(t):
        return _f(MARGIN + (t1 - t) * k)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f"<title>{escape(sc.name)} ({partition.boundary_mode.value})</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for eid, s in segs:
        color = PALETTE[eid % len(PALETTE)]
        out.append(
            f'<line x1="{X(s.start.x)}" y1="{Y(s.start.t)}" x2="{X(s.end.x)}" y2="{Y(s.end.t)}" '
            f'stroke="{color}" stroke-width="2" data-event="{eid}" data-particle="{escape(s.particle_id)}"/>'
        )
    last_color = {}
    for eid, s in segs:
        prev = last_color.get(s.particle_id)
        if prev is None or s.end.t >= prev[0]:
            last_color[s.particle_id] = (s.end.t, PALETTE[eid % len(PALETTE)])
    for node in sc.nodes:
        k_ = node.kind
        cx, cy = X(node.at.x), Y(node.at.t)
        if isinstance(k_, (BeamSplitterBellMeasure, MirrorSeparableMeasure)):
            out.append(
                f'<line x1="{_f(float(cx) - TICK)}" y1="{cy}" x2="{_f(float(cx) + TICK)}" y2="{cy}" '
                f'stroke="black" stroke-width="1.5" stroke-dasharray="2,2" data-node="{k_.keyword}"/>'
            )
        elif isinstance(k_, Detector) or (isinstance(k_, Polarizer) and not k_.passes):
            color = last_color.get(node.participants[0], (0, "black"))[1]
            out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{color}" data-node="{k_.keyword}"/>')
        elif isinstance(k_, Polarizer):
            out.append(
                f'<line x1="{_f(float(cx) - TICK / 2)}" y1="{cy}" x2="{_f(float(cx) + TICK / 2)}" y2="{cy}" '
                f'stroke="gray" stroke-width="1.5" data-node="polarizer"/>'
            )
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
