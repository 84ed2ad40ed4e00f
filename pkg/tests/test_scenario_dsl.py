import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spevents.dsl import NAMED_GATES, parse, render
from spevents.errors import ParseError, UnknownNameError, ValidationError
from spevents.figures import BUILTIN_INSTANCES, BUILTIN_NAMES, builtin, builtin_text
from spevents.qcore import BellKind
from spevents.scenario import (
    BeamSplitterBellMeasure,
    Detector,
    Gate,
    InferredEvent,
    InteractionNode,
    Particle,
    Polarizer,
    PreparePair,
    Scenario,
    position,
    validate,
    worldline,
)

FIG1 = (
    "particle a at (0,0) vel -1\nparticle b at (0,0) vel 1\n"
    "node pair at (0,0) on a,b kind=PsiMinus\n"
    "node detector at (10,-10) on a\nnode detector at (10,10) on b"
)


def rules(sc):
    return {v.rule for v in validate(sc)}


def test_parse_bell_example():
    sc = parse(FIG1)
    assert sc.particle_ids == ("a", "b")
    assert [n.kind.keyword for n in sc.nodes] == ["pair", "detector", "detector"]
    assert sc.nodes[0].kind == PreparePair(BellKind.PSI_MINUS)
    assert sc.particle("a").velocities == (-1.0,)


def test_empty_input():
    with pytest.raises(ParseError) as e:
        parse("")
    assert (e.value.line, e.value.column) == (1, 1)


def test_undeclared_participant_named():
    with pytest.raises(ValidationError) as e:
        parse("particle a at (0,0) vel 0\nnode bs at (0,0) on x,y")
    assert any(v.rule == "unknown_particle" and v.subject == "x" for v in e.value.violations)


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("particle a at (0,0) vel 0 junk", 1, 27),
        ("particle a at (0 0) vel 0", 1, 18),
        ("particle a at (0,0) vel 2", 1, 25),
        ("particle a at (0,0) vel 0\nnode teleport at (1,0) on a", 2, 6),
        ("particle a at (0,0) vel 0\nnode gate at (1,0) on a op=Q", 2, 28),
        ("particle a at (0,0) vel 0\nscenario late", 2, 1),
        ("frobnicate", 1, 1),
        ("particle a at (0,0) vel 0\nnode detector at (1,0) on a outcome=", 2, 37),
    ],
)
def test_parse_error_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.column) == (line, col)
    lines = text.splitlines()
    assert 1 <= e.value.line <= len(lines)
    assert 1 <= e.value.column <= len(lines[e.value.line - 1]) + 1


def test_comments_and_whitespace():
    sc = parse("# a comment\n\n  particle   a at ( 0 , 0 )  vel 0   # trailing\n")
    assert sc.particle_ids == ("a",)


def test_header_and_expressions():
    sc = parse(
        'scenario demo "a \\"quoted\\" description"\n'
        "particle p at (0, 0) vel 0\n"
        "node polarizer at (1, 0) on p angle=pi/4 outcome=pass\n"
        "node gate at (2, 0) on p matrix=[[sqrt(1/2), sqrt(1/2)], [sqrt(1/2), -sqrt(1/2)]]\n"
        "node gate at (3, 0) on p matrix=[[0, -1j], [1j, 0]]\n"
    )
    assert sc.name == "demo" and sc.description == 'a "quoted" description'
    assert sc.nodes[0].kind.angle == pytest.approx(np.pi / 4)
    assert np.allclose(sc.nodes[1].kind.array, NAMED_GATES["H"])
    assert np.allclose(sc.nodes[2].kind.array, NAMED_GATES["Y"])


def test_named_gate_tensor():
    sc = parse("particle a at (0,0) vel 0\nnode gate at (1,0) on a op=[H]\n")
    assert sc.nodes[0].kind.label == ("H",)


def test_gate_arity_validation():
    sc = Scenario(
        (Particle("a", InferredEvent(0, 0), (0.0,)),),
        (InteractionNode(InferredEvent(1, 0), ("a",), Gate.from_array(np.eye(4))),),
    )
    assert "arity" in rules(sc)
    bad = Scenario(sc.particles, (InteractionNode(InferredEvent(1, 0), ("a",), Gate.from_array(np.eye(3))),))
    assert "gate_matrix" in rules(bad)


def test_bs_outcome_names():
    text = builtin_text("swap_bs")
    sc = parse(text)
    bs = next(n for n in sc.nodes if n.kind.keyword == "bs")
    assert bs.kind == BeamSplitterBellMeasure(4)


# -- validation ---------------------------------------------------------------------------

def test_geometry_violation():
    sc = parse("particle a at (0,0) vel 1\nnode detector at (5, 5) on a")
    assert validate(sc) == []
    off = parse("particle a at (0,0) vel 1\nnode detector at (5, 100) on a", check=False)
    assert rules(off) == {"geometry"}


def test_equal_time_on_shared_particle_is_ordering_violation():
    sc = parse(
        "particle a at (0,0) vel 0\nnode gate at (1, 0) on a op=H\nnode detector at (1, 0) on a",
        check=False,
    )
    assert "ordering" in rules(sc)


def test_equal_time_same_place_is_ordering_violation():
    sc = parse(
        "particle a at (0,0) vel 0\nparticle b at (0,0) vel 0\n"
        "node detector at (1, 0) on a\nnode detector at (1, 0) on b",
        check=False,
    )
    assert "ordering" in rules(sc)


def test_spacelike_tie_allowed():
    assert validate(parse(FIG1)) == []


def test_decreasing_time():
    sc = parse("particle a at (0,0) vel 0\nnode gate at (2, 0) on a op=H\nnode gate at (1, 0) on a op=H", check=False)
    assert "ordering" in rules(sc)


@pytest.mark.parametrize(
    "text,rule",
    [
        ("particle a at (0,0) vel 0\nparticle a at (1,0) vel 0", "duplicate_particle"),
        ("particle a at (0,0) vel 0\nnode detector at (1,0) on a outcome=3", "outcome_range"),
        ("particle a at (0,0) vel 0\nparticle b at (0,0) vel 0\nnode bs at (1,0) on a,a", "distinct_participants"),
        ("particle a at (0,0) vel 0\nnode detector at (1,0) on a\nnode gate at (2,0) on a op=X", "after_absorption"),
        ("particle a at (5,0) vel 0\nnode gate at (1,0) on a op=X", "before_birth"),
        ("particle a at (0,0) vel 0\nparticle b at (0,0) vel 0\nnode pair at (1,0) on a,b kind=PhiPlus", "pair_at_birth"),
        ("particle a at (0,0) vel 0\nnode bs at (1,0) on a", "arity"),
    ],
)
def test_rules(text, rule):
    assert rule in rules(parse(text, check=False))


def test_worldline_legs():
    sc = builtin("swap_bs")
    legs = worldline(sc, "2")
    assert [(l.start.t, l.end.t, l.velocity) for l in legs] == [(-10, 0, 1), (0, 5, -1)]
    assert position(sc, "2", -5) == pytest.approx(-5)
    assert position(sc, "1", 20) is None


def test_unabsorbed_worldline_runs_to_horizon():
    sc = parse("particle a at (0,0) vel 0.5\nparticle b at (0,3) vel 0\nnode detector at (4,3) on b")
    legs = worldline(sc, "a")
    assert legs[-1].end == InferredEvent(4, 2)
    assert legs[-1].end_node is None


# -- builtins -----------------------------------------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_INSTANCES)
def test_builtins_validate(name):
    assert validate(builtin(name)) == []


def test_builtin_shapes():
    bp = builtin("bell_pair")
    assert len(bp.particles) == 2 and len(bp.nodes) == 3
    sw = builtin("swap_bs")
    kinds = sorted(n.kind.keyword for n in sw.nodes)
    assert len(sw.particles) == 4 and kinds == ["bs"] + ["detector"] * 4 + ["pair"] * 2


def test_polarizer_chain_builtin():
    sc = builtin("polarizer_chain(5)")
    assert sum(isinstance(n.kind, Polarizer) for n in sc.nodes) == 5
    assert builtin("polarizer_chain_5") == sc


def test_unknown_builtin_lists_names():
    with pytest.raises(UnknownNameError) as e:
        builtin("nope")
    for name in BUILTIN_NAMES:
        assert name in str(e.value)


# -- canonical round trip -----------------------------------------------------------------

@pytest.mark.parametrize("name", BUILTIN_INSTANCES)
def test_roundtrip_builtins(name):
    sc = builtin(name)
    text = render(sc)
    assert parse(text) == sc
    assert render(parse(text)) == text


finite = st.floats(-50, 50, allow_nan=False).map(lambda v: round(v, 6))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=3),
    finite,
    finite,
    st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=4, max_size=4),
    st.sampled_from([None, 0, 1]),
)
def test_roundtrip_random(vels, t0, x0, entries, outcome):
    v = vels[0]
    sc = Scenario(
        (Particle("p1", InferredEvent(t0, x0), tuple(vels)),),
        (
            InteractionNode(InferredEvent(t0 + 1, x0 + v), ("p1",), Gate.from_array(np.reshape(entries, (2, 2)))),
            InteractionNode(
                InferredEvent(t0 + 2, x0 + v + (vels[1] if len(vels) > 1 else v)), ("p1",), Detector(outcome)
            ),
        ),
        name="random",
        description='with "quotes" and \\ backslash',
    )
    assert parse(render(sc), check=False) == sc
