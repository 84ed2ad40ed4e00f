from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spevents import pbr
from spevents.errors import ArgumentError, ModelError
from spevents.eventgraph import build_partition, simulate
from spevents.figures import builtin
from spevents.dsl import parse
from spevents.qcore import ket


def uniform_responses(n, m="M", outcomes=(1, 2, 3, 4), bip=True):
    shape = (n, n) if bip else (n,)
    return {(m, k): np.full(shape, 1 / len(outcomes)) for k in outcomes}


def test_model_validation():
    with pytest.raises(ModelError):
        pbr.OnticModel(2, {"0": [0.7, 0.7]})
    with pytest.raises(ModelError):
        pbr.OnticModel(2, {"0": [1, 0]}, {("M", 1): [0.5, 0.5], ("M", 2): [0.2, 0.2]})
    with pytest.raises(ModelError):
        pbr.OnticModel(0, {})


def test_born_sum_examples():
    det = pbr.OnticModel(2, {"P": [0, 1]}, {("M", 1): [0, 1], ("M", 2): [1, 0]})
    assert pbr.born_sum(det, "P", "M", 1) == 1
    uni = pbr.OnticModel(2, {"P": [0.5, 0.5]}, {("M", 1): [0, 1], ("M", 2): [1, 0]})
    assert pbr.born_sum(uni, "P", "M", 1) == 0.5
    with pytest.raises(ArgumentError):
        pbr.born_sum(uni, "Q", "M", 1)
    with pytest.raises(ArgumentError):
        pbr.born_sum(uni, "P", "M", 9)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_born_sum_normalised(n, k, seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(n))
    r = rng.dirichlet(np.ones(k), size=n)  # rows: ontic state, cols: outcome
    model = pbr.OnticModel(n, {"P": p}, {("M", j + 1): r[:, j] for j in range(k)})
    total = sum(pbr.born_sum(model, "P", "M", j + 1) for j in range(k))
    assert total == pytest.approx(1, abs=1e-9)


def test_overlap_examples():
    m = pbr.OnticModel(4, {"a": [0.5, 0.5, 0, 0], "b": [0, 0.5, 0.5, 0], "c": [0, 0, 0, 1], "d": [0, 0, 0, 1]})
    assert pbr.overlap(m, "a", "b") == pytest.approx(0.25)
    assert pbr.overlap(m, "b", "a") == pbr.overlap(m, "a", "b")
    assert pbr.overlap(m, "a", "c") == 0
    assert pbr.overlap(m, "c", "d") == 1


def test_independence_gap_examples():
    assert pbr.independence_gap(np.outer([0.3, 0.7], [0.5, 0.5]), [0.3, 0.7], [0.5, 0.5]) == 0
    assert pbr.independence_gap(np.diag([0.5, 0.5]), [0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.25)
    with pytest.raises(ArgumentError):
        pbr.independence_gap(np.eye(3), [1, 0], [1, 0])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_gap_zero_on_products(n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    assert pbr.independence_gap(np.outer(a, b), a, b) < 1e-15


# -- phi table ----------------------------------------------------------------------------

def test_phi_states_explicit():
    s = 1 / sqrt(2)
    phi1 = pbr.phi_basis()[0]
    assert np.allclose(phi1.amps, [0, s, s, 0])
    for phi in pbr.phi_basis():
        assert phi.norm == pytest.approx(1)


def test_phi_table_zero_chain():
    t = pbr.phi_table()
    for k in range(4):
        assert t[k, k] < 1e-18


def test_phi_table_phi1_minus_minus():
    # (|01> + |10>)/sqrt2 against |--> = (|00> - |01> - |10> + |11>)/2: amplitude -1/sqrt2
    assert pbr.phi_table()[0, 3] == pytest.approx(0.5)


def test_phi_table_matches_direct_inner_products():
    kets = {"00": ket("00"), "0-": ket("0-"), "-0": ket("-0"), "--": ket("--")}
    t = pbr.phi_table()
    for k, phi in enumerate(pbr.phi_basis()):
        for j, label in enumerate(kets):
            assert t[k, j] == abs(np.vdot(phi.amps, kets[label].amps)) ** 2


# -- witness ------------------------------------------------------------------------------

def test_witness_shared_support():
    w = pbr.pbr_contradiction_witness(pbr.shared_support_model())
    assert w is not None
    assert (w.outcome, w.preparation) == (1, ("0", "0"))
    assert w.quantum_probability < 1e-18 and w.lower_bound > 0


def test_witness_none_for_disjoint_and_correlated():
    assert pbr.pbr_contradiction_witness(pbr.disjoint_support_model()) is None
    assert pbr.pbr_contradiction_witness(pbr.correlated_model()) is None


@pytest.mark.parametrize("factory", [pbr.shared_support_model, pbr.disjoint_support_model, pbr.correlated_model])
def test_grid_and_lp_agree(factory):
    model = factory()
    for target in range(4):
        g = pbr.min_forbidden_probability(model, target, "grid")
        l = pbr.min_forbidden_probability(model, target, "lp")
        assert g == pytest.approx(l, abs=1e-9) or (np.isinf(g) and np.isinf(l))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.booleans())
def test_witness_iff_overlap(n, seed, disjoint):
    rng = np.random.default_rng(seed)
    if disjoint:
        cut = int(rng.integers(1, n))
        p0 = np.zeros(n)
        p0[:cut] = rng.dirichlet(np.ones(cut))
        pm = np.zeros(n)
        pm[cut:] = rng.dirichlet(np.ones(n - cut))
    else:
        p0, pm = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    model = pbr.OnticModel(n, {"0": p0, "-": pm}, uniform_responses(n))
    w = pbr.pbr_contradiction_witness(model)
    assert (w is None) == (pbr.overlap(model, "0", "-") <= pbr.PROB_TOL)


def test_witness_rejects_single_system_responses():
    model = pbr.OnticModel(2, {"0": [0.5, 0.5], "-": [0.5, 0.5]}, uniform_responses(2, bip=False))
    with pytest.raises(ModelError):
        pbr.pbr_contradiction_witness(model)


# -- merged-event joint -------------------------------------------------------------------

@pytest.mark.parametrize("name", ["pbr_prep_00", "pbr_prep_mm"])
def test_merged_event_gap_positive(name):
    sc = builtin(name)
    joint = pbr.merged_event_joint(sc, build_partition(simulate(sc), "closed"))
    assert joint.gap > 0
    assert joint.shared_event is not None
    assert joint.label == "demonstration model"
    assert joint.joint.sum() == pytest.approx(1)


def test_merged_event_gap_zero_when_disconnected():
    sc = parse(
        "particle a at (0, 0) vel 0\nparticle b at (0, 5) vel 0\n"
        "node detector at (1, 0) on a\nnode detector at (1, 5) on b\n"
    )
    joint = pbr.merged_event_joint(sc, build_partition(simulate(sc), "closed"))
    assert joint.gap == 0 and joint.shared_event is None


def test_phi_two_and_three_coincide_as_defined():
    # the states are kept exactly as defined; phi_2 and phi_3 are the same vector,
    # so the four do not form a basis, while the zero chain is unaffected
    b = pbr.phi_basis()
    assert abs(abs(np.vdot(b[1].amps, b[2].amps)) - 1) < 1e-12
    assert np.allclose(pbr.phi_table().sum(axis=0), [1, 0.5, 0.5, 1])
