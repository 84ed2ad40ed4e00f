from math import cos, pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spevents.envspace import (
    EnvironmentSpec,
    from_declarations,
    monotonicity_check,
    physical_spanning_set,
    polarizer_chain,
    span_dim,
)
from spevents.errors import ArgumentError, ModelError


def chain(m):
    return polarizer_chain([0.3 * (i + 1) for i in range(m)])


def test_single_transition():
    env = from_declarations(["psi"], [1.0], exhaustive=True)
    assert span_dim(env) == 1


def test_duplicate_state():
    env = from_declarations(["a", "b"], [0.5, 0.5], {("a", "b"): 1.0})
    assert span_dim(env) == 1


def test_partial_overlap_full_rank():
    env = from_declarations(["a", "b"], [0.5, 0.5], {("a", "b"): 0.5})
    assert span_dim(env) == 2
    assert env.overlap("b", "a") == 0.5


def test_inconsistent_gram():
    # three unit vectors with pairwise overlap -0.9 cannot exist
    env = from_declarations("abc", [0.5] * 3, {("a", "b"): -0.9, ("b", "c"): -0.9, ("a", "c"): -0.9})
    with pytest.raises(ModelError):
        span_dim(env)


def test_gram_validation():
    with pytest.raises(ModelError):
        EnvironmentSpec(("a", "b"), (1, 0), np.array([[1, 0.3], [0.2, 1]]))
    with pytest.raises(ModelError):
        EnvironmentSpec(("a",), (1,), np.array([[2.0]]))
    with pytest.raises(ArgumentError):
        from_declarations(["a"], [1], {("a", "z"): 0})


def test_exhaustive_normalisation():
    with pytest.raises(ModelError):
        from_declarations(["a", "b"], [0.5, 0.5], exhaustive=True)


def test_physical_spanning_set():
    env = from_declarations(["a", "b", "c"], [0.6, 0.0, 0.8])
    assert physical_spanning_set(env) == ("a", "c")


@pytest.mark.parametrize("m", range(1, 9))
def test_chain_dimension(m):
    env = chain(m)
    assert span_dim(env) == m + 1
    assert env.generic


def test_chain_single_zero_angle():
    assert span_dim(polarizer_chain([0.0])) == 2


def test_chain_labels():
    env = polarizer_chain([0.1, 0.2])
    assert env.labels == ((1, 0.1), (2, 0.2), (2, pi / 2 - 0.2))


def test_chain_amplitudes():
    # photon polarised at pi/4 meets one polariser at theta
    env = polarizer_chain([0.3])
    assert env.amplitudes[0] == pytest.approx(cos(0.3 - pi / 4))
    assert env.amplitudes[1] == pytest.approx(cos(pi / 2 - 0.3 - pi / 4))


def test_degenerate_chain_flagged():
    env = polarizer_chain([0.4, 0.4, 0.4])
    assert span_dim(env) == 4
    assert not env.generic


@pytest.mark.parametrize("a,b", [(2, 3), (1, 5), (4, 4)])
def test_monotonicity_examples(a, b):
    assert monotonicity_check(chain(a), chain(b))


def test_monotonicity_not_nested():
    with pytest.raises(ArgumentError):
        monotonicity_check(chain(3), chain(2))


def test_monotonicity_conflicting_overlaps():
    small = from_declarations(["a", "b"], [0.5, 0.5], {("a", "b"): 0.5}, environment=["x"])
    large = from_declarations(["a", "b", "c"], [0.5, 0.5, 0.5], environment=["x", "y"])
    with pytest.raises(ArgumentError):
        monotonicity_check(small, large)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_random_nestings_monotone(m, extra, seed):
    rng = np.random.default_rng(seed)
    angles = list(rng.uniform(0, pi, m + extra))
    small, large = polarizer_chain(angles[:m]), polarizer_chain(angles)
    assert monotonicity_check(small, large)
    assert span_dim(small) >= 1
