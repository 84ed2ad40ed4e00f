from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spevents.errors import ArgumentError, PreconditionError
from spevents.opclass import (
    Factorization,
    OpClass,
    Operator,
    RayAction,
    classify,
    factor,
    inverse_roundtrip,
    is_invertible,
    is_local,
    matrix_rank,
    operator_schmidt_rank,
    ray_action,
    realign,
    tensor_all,
)
from spevents.oracles import brute_force_is_local, kron_fit_residual
from spevents.qcore import BellKind, bell, ket

from conftest import random_complex, random_unitary

S2 = 1 / sqrt(2)
H = np.array([[1, 1], [1, -1]]) * S2
I2 = np.eye(2)
P0 = np.diag([1.0, 0.0])
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
F2 = Factorization.qubits(2)


def bell_proj(kind):
    v = bell(kind).amps
    return np.outer(v, v.conj())


def test_operator_validation():
    with pytest.raises(Exception):
        Operator(np.ones((2, 3)))
    with pytest.raises(ArgumentError):
        Operator([[np.inf, 0], [0, 1]])
    assert Operator(np.eye(3)).dim == 3


def test_factorization():
    assert Factorization((2, 3)).dim == 6
    with pytest.raises(ArgumentError):
        Factorization((1, 2))
    assert Factorization((1,)).dim == 1


@pytest.mark.parametrize("m,rank", [(np.eye(4), 4), (P0, 1), (np.zeros((3, 3)), 0)])
def test_matrix_rank(m, rank):
    assert matrix_rank(m) == rank


@pytest.mark.parametrize("m,inv", [(H, True), (P0, False), (bell_proj(BellKind.PSI_PLUS), False)])
def test_is_invertible(m, inv):
    assert is_invertible(m) == inv


@pytest.mark.parametrize("m,rank", [(np.kron(H, I2), 1), (CNOT, 2), (SWAP, 4)])
def test_operator_schmidt_rank(m, rank):
    assert operator_schmidt_rank(m, F2, 0) == rank


def test_realign_matches_definition():
    a, b = np.arange(4).reshape(2, 2) + 1.0, np.arange(4).reshape(2, 2) * 1j + 2
    r = realign(np.kron(a, b), F2, 0)
    # realignment of a product is the outer product of the vectorised factors
    assert np.allclose(r, np.outer(a.reshape(-1), b.reshape(-1)))


def test_bad_cut():
    with pytest.raises(ArgumentError):
        operator_schmidt_rank(np.eye(4), F2, 2)


@pytest.mark.parametrize(
    "m,f,local",
    [
        (np.kron(H, H), F2, True),
        (bell_proj(BellKind.PSI_MINUS), F2, False),
        (P0, Factorization((2,)), True),
        (CNOT, F2, False),
        (np.kron(np.kron(H, P0), I2), Factorization.qubits(3), True),
        (np.kron(CNOT, I2), Factorization.qubits(3), False),
    ],
)
def test_is_local(m, f, local):
    assert is_local(m, f) == local


def test_classify_examples():
    assert classify(H, Factorization((2,))) == OpClass(True, True)
    assert classify(bell_proj(BellKind.PHI_PLUS), F2) == OpClass(False, False)
    assert classify(np.kron(P0, P0), F2) == OpClass(True, False)


def test_zero_operator_flagged():
    c = classify(np.zeros((4, 4)), F2)
    assert not c.local and c.zero_operator and c.note


def test_mixed_factor_dims():
    rng = np.random.default_rng(0)
    a, b = random_complex(rng, (3, 3)), random_complex(rng, (2, 2))
    f = Factorization((3, 2))
    assert is_local(np.kron(a, b), f)
    assert not is_local(random_complex(rng, (6, 6)), f)


@pytest.mark.parametrize(
    "parts",
    [[H, I2], [2 * I2, I2], [P0, H], [np.diag([1, 2j]), H, np.diag([3, -1])]],
)
def test_factor_reproduces_input(parts):
    m = tensor_all(parts).matrix
    f = Factorization.qubits(len(parts))
    fs = factor(m, f)
    assert np.allclose(tensor_all(fs).matrix, m)
    for t in fs[1:]:
        assert np.linalg.norm(t.matrix) == pytest.approx(sqrt(2))


def test_factor_convention():
    fs = factor(np.kron(2 * I2, I2), F2)
    assert np.allclose(fs[0].matrix, 2 * I2) and np.allclose(fs[1].matrix, I2)
    fs = factor(np.kron(H, I2), F2)
    assert np.allclose(fs[0].matrix, H) and np.allclose(fs[1].matrix, I2)


def test_factor_nonlocal():
    with pytest.raises(PreconditionError):
        factor(CNOT, F2)


@pytest.mark.parametrize(
    "m,psi,action",
    [(H, ket("0"), RayAction.IDENTITY), (P0, ket("1"), RayAction.ZERO), (P0, ket("+"), RayAction.IDENTITY)],
)
def test_ray_action(m, psi, action):
    assert ray_action(m, psi) is action


def test_ray_action_non_square():
    assert ray_action(np.ones((2, 3)), ket("0")) is RayAction.OTHER


def test_inverse_roundtrip():
    rt = inverse_roundtrip(np.kron(H, np.diag([1, 1j])), F2)
    assert rt.forward.is_li and rt.inverse.is_li and rt.composite.is_li
    assert rt.identity_residual < 1e-12
    with pytest.raises(PreconditionError):
        inverse_roundtrip(np.kron(P0, I2), F2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_local_unitary_invariance(seed, product):
    rng = np.random.default_rng(seed)
    op = np.kron(random_complex(rng, (2, 2)), random_complex(rng, (2, 2))) if product else random_complex(rng, (4, 4))
    u = np.kron(random_unitary(rng), random_unitary(rng))
    v = np.kron(random_unitary(rng), random_unitary(rng))
    assert is_local(u @ op @ v, F2) == is_local(op, F2) == product


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_rank_monotonicity_and_ray_dichotomy(seed, rank):
    rng = np.random.default_rng(seed)
    op = random_complex(rng, (4, rank)) @ random_complex(rng, (rank, 4))
    assert is_invertible(op) == (rank == 4)
    if not is_invertible(op):
        assert matrix_rank(op) < 4
        _, _, vh = np.linalg.svd(op)
        from spevents.qcore import StateVec

        kernel = StateVec(vh[-1].conj())
        assert ray_action(op, kernel) is RayAction.ZERO
    else:
        from spevents.qcore import StateVec

        v = random_complex(rng, 4)
        assert ray_action(op, StateVec(v / np.linalg.norm(v))) is RayAction.IDENTITY


# -- oracle self-checks -------------------------------------------------------------------

def test_oracle_recognises_products_and_dense(rng):
    prod_op = np.kron(random_complex(rng, (2, 2)), random_complex(rng, (2, 2)))
    assert kron_fit_residual(prod_op, rng) < 1e-9
    assert kron_fit_residual(random_complex(rng, (4, 4)), rng) > 1e-3
    assert not brute_force_is_local(np.zeros((4, 4)), rng)
