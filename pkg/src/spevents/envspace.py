"""Environment-relative Hilbert spaces built from declared transition overlaps.

An environment is described by the states a system can transition into
(labels), the transition amplitudes, and an abstract Gram matrix of declared
overlaps between those states. Dimensions are Gram ranks; no concrete
embedding is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, ModelError
from .qcore import TOL_NORM

PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    labels: tuple[Hashable, ...]
    amplitudes: tuple[complex, ...]
    gram: np.ndarray
    environment: tuple[Hashable, ...] = ()
    exhaustive: bool = False
    generic: bool = True

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ArgumentError("labels must be unique")
        if len(self.amplitudes) != n:
            raise ArgumentError("one amplitude per label is required")
        g = np.array(self.gram, dtype=complex)
        if g.shape != (n, n):
            raise ArgumentError(f"Gram matrix must be {n}x{n}, got {g.shape}")
        if not np.allclose(g, g.conj().T, atol=TOL_NORM):
            raise ModelError("overlap declarations are not symmetric")
        if not np.allclose(np.diag(g), 1, atol=TOL_NORM):
            raise ModelError("every state must have unit overlap with itself")
        if self.exhaustive:
            total = sum(abs(a) ** 2 for a in self.amplitudes)
            if abs(total - 1) >= TOL_NORM:
                raise ModelError(f"exhaustive transition probabilities sum to {total!r}")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))
        object.__setattr__(self, "environment", tuple(self.environment))

    def overlap(self, a: Hashable, b: Hashable) -> complex:
        return complex(self.gram[self.labels.index(a), self.labels.index(b)])


def from_declarations(
    labels: Sequence[Hashable],
    amplitudes: Sequence[complex],
    overlaps: Mapping[tuple[Hashable, Hashable], complex] | None = None,
    environment: Sequence[Hashable] = (),
    exhaustive: bool = False,
) -> EnvironmentSpec:
    """Build a spec from pairwise overlap declarations; undeclared pairs are orthogonal."""
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    g = np.eye(len(labels), dtype=complex)
    for (a, b), value in (overlaps or {}).items():
        if a not in index or b not in index:
            raise ArgumentError(f"overlap declared for unknown label pair {(a, b)!r}")
        if a == b:
            continue
        g[index[a], index[b]] = value
        g[index[b], index[a]] = np.conj(value)
    return EnvironmentSpec(labels, tuple(amplitudes), g, tuple(environment), exhaustive)


def span_dim(env: EnvironmentSpec) -> int:
    if not env.labels:
        return 0
    eig = np.linalg.eigvalsh(env.gram)
    if eig[0] < -PSD_TOL:
        raise ModelError(f"overlap declarations are not realisable (Gram eigenvalue {eig[0]:.3g})")
    return int(np.count_nonzero(eig > PSD_TOL))


def physical_spanning_set(env: EnvironmentSpec, tol: float = 1e-12) -> tuple[Hashable, ...]:
    """Labels reached with nonzero transition probability."""
    return tuple(lab for lab, a in zip(env.labels, env.amplitudes) if abs(a) > tol)


def polarizer_chain(angles: Sequence[float], initial_angle: float = pi / 4) -> EnvironmentSpec:
    """A photon meeting polarizers at ``angles`` (radians), keeping the last pass state.

    Labels are ``(i, theta_i)`` for the absorption state at polarizer ``i``
    (1-based) plus ``(m, pi/2 - theta_m)`` for passing the last one. All
    distinct labels are declared orthogonal. Amplitudes follow the photon
    through the chain with real polarization states ``cos a|0> + sin a|1>``.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise ArgumentError("polarizer chain needs at least one polarizer")
    m = len(angles)
    labels = [(i + 1, th) for i, th in enumerate(angles)]
    labels.append((m, pi / 2 - angles[-1]))
    amps = []
    carry, state = 1.0, float(initial_angle)
    for th in angles:
        amps.append(carry * cos(th - state))
        carry *= cos(pi / 2 - th - state)
        state = pi / 2 - th
    amps.append(carry)
    reduced = sorted(round(a % pi, 12) for a in angles)
    distinct = len(set(reduced)) == len(reduced)
    nonzero = all(abs(a) > 1e-12 for a in amps)
    return EnvironmentSpec(
        labels=tuple(labels),
        amplitudes=tuple(amps),
        gram=np.eye(m + 1, dtype=complex),
        environment=tuple(("polarizer", i + 1, th) for i, th in enumerate(angles)),
        exhaustive=False,
        generic=distinct and nonzero,
    )


def monotonicity_check(env_small: EnvironmentSpec, env_large: EnvironmentSpec) -> bool:
    """``span_dim(small) <= span_dim(large)`` for nested environments.

    Nesting is judged on environment elements; labels shared by both specs
    must carry identical overlap declarations.
    """
    if not set(env_small.environment) <= set(env_large.environment):
        raise ArgumentError("environments are not nested")
    common = [lab for lab in env_small.labels if lab in env_large.labels]
    for a in common:
        for b in common:
            if abs(env_small.overlap(a, b) - env_large.overlap(a, b)) > TOL_NORM:
                raise ArgumentError(f"overlap declarations differ on {(a, b)!r}")
    return span_dim(env_small) <= span_dim(env_large)
