"""Particle/site transition maps for a lattice of distinct particles.

Between two times each particle hops to a site. Two linear representations
of the same hop are built:

* ``S`` on ``(C^|Q|)^{(x)|P|}`` keeps particles as tensor factors and moves
  their site labels;
* ``T`` on ``(C^{|P|+1})^{(x)|Q|}`` keeps sites as tensor factors and moves
  their contents (index 0 is the empty site, particle ``p`` is ``p + 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import permutations, product
from typing import Iterator

import numpy as np

from .errors import ArgumentError
from .opclass import Factorization, OpClass, Operator, classify

MAX_PARTICLES = 3
MAX_SITES = 4


@dataclass(frozen=True)
class LatticeConfig:
    n_particles: int
    n_sites: int
    sigma: tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        object.__setattr__(self, "sigma", sigma)
        if self.n_particles < 1 or self.n_sites < 1:
            raise ArgumentError("need at least one particle and one site")
        if len(sigma) != self.n_particles:
            raise ArgumentError("sigma must give one site per particle")
        if any(not 0 <= s < self.n_sites for s in sigma):
            raise ArgumentError(f"sites must lie in 0..{self.n_sites - 1}")
        if len(set(sigma)) != len(sigma):
            raise ArgumentError("particles must occupy distinct sites")

    @property
    def tau(self) -> tuple[int | None, ...]:
        """Particle at each site, ``None`` for an empty site."""
        occ: list[int | None] = [None] * self.n_sites
        for p, q in enumerate(self.sigma):
            occ[q] = p
        return tuple(occ)


@dataclass(frozen=True)
class ThermoTransition:
    start: LatticeConfig
    end: LatticeConfig

    def __post_init__(self):
        a, b = self.start, self.end
        if (a.n_particles, a.n_sites) != (b.n_particles, b.n_sites):
            raise ArgumentError("both configurations must have the same particles and sites")
        if a.n_particles > MAX_PARTICLES or a.n_sites > MAX_SITES:
            raise ArgumentError(f"lattice capped at {MAX_PARTICLES} particles and {MAX_SITES} sites")

    @property
    def moves(self) -> bool:
        return self.start.sigma != self.end.sigma


@dataclass(frozen=True)
class ThermoReport:
    s_class: OpClass
    t_class: OpClass
    time_experienced: bool


def _transposition(n: int, a: int, b: int) -> np.ndarray:
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    out = np.zeros((n, n))
    out[perm, range(n)] = 1
    return out


def build_S(tr: ThermoTransition) -> tuple[Operator, Factorization]:
    """Tensor product of per-particle site transpositions ``(sigma_0(p) sigma_1(p))``."""
    q = tr.start.n_sites
    mats = [_transposition(q, a, b) for a, b in zip(tr.start.sigma, tr.end.sigma)]
    m = reduce(np.kron, mats)
    return Operator(m), Factorization((q,) * tr.start.n_particles)


def _site_permutation(tr: ThermoTransition) -> list[int]:
    """Destination site of each site's content.

    Occupied sites send their particle where it lands; the remaining sites are
    paired with the remaining destinations in increasing order.
    """
    q = tr.start.n_sites
    dest: dict[int, int] = {}
    for p, src in enumerate(tr.start.sigma):
        dest[src] = tr.end.sigma[p]
    free_src = [s for s in range(q) if s not in dest]
    free_dst = sorted(set(range(q)) - set(dest.values()))
    dest.update(zip(free_src, free_dst))
    return [dest[s] for s in range(q)]


def build_T(tr: ThermoTransition) -> tuple[Operator, Factorization]:
    """Permutation of configurations relocating site contents."""
    q = tr.start.n_sites
    d = tr.start.n_particles + 1
    dest = _site_permutation(tr)
    dim = d**q
    m = np.zeros((dim, dim))
    for config in product(range(d), repeat=q):
        moved = [0] * q
        for site, content in enumerate(config):
            moved[dest[site]] = content
        m[_config_index(moved, d), _config_index(config, d)] = 1
    return Operator(m), Factorization((d,) * q)


def _config_index(config, d: int) -> int:
    idx = 0
    for c in config:
        idx = idx * d + c
    return idx


def config_vector(cfg: LatticeConfig) -> np.ndarray:
    """Basis vector ``(x)_q |tau(q)>`` in the site representation."""
    d = cfg.n_particles + 1
    contents = [0 if p is None else p + 1 for p in cfg.tau]
    v = np.zeros(d**cfg.n_sites)
    v[_config_index(contents, d)] = 1
    return v


def particle_vector(cfg: LatticeConfig) -> np.ndarray:
    """Basis vector ``(x)_p |sigma(p)>`` in the particle representation."""
    v = np.zeros(cfg.n_sites**cfg.n_particles)
    v[_config_index(cfg.sigma, cfg.n_sites)] = 1
    return v


def thermo_report(tr: ThermoTransition) -> ThermoReport:
    s_op, s_f = build_S(tr)
    t_op, t_f = build_T(tr)
    t_class = classify(t_op, t_f)
    return ThermoReport(classify(s_op, s_f), t_class, time_experienced=not t_class.is_li)


def all_transitions(n_particles: int, n_sites: int) -> Iterator[ThermoTransition]:
    """Every transition between placements of distinct particles on distinct sites."""
    for a in permutations(range(n_sites), n_particles):
        for b in permutations(range(n_sites), n_particles):
            yield ThermoTransition(
                LatticeConfig(n_particles, n_sites, a), LatticeConfig(n_particles, n_sites, b)
            )
