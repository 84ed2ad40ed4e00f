"""Named identity checks grouped into suites, for ``spevents verify``.

Every check returns a :class:`Verdict` with its measured value. Random
inputs come from fixed seeds so reports are reproducible byte for byte.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import envspace, pbr, qcore, thermo
from .eventgraph import build_partition, collapsed_support, delayed_choice_equivalence, simulate
from .figures import builtin
from .opclass import Factorization, is_local
from .oracles import brute_force_is_local
from .qcore import BellKind, TOL_NORM, bell, ket, tensor
from .report import Report, Verdict

SEED = 20240517


# -- qcore ---------------------------------------------------------------------------------

def es_rhs() -> qcore.StateVec:
    """Four-term Bell-basis sum in particle order 1,4,2,3, permuted to 1,2,3,4."""
    b = {k: bell(k) for k in BellKind}
    terms = [
        (0.5, BellKind.PSI_PLUS),
        (-0.5, BellKind.PSI_MINUS),
        (-0.5, BellKind.PHI_PLUS),
        (0.5, BellKind.PHI_MINUS),
    ]
    acc = np.zeros(16, dtype=complex)
    for c, k in terms:
        acc = acc + c * tensor(b[k], b[k]).amps
    s1423 = qcore.StateVec(acc)
    # qubit k of the result is qubit order[k] of the 1,4,2,3-ordered state
    return qcore.permute_qubits(s1423, (0, 2, 3, 1))


def check_es_identity() -> Verdict:
    lhs = tensor(bell(BellKind.PSI_MINUS), bell(BellKind.PSI_MINUS))
    r = float(np.linalg.norm(lhs.amps - es_rhs().amps))
    return Verdict("es_identity", r < TOL_NORM, r, TOL_NORM, "|Psi-> x |Psi-> against the Bell-basis expansion")


def check_theorem_identity() -> Verdict:
    s = tensor(bell(BellKind.PSI_MINUS), bell(BellKind.PSI_MINUS))
    kept = qcore.drop_qubits(s, (0, 3))
    res, phase = qcore.global_phase_residual(kept, ket("--"))
    ok = res < TOL_NORM and abs(phase + 1) < TOL_NORM
    return Verdict("theorem_identity", ok, {"residual": res, "phase": phase}, {"phase": -1},
                   "drop particles 1 and 4 from the expansion, compare with |-->")


def check_bell_concurrence() -> Verdict:
    vals = [qcore.concurrence(bell(k)) for k in BellKind]
    err = max(abs(v - 1) for v in vals)
    return Verdict("bell_concurrence", err < TOL_NORM, vals, 1.0, "every Bell state has concurrence 1")


def check_swap_monogamy() -> Verdict:
    """After the Psi- outcome on 2,3 the state splits as (1,4) x (2,3); 1,2 and 3,4 are no longer entangled."""
    sc = builtin("swap_bs")
    tr = simulate(sc)
    st = next(s for s in tr.steps if s.node.kind.keyword == "bs")
    live = list(st.live_after)
    post = st.post_state
    q = {p: live.index(p) for p in live}
    c14 = qcore.concurrence(qcore.factor_out(post, (q["1"], q["4"])))
    split = qcore.schmidt_rank(post, (q["1"], q["4"]))
    e12 = qcore.pair_entangled(post, q["1"], q["2"])
    e34 = qcore.pair_entangled(post, q["3"], q["4"])
    ok = abs(c14 - 1) < TOL_NORM and split == 1 and not e12 and not e34
    return Verdict("swap_monogamy", ok, {"concurrence_14": c14, "schmidt_rank_14|23": split,
                                         "entangled_12": e12, "entangled_34": e34},
                   {"concurrence_14": 1, "schmidt_rank_14|23": 1, "entangled_12": False, "entangled_34": False})


# -- opclass -------------------------------------------------------------------------------

def random_operator_batch(seed: int = SEED, n_products: int = 500, n_dense: int = 500):
    rng = np.random.default_rng(seed)

    def g(shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    products = [np.kron(g((2, 2)), g((2, 2))) for _ in range(n_products)]
    dense = [g((4, 4)) for _ in range(n_dense)]
    return products, dense


def check_classifier_vs_oracle(seed: int = SEED) -> Verdict:
    products, dense = random_operator_batch(seed)
    f = Factorization.qubits(2)
    rng = np.random.default_rng(seed + 1)
    agree = 0
    prod_local = 0
    for m in products + dense:
        a = is_local(m, f)
        agree += a == brute_force_is_local(m, rng)
    for m in products:
        prod_local += is_local(m, f)
    frac = agree / (len(products) + len(dense))
    ok = frac >= 0.999 and prod_local == len(products)
    return Verdict("classifier_vs_oracle", ok, {"agreement": frac, "products_local": prod_local},
                   {"agreement": ">= 0.999", "products_local": len(products)})


def check_standard_gates() -> Verdict:
    from .dsl import NAMED_GATES
    from .opclass import classify

    h_i = classify(np.kron(NAMED_GATES["H"], np.eye(2)), Factorization.qubits(2))
    cnot = classify(NAMED_GATES["CNOT"], Factorization.qubits(2))
    ok = h_i.is_li and not cnot.local and cnot.invertible
    return Verdict("standard_gates", ok, {"H(x)I": h_i.label(), "CNOT": cnot.label()},
                   {"H(x)I": "LI", "CNOT": "non-LI"})


# -- thermo --------------------------------------------------------------------------------

def check_thermo_claims() -> Verdict:
    cases = moving = 0
    bad_t, bad_s = [], []
    for n_p in range(1, 4):
        for n_q in range(n_p, 4):
            for tr in thermo.all_transitions(n_p, n_q):
                cases += 1
                if not tr.moves:
                    continue
                moving += 1
                rep = thermo.thermo_report(tr)
                if rep.t_class.local:
                    bad_t.append((tr.start.sigma, tr.end.sigma, n_q))
                if not rep.s_class.is_li:
                    bad_s.append((tr.start.sigma, tr.end.sigma, n_q))
    ok = not bad_t and not bad_s
    return Verdict("thermo_claims", ok, {"transitions": cases, "moving": moving,
                                         "T_local_failures": len(bad_t), "S_not_LI_failures": len(bad_s)},
                   {"T_local_failures": 0, "S_not_LI_failures": 0},
                   "T non-local whenever a particle moves; S always LI")


# -- pbr -----------------------------------------------------------------------------------

def check_phi_table() -> Verdict:
    table = pbr.phi_table()
    diag = [float(table[i, i]) for i in range(4)]
    oracle = np.empty((4, 4))
    for k, phi in enumerate(pbr.phi_basis()):
        for j, prep in enumerate(pbr.PREPARATIONS):
            oracle[k, j] = abs(np.vdot(phi.amps, pbr.prepared_state(prep).amps)) ** 2
    ok = max(diag) < 1e-18 and np.array_equal(table, oracle)
    return Verdict("phi_table_zeros", ok, {"diagonal": diag, "matches_oracle": bool(np.array_equal(table, oracle))},
                   {"diagonal": "< 1e-18"})


def check_witness_models() -> Verdict:
    shared = pbr.pbr_contradiction_witness(pbr.shared_support_model())
    disjoint = pbr.pbr_contradiction_witness(pbr.disjoint_support_model())
    corr = pbr.pbr_contradiction_witness(pbr.correlated_model())
    ok = shared is not None and disjoint is None and corr is None
    val = {
        "shared_support": None if shared is None else {"outcome": shared.outcome, "preparation": "".join(shared.preparation)},
        "disjoint_support": disjoint,
        "correlated": corr,
    }
    return Verdict("pbr_witness", ok, val, {"shared_support": "witness", "disjoint_support": None, "correlated": None})


def check_merged_event_gap() -> Verdict:
    gaps = {}
    for name in ("pbr_prep_00", "pbr_prep_mm"):
        sc = builtin(name)
        part = build_partition(simulate(sc), "closed")
        gaps[name] = pbr.merged_event_joint(sc, part).gap
    return Verdict("merged_event_gap", all(g > 0 for g in gaps.values()), gaps, "> 0",
                   "demonstration model: joint over (event, bit) ontic states")


# -- events --------------------------------------------------------------------------------

def _shapes(name: str) -> list:
    part = build_partition(simulate(builtin(name)), "closed")
    return sorted((s.canonical_name or "-") for s in part.shape.values())


def check_event_partitions() -> Verdict:
    bell_pair = _shapes("bell_pair")
    swap = _shapes("swap_bs")
    part = build_partition(simulate(builtin("swap_mirror")), "closed")
    mirror = sorted(sorted({s.particle_id for s in segs}) for segs in part.events.values())
    # each event holds every leg of the particles it touches
    full = all(
        sum(len(s.legs) for s in segs) == sum(len(part.trace.legs[p]) for p in {s.particle_id for s in segs})
        for segs in part.events.values()
    )
    ok = bell_pair == ["V"] and swap == ["V", "W"] and mirror == [["1", "2"], ["3", "4"]] and full
    return Verdict("event_partitions", ok,
                   {"bell_pair": bell_pair, "swap_bs": swap, "swap_mirror": mirror, "mirror_full_worldlines": full},
                   {"bell_pair": ["V"], "swap_bs": ["V", "W"], "swap_mirror": [["1", "2"], ["3", "4"]]})


def check_delayed_choice() -> Verdict:
    same = delayed_choice_equivalence(builtin("swap_bs"), builtin("swap_delayed"), "closed")
    differs = delayed_choice_equivalence(builtin("swap_bs"), builtin("swap_mirror"), "closed")
    ok = same and not differs
    return Verdict("delayed_choice", ok, {"swap_vs_delayed": same, "swap_vs_mirror": differs},
                   {"swap_vs_delayed": True, "swap_vs_mirror": False})


def _support_key(cs) -> tuple:
    return (tuple(sorted((s.particle_id, s.legs) for s in cs.segments)),
            tuple(sorted((p.t, p.x) for p in cs.points)))


def check_boundary_dichotomy() -> Verdict:
    sc = builtin("single_prep_measure")
    grid = [i / 8 for i in range(9)]
    closed = {_support_key(collapsed_support(sc, t, "closed")) for t in grid}
    half = {_support_key(collapsed_support(sc, t, "halfopen")) for t in grid}
    ok = len(closed) == 1 and len(half) > 1
    return Verdict("boundary_dichotomy", ok, {"closed_distinct": len(closed), "halfopen_distinct": len(half)},
                   {"closed_distinct": 1, "halfopen_distinct": "> 1"})


def check_polarizer_li() -> Verdict:
    tr = simulate(builtin("polarizer_chain(3)"))
    labels = [s.op_class.label() for s in tr.steps if s.node.kind.keyword == "polarizer"]
    return Verdict("polarizer_pass_li", all(l == "LI" for l in labels), labels, "LI",
                   "judged on the state's ray (flagged ray_restricted)")


# -- envspace ------------------------------------------------------------------------------

def _chain(m: int) -> envspace.EnvironmentSpec:
    return envspace.polarizer_chain([0.3 * (i + 1) for i in range(m)])


def check_polarizer_chain_dims() -> Verdict:
    dims = [envspace.span_dim(_chain(m)) for m in range(1, 9)]
    mono = all(envspace.monotonicity_check(_chain(a), _chain(b)) for a in range(1, 9) for b in range(a, 9))
    ok = dims == [m + 1 for m in range(1, 9)] and mono
    return Verdict("polarizer_chain_dims", ok, {"dims": dims, "monotone": mono},
                   {"dims": [m + 1 for m in range(1, 9)], "monotone": True})


SUITES: dict[str, list[Callable[[], Verdict]]] = {
    "qcore": [check_es_identity, check_theorem_identity, check_bell_concurrence, check_swap_monogamy],
    "opclass": [check_standard_gates, check_classifier_vs_oracle],
    "thermo": [check_thermo_claims],
    "pbr": [check_phi_table, check_witness_models, check_merged_event_gap],
    "events": [check_event_partitions, check_delayed_choice, check_boundary_dichotomy, check_polarizer_li],
    "envspace": [check_polarizer_chain_dims],
}
SUITE_NAMES = ("all",) + tuple(SUITES)


def run_suite(name: str) -> Report:
    if name == "all":
        checks = [c for suite in SUITES.values() for c in suite]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        from .errors import ArgumentError

        raise ArgumentError(f"unknown suite {name!r}; expected one of {', '.join(SUITE_NAMES)}")
    report = Report(f"verify {name}", {"suite": name})
    report.verdicts = [c() for c in checks]
    return report
