"""Bridges between the symbolic layer and the grid oracle, plus the
reproducible verification suite behind ``hiddencluster verify``.

Everything here evaluates symbolic objects (coupling terms, subsystem
graphs) as concrete operations on discretized states, so the two routes to
any identity stay independent: the oracle never consults the decomposition
it is checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gates import (
    CouplingTerm,
    chain_adjacency,
    decompose_cz_multimode,
    decompose_cz_two_mode,
    expand_adjacency,
    require_binary_adjacency,
)
from .graphs import (
    CvType,
    ModeSpec,
    NodeState,
    SubsystemGraph,
    build_cluster,
    edge_coefficient,
    gkp_labeled,
    gkp_plus,
    logical_subgraph,
    momentum,
    structurally_equal,
)
from .measurement import HADAMARD, LogicalFrame, measure_p0
from .modular import DEFAULT_ALPHA, SubsystemKind
from .oracle import (
    DiscretizedState,
    GridSpec,
    apply_cz,
    apply_subsystem_coupling,
    connected_correlator,
    coupling_strength,
    fidelity,
    prepare_gkp_state,
    prepare_momentum_state,
    project_p0,
    purity,
    qubit_cluster_state,
    reduced_density,
    tensor_product,
)

_ALL_KINDS = (SubsystemKind.LOGICAL, SubsystemKind.GAUGE_BIN, SubsystemKind.GAUGE_MODULAR)


# --- evaluating symbolic objects on the grid ---------------------------------


def apply_coupling_term(state: DiscretizedState, term: CouplingTerm) -> DiscretizedState:
    """Apply one symbolic coupling factor to a grid state."""
    return apply_subsystem_coupling(
        state,
        (term.op_a.mode, term.op_a.kind),
        (term.op_b.mode, term.op_b.kind),
        term.coefficient,
    )


def apply_terms(state: DiscretizedState, terms) -> DiscretizedState:
    for term in terms:
        state = apply_coupling_term(state, term)
    return state


def mode_state(grid: GridSpec, spec: ModeSpec) -> DiscretizedState:
    if spec.cv_type is CvType.MOMENTUM:
        return prepare_momentum_state(grid)
    if spec.cv_type is CvType.GKP_PLUS:
        inv = 1.0 / math.sqrt(2.0)
        return prepare_gkp_state(grid, inv, inv)
    assert spec.amplitudes is not None
    return prepare_gkp_state(grid, *spec.amplitudes)


def product_state(grid: GridSpec, specs: list[ModeSpec]) -> DiscretizedState:
    return tensor_product([mode_state(grid, s) for s in specs])


def direct_cluster_state(
    grid: GridSpec,
    adjacency: np.ndarray,
    specs: list[ModeSpec],
    g_scale: float = 1.0,
) -> DiscretizedState:
    """Route one: the position-position gate applied edge by edge."""
    adjacency = require_binary_adjacency(adjacency)
    if adjacency.shape[0] != len(specs):
        raise DomainError("adjacency size does not match the number of mode specs")
    state = product_state(grid, specs)
    g = g_scale * math.pi / grid.alpha**2
    n = adjacency.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if adjacency[i, j] != 0.0:
                state = apply_cz(state, i, j, g)
    return state


def decomposed_cluster_state(
    grid: GridSpec, adjacency: np.ndarray, specs: list[ModeSpec]
) -> DiscretizedState:
    """Route two: the surviving symbolic coupling terms, factor by factor."""
    state = product_state(grid, specs)
    return apply_terms(state, decompose_cz_multimode(adjacency, grid.alpha).all_terms)


def graph_state(grid: GridSpec, graph: SubsystemGraph) -> DiscretizedState:
    """Evaluate a subsystem graph as a grid state.

    Node states become per-subsystem vectors (uniform, pinned, or labeled)
    and each edge applies its coupling phase; mode axes follow the graph's
    mode list order.
    """
    if grid.alpha != graph.alpha:
        raise DomainError("grid and graph disagree on the bin size")
    n = grid.n
    axis_of = {record.index: axis for axis, record in enumerate(graph.modes)}
    factors = []
    for record in graph.modes:
        logical_node = graph.node_of(record.index, SubsystemKind.LOGICAL)
        if logical_node.state is NodeState.LOGICAL_LABELED:
            logical = np.array(graph.mode_amplitudes(record.index), dtype=complex)
        else:
            logical = np.full(2, 1.0 / math.sqrt(2.0), dtype=complex)
        bins = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
        modular_node = graph.node_of(record.index, SubsystemKind.GAUGE_MODULAR)
        if modular_node.state is NodeState.MODULAR_ZERO:
            modular = np.zeros(n, dtype=complex)
            modular[grid.zero_u_index] = 1.0
        else:
            modular = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
        vec = np.kron(np.kron(logical, bins), modular)
        factors.append(DiscretizedState(grid, 1, vec))
    state = tensor_product(factors)
    for edge in graph.edges:
        node_a, node_b = graph.node_by_id(edge.a), graph.node_by_id(edge.b)
        state = apply_subsystem_coupling(
            state,
            (axis_of[node_a.mode], node_a.kind),
            (axis_of[node_b.mode], node_b.kind),
            edge_coefficient(graph, edge),
        )
    return state


def align_global_phase(reference: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rotate target's global phase to match reference at its largest amplitude."""
    index = int(np.argmax(np.abs(reference)))
    rotation = reference[index] * np.conj(target[index])
    magnitude = abs(rotation)
    if magnitude == 0.0:
        return target
    return target * (rotation / magnitude)


def max_amplitude_deviation(
    a: DiscretizedState, b: DiscretizedState, fix_phase: bool = True
) -> float:
    x, y = a.amplitudes, b.amplitudes
    if x.shape != y.shape:
        raise DomainError("states have different dimensions")
    if fix_phase:
        y = align_global_phase(x, y)
    return float(np.max(np.abs(x - y))) if x.size else 0.0


# --- sampling helpers ---------------------------------------------------------


def sample_quantum_numbers(rng: np.random.Generator, alpha: float, count: int):
    """Random (ell, m, u) arrays with bins in [-5, 5]."""
    ell = rng.integers(0, 2, size=count).astype(float)
    m = rng.integers(-5, 6, size=count).astype(float)
    u = rng.uniform(-alpha / 2, alpha / 2, size=count)
    return ell, m, u


def sample_label(rng: np.random.Generator) -> tuple[complex, complex]:
    """Random qubit amplitudes kept away from the poles.

    Both weights stay in [0.2, 0.8] so that every coupling touching the
    logical subsystem acts nontrivially; at the poles some couplings are
    genuinely inert and produce no correlation to detect.
    """
    weight = rng.uniform(0.2, 0.8)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return (complex(math.sqrt(weight)), math.sqrt(1.0 - weight) * np.exp(1j * phase))


def _term_values(ell, m, u, kind: SubsystemKind):
    if kind is SubsystemKind.LOGICAL:
        return ell
    if kind is SubsystemKind.GAUGE_BIN:
        return m
    return u


def two_mode_phase_deviation(
    g: float, alpha: float, tuples: tuple
) -> float:
    """|exp(i g x1 x2) - product of surviving factors| over sampled tuples."""
    (ell1, m1, u1), (ell2, m2, u2) = tuples
    x1 = alpha * (ell1 + 2.0 * m1) + u1
    x2 = alpha * (ell2 + 2.0 * m2) + u2
    lhs = np.exp(1j * g * x1 * x2)
    product = np.ones_like(lhs)
    per_mode = {0: (ell1, m1, u1), 1: (ell2, m2, u2)}
    for term in decompose_cz_two_mode(g, alpha):
        va = _term_values(*per_mode[term.op_a.mode], term.op_a.kind)
        vb = _term_values(*per_mode[term.op_b.mode], term.op_b.kind)
        product = product * np.exp(1j * term.coefficient * va * vb)
    return float(np.max(np.abs(lhs - product)))


def multimode_phase_deviation(
    adjacency: np.ndarray, alpha: float, samples: list
) -> float:
    """Same identity for the tuned multimode gate with a binary adjacency."""
    g = math.pi / alpha**2
    n = adjacency.shape[0]
    x = [alpha * (ell + 2.0 * m) + u for ell, m, u in samples]
    exponent = np.zeros_like(x[0])
    for i in range(n):
        for j in range(i + 1, n):
            if adjacency[i, j] != 0.0:
                exponent = exponent + g * x[i] * x[j]
    lhs = np.exp(1j * exponent)
    product = np.ones_like(lhs)
    for term in decompose_cz_multimode(adjacency, alpha).all_terms:
        va = _term_values(*samples[term.op_a.mode], term.op_a.kind)
        vb = _term_values(*samples[term.op_b.mode], term.op_b.kind)
        product = product * np.exp(1j * term.coefficient * va * vb)
    return float(np.max(np.abs(lhs - product)))


# --- verification suite -------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
        }


def _check(name: str, deviation: float, tolerance: float) -> CheckResult:
    return CheckResult(name, bool(deviation <= tolerance), float(deviation), tolerance)


def all_subsystem_pairs(n_modes: int):
    subsystems = [(mode, kind) for mode in range(n_modes) for kind in _ALL_KINDS]
    for i in range(len(subsystems)):
        for j in range(i + 1, len(subsystems)):
            yield subsystems[i], subsystems[j]


def graph_edge_pairs(graph: SubsystemGraph) -> set:
    """Subsystem pairs joined by an edge, as unordered (mode, kind) pairs."""
    pairs = set()
    for edge in graph.edges:
        node_a, node_b = graph.node_by_id(edge.a), graph.node_by_id(edge.b)
        pair = frozenset(((node_a.mode, node_a.kind), (node_b.mode, node_b.kind)))
        pairs.add(pair)
    return pairs


def random_binary_adjacency(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    upper = np.triu(rng.integers(0, 2, size=(n_modes, n_modes)), k=1).astype(float)
    return upper + upper.T


def random_mode_specs(rng: np.random.Generator, n_modes: int) -> list[ModeSpec]:
    specs = []
    for _ in range(n_modes):
        draw = rng.integers(0, 3)
        if draw == 0:
            specs.append(momentum())
        elif draw == 1:
            specs.append(gkp_plus())
        else:
            specs.append(gkp_labeled(*sample_label(rng)))
    return specs


def _expected_block(alpha: float) -> np.ndarray:
    pi = math.pi
    return np.array(
        [
            [pi, 2 * pi, pi / alpha],
            [2 * pi, 4 * pi, 2 * pi / alpha],
            [pi / alpha, 2 * pi / alpha, pi / alpha**2],
        ]
    )


def _wire_unzip_deviation(
    grid: GridSpec, n_modes: int, label: tuple[complex, complex], g_scale: float
) -> float:
    """Worst deficit across one full teleportation run down a wire.

    Covers, at every step: fidelity of the measured oracle state against the
    state of the symbolic post-measurement graph, structural equality of
    that graph with a fresh build on the residual wire, and the neighbor's
    modular mass away from u = 0.  At the end, the single remaining mode is
    compared against the Hadamard-evolved label directly.
    """
    adjacency = chain_adjacency(n_modes)
    specs = [momentum() for _ in range(n_modes - 1)] + [gkp_labeled(*label)]
    graph = build_cluster(adjacency, specs, grid.alpha)
    state = direct_cluster_state(grid, adjacency, specs, g_scale=g_scale)

    worst = 0.0
    remaining = list(range(n_modes))
    frame = LogicalFrame(0, label)
    current = n_modes - 1
    expected_label = np.array(label, dtype=complex)
    for _ in range(n_modes - 1):
        axis = remaining.index(current)
        projected, weight = project_p0(state, axis)
        if weight == 0.0:
            return float("inf")
        state = projected.normalized()
        remaining.pop(axis)

        result = measure_p0(graph, current, frame)
        graph, frame = result.graph, result.frame
        expected_label = HADAMARD @ expected_label
        neighbor = result.graph.node_by_id(result.record.converted_node).mode

        worst = max(worst, 1.0 - fidelity(state, graph_state(grid, graph)))

        residual_specs = [
            gkp_labeled(*frame.current_label) if index == neighbor else momentum()
            for index in remaining
        ]
        rebuilt = build_cluster(chain_adjacency(len(remaining)), residual_specs, grid.alpha)
        if not structurally_equal(graph, rebuilt):
            return float("inf")

        axis = remaining.index(neighbor)
        rho_u = reduced_density(state, [(axis, SubsystemKind.GAUGE_MODULAR)])
        off_mass = float(
            sum(
                rho_u[j, j].real
                for j in range(grid.n)
                if j != grid.zero_u_index
            )
        )
        # the off-mass bound is far tighter than the fidelity bound; scale it
        # so one worst-case number covers both
        worst = max(worst, off_mass * 1e10)
        current = neighbor

    final = prepare_gkp_state(grid, *expected_label)
    worst = max(worst, 1.0 - fidelity(state, final))
    label_drift = float(
        np.max(np.abs(np.array(frame.current_label) - expected_label))
    )
    return max(worst, label_drift)


def run_verification(
    alpha: float = DEFAULT_ALPHA,
    grid_n: int = 2,
    max_modes: int = 3,
    seed: int = 0,
    g_scale: float = 1.0,
) -> dict:
    """Run the identity suite and return a reproducible report dictionary.

    ``g_scale`` rescales the direct-route gate weight; any value other than
    1 detunes the gate and the state-equality checks fail, which is the
    intended negative control.
    """
    if grid_n < 1 or grid_n > 4:
        raise DomainError("grid_n must be in 1..4 (resource bound)")
    if max_modes < 2 or max_modes > 3:
        raise DomainError("max_modes must be 2 or 3 (resource bound)")
    rng = np.random.default_rng(seed)
    grid = GridSpec(n=grid_n, alpha=alpha)
    checks: list[CheckResult] = []

    # Phase identities for the two-mode gate at random and tuned weights.
    tuples = (
        sample_quantum_numbers(rng, alpha, 1000),
        sample_quantum_numbers(rng, alpha, 1000),
    )
    tuned = math.pi / alpha**2
    weights = list(rng.uniform(-2.0 * tuned, 2.0 * tuned, size=20))
    weights += [tuned, tuned / 2.0, 0.0]
    deviation = max(two_mode_phase_deviation(g, alpha, tuples) for g in weights)
    checks.append(_check("two_mode_phase_identity", deviation, 1e-10))
    checks.append(
        _check(
            "tuned_term_count",
            float(abs(len(decompose_cz_two_mode(tuned, alpha)) - 6)),
            0.0,
        )
    )

    # Multimode identity on a random 4-mode adjacency.
    adjacency4 = random_binary_adjacency(rng, 4)
    samples4 = [sample_quantum_numbers(rng, alpha, 1000) for _ in range(4)]
    checks.append(
        _check(
            "multimode_phase_identity",
            multimode_phase_deviation(adjacency4, alpha, samples4),
            1e-10,
        )
    )

    # Block expansion of the two-mode edge.
    expanded = expand_adjacency((tuned) * chain_adjacency(2), alpha)
    expected = _expected_block(alpha)
    relative = np.abs(expanded[0:3, 3:6] - expected) / np.abs(expected)
    checks.append(_check("block_expansion", float(relative.max()), 1e-12))

    # Hidden-cluster state identity for momentum inputs.
    deviation = 0.0
    for n_modes in range(2, max_modes + 1):
        a = chain_adjacency(n_modes)
        specs = [momentum() for _ in range(n_modes)]
        lhs = direct_cluster_state(grid, a, specs, g_scale=g_scale)
        rhs = decomposed_cluster_state(grid, a, specs)
        deviation = max(deviation, max_amplitude_deviation(lhs, rhs))
    checks.append(_check("cv_cluster_identity", deviation, 1e-12))

    # GKP clusters: logical state pure, equal to the qubit cluster, gauge flat.
    deviation = 0.0
    for n_modes in range(2, max_modes + 1):
        a = chain_adjacency(n_modes)
        specs = [gkp_plus() for _ in range(n_modes)]
        state = direct_cluster_state(grid, a, specs, g_scale=g_scale)
        logical = reduced_density(
            state, [(mode, SubsystemKind.LOGICAL) for mode in range(n_modes)]
        )
        deviation = max(deviation, 1.0 - purity(logical))
        deviation = max(deviation, 1.0 - fidelity(qubit_cluster_state(a), logical))
        correlators = [
            abs(connected_correlator(state, pair_a, pair_b))
            for pair_a, pair_b in all_subsystem_pairs(n_modes)
        ]
        deviation = max(deviation, max(correlators))
    checks.append(_check("gkp_cluster_product", deviation, 1e-12))

    # Hybrid two-mode state: asymmetric factorization and correlation set.
    state_dev = 0.0
    absent_strength = 0.0
    present_margin = 0.0
    for _ in range(5):
        label = sample_label(rng)
        specs = [momentum(), gkp_labeled(*label)]
        a = chain_adjacency(2)
        lhs = direct_cluster_state(grid, a, specs, g_scale=g_scale)
        rhs = decomposed_cluster_state(grid, a, specs)
        state_dev = max(state_dev, max_amplitude_deviation(lhs, rhs))
        graph = build_cluster(a, specs, alpha)
        edge_pairs = graph_edge_pairs(graph)
        if grid.n > 1:
            for pair_a, pair_b in all_subsystem_pairs(2):
                strength = coupling_strength(lhs, pair_a, pair_b)
                if frozenset((pair_a, pair_b)) in edge_pairs:
                    present_margin = max(present_margin, 1e-6 - strength)
                else:
                    absent_strength = max(absent_strength, strength)
    checks.append(_check("hybrid_state_identity", state_dev, 1e-12))
    checks.append(
        _check(
            "hybrid_correlation_structure",
            max(absent_strength, present_margin),
            1e-12,
        )
    )

    # Teleportation down a wire unzips the neighbor and applies Hadamards.
    deviation = 0.0
    for n_modes in range(2, max_modes + 1):
        for _ in range(5):
            deviation = max(
                deviation,
                _wire_unzip_deviation(grid, n_modes, sample_label(rng), g_scale),
            )
    checks.append(_check("unzip_teleportation", deviation, 1e-10))

    # Graph calculus: the logical subgraph always returns the input adjacency.
    failures = 0
    for _ in range(50):
        n_modes = int(rng.integers(2, 9))
        a = random_binary_adjacency(rng, n_modes)
        graph = build_cluster(a, random_mode_specs(rng, n_modes), alpha)
        if not np.array_equal(logical_subgraph(graph), a):
            failures += 1
        if len(graph.nodes) != 3 * n_modes:
            failures += 1
    checks.append(_check("graph_soundness", float(failures), 0.0))

    report = {
        "config": {
            "alpha": float(alpha),
            "grid_n": grid_n,
            "max_modes": max_modes,
            "seed": int(seed),
            "g_scale": float(g_scale),
        },
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
    return report
