"""Typed subsystem graphs for CV, GKP and hybrid cluster states.

Every physical mode contributes three nodes (logical qubit, gauge bin
number, gauge modular position).  Edges carry a small integer multiplicity;
under the node-operator normalization (circle = u/alpha, square = m,
diamond = ell) every single line is a coupling of strength pi, so the
physical coefficient of an edge is ``pi * multiplicity / alpha**k`` with
``k`` the number of modular endpoints.

Building a cluster graph expands the tuned multimode gate into coupling
terms, materializes them as edges, and then deletes every edge incident to
a modular-position node pinned at u = 0: a phase generated by u acts as the
identity on that eigenstate.  The same absorption pass is reused by the
measurement engine when a measurement pins a neighbor's modular position.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, GraphParseError
from .gates import CouplingTerm, decompose_cz_multimode, require_binary_adjacency
from .modular import SubsystemKind, require_bin_size

EDGE_UNIT_PHASE = math.pi

_KIND_ORDER = (SubsystemKind.LOGICAL, SubsystemKind.GAUGE_BIN, SubsystemKind.GAUGE_MODULAR)
_KIND_OFFSET = {kind: offset for offset, kind in enumerate(_KIND_ORDER)}


class CvType(enum.Enum):
    """What the mode held before decomposition."""

    MOMENTUM = "momentum"
    GKP_PLUS = "gkp_plus"
    GKP_LABELED = "gkp_labeled"

    @property
    def is_gkp(self) -> bool:
        return self is not CvType.MOMENTUM


class NodeState(enum.Enum):
    LOGICAL_PLUS = "logical_plus"
    LOGICAL_LABELED = "logical_labeled"
    UNIFORM_BIN = "uniform_bin"
    UNIFORM_MODULAR = "uniform_modular"
    MODULAR_ZERO = "modular_zero"

    @property
    def filled(self) -> bool:
        """Filled marker in diagrams; open markers are labeled or pinned states."""
        return self in (
            NodeState.LOGICAL_PLUS,
            NodeState.UNIFORM_BIN,
            NodeState.UNIFORM_MODULAR,
        )


@dataclass(frozen=True)
class Node:
    id: int
    mode: int
    kind: SubsystemKind
    state: NodeState


@dataclass(frozen=True)
class ModeRecord:
    """One physical mode: its input type and, when labeled, its amplitudes."""

    index: int
    cv_type: CvType
    label: str | None = None
    amplitudes: tuple[complex, complex] | None = None


@dataclass(frozen=True)
class ModeSpec:
    """Input description of one mode, before indices are assigned."""

    cv_type: CvType
    label: str | None = None
    amplitudes: tuple[complex, complex] | None = None


def momentum() -> ModeSpec:
    return ModeSpec(CvType.MOMENTUM)


def gkp_plus() -> ModeSpec:
    return ModeSpec(CvType.GKP_PLUS)


def gkp_labeled(c0: complex, c1: complex, label: str = "psi") -> ModeSpec:
    """A GKP mode encoding the qubit c0|0> + c1|1>; amplitudes must be unit norm."""
    c0, c1 = complex(c0), complex(c1)
    norm_sq = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm_sq - 1.0) > 1e-12:
        raise DomainError(f"logical amplitudes must be normalized, got |c|^2 = {norm_sq}")
    return ModeSpec(CvType.GKP_LABELED, label=label, amplitudes=(c0, c1))


@dataclass(frozen=True)
class SubsystemEdge:
    """Undirected edge between two subsystem nodes; endpoints kept sorted."""

    a: int
    b: int
    multiplicity: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise DomainError("self-loops are not allowed")
        if self.a > self.b:
            low, high = self.b, self.a
            object.__setattr__(self, "a", low)
            object.__setattr__(self, "b", high)
        if self.multiplicity < 1:
            raise DomainError("edge multiplicity must be positive")

    def touches(self, node_id: int) -> bool:
        return node_id == self.a or node_id == self.b


@dataclass(frozen=True)
class SubsystemGraph:
    alpha: float
    modes: tuple[ModeRecord, ...]
    nodes: tuple[Node, ...]
    edges: tuple[SubsystemEdge, ...]

    def node_by_id(self, node_id: int) -> Node:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise DomainError(f"no node with id {node_id}")

    def mode_by_index(self, index: int) -> ModeRecord:
        for mode in self.modes:
            if mode.index == index:
                return mode
        raise DomainError(f"no mode with index {index}")

    def node_of(self, mode_index: int, kind: SubsystemKind) -> Node:
        for node in self.nodes:
            if node.mode == mode_index and node.kind == kind:
                return node
        raise DomainError(f"no {kind.value} node for mode {mode_index}")

    def edges_at(self, node_id: int) -> tuple[SubsystemEdge, ...]:
        return tuple(e for e in self.edges if e.touches(node_id))

    def mode_amplitudes(self, index: int) -> tuple[complex, complex]:
        """Logical amplitudes of a mode; plus-type modes are (1,1)/sqrt(2)."""
        record = self.mode_by_index(index)
        if record.amplitudes is not None:
            return record.amplitudes
        inv = 1.0 / math.sqrt(2.0)
        return (complex(inv), complex(inv))


def _node_states_for(cv_type: CvType) -> tuple[NodeState, NodeState, NodeState]:
    logical = (
        NodeState.LOGICAL_LABELED if cv_type is CvType.GKP_LABELED else NodeState.LOGICAL_PLUS
    )
    modular = NodeState.MODULAR_ZERO if cv_type.is_gkp else NodeState.UNIFORM_MODULAR
    return (logical, NodeState.UNIFORM_BIN, modular)


def _make_nodes(modes: tuple[ModeRecord, ...]) -> tuple[Node, ...]:
    nodes = []
    for position, record in enumerate(modes):
        states = _node_states_for(record.cv_type)
        for kind, state in zip(_KIND_ORDER, states):
            nodes.append(
                Node(
                    id=3 * position + _KIND_OFFSET[kind],
                    mode=record.index,
                    kind=kind,
                    state=state,
                )
            )
    return tuple(nodes)


def absorb_modular_zero_edges(
    nodes: tuple[Node, ...], edges: tuple[SubsystemEdge, ...]
) -> tuple[SubsystemEdge, ...]:
    """Delete every edge incident to a modular-position node pinned at u = 0."""
    pinned = {n.id for n in nodes if n.state is NodeState.MODULAR_ZERO}
    return tuple(e for e in edges if e.a not in pinned and e.b not in pinned)


def _edge_from_term(
    term: CouplingTerm, node_id: dict[tuple[int, SubsystemKind], int], alpha: float
) -> SubsystemEdge:
    # multiplicity = coefficient * alpha**(#modular operands) / pi
    units = term.coefficient * alpha**term.modular_operand_count / EDGE_UNIT_PHASE
    multiplicity = round(units)
    if multiplicity not in (1, 2) or abs(units - multiplicity) > 1e-9:
        raise DomainError(f"term {term} has non-integral edge strength {units}")
    return SubsystemEdge(
        a=node_id[(term.op_a.mode, term.op_a.kind)],
        b=node_id[(term.op_b.mode, term.op_b.kind)],
        multiplicity=multiplicity,
    )


def build_cluster(
    adjacency: np.ndarray, node_types: list[ModeSpec], alpha: float
) -> SubsystemGraph:
    """Build the subsystem graph of a tuned cluster state.

    ``adjacency`` is the binary mode-level adjacency matrix; ``node_types``
    gives each mode's input state.  All-GKP inputs leave only the
    logical-logical edges; momentum inputs additionally keep their
    modular-position couplings.
    """
    alpha = require_bin_size(alpha)
    adjacency = require_binary_adjacency(adjacency)
    if len(node_types) != adjacency.shape[0]:
        raise DomainError(
            f"{adjacency.shape[0]} modes in adjacency but {len(node_types)} node types"
        )

    modes = tuple(
        ModeRecord(index=i, cv_type=s.cv_type, label=s.label, amplitudes=s.amplitudes)
        for i, s in enumerate(node_types)
    )
    nodes = _make_nodes(modes)
    node_id = {(n.mode, n.kind): n.id for n in nodes}

    decomposition = decompose_cz_multimode(adjacency, alpha)
    edges = tuple(
        sorted(
            (_edge_from_term(t, node_id, alpha) for t in decomposition.all_terms),
            key=lambda e: (e.a, e.b),
        )
    )
    edges = absorb_modular_zero_edges(nodes, edges)
    return SubsystemGraph(alpha=alpha, modes=modes, nodes=nodes, edges=edges)


def logical_subgraph(graph: SubsystemGraph) -> np.ndarray:
    """Binary adjacency over the logical nodes, indexed by mode position."""
    position = {record.index: pos for pos, record in enumerate(graph.modes)}
    logical_mode = {
        n.id: position[n.mode] for n in graph.nodes if n.kind is SubsystemKind.LOGICAL
    }
    n = len(graph.modes)
    a = np.zeros((n, n))
    for edge in graph.edges:
        if edge.a in logical_mode and edge.b in logical_mode:
            i, j = logical_mode[edge.a], logical_mode[edge.b]
            a[i, j] = a[j, i] = 1.0
    return a


def edge_coefficient(graph: SubsystemGraph, edge: SubsystemEdge) -> float:
    """Physical coupling coefficient of an edge, undoing the normalization."""
    modular_ends = sum(
        graph.node_by_id(i).kind is SubsystemKind.GAUGE_MODULAR for i in (edge.a, edge.b)
    )
    return EDGE_UNIT_PHASE * edge.multiplicity / graph.alpha**modular_ends


# --- rendering ---------------------------------------------------------------

_DOT_SHAPE = {
    SubsystemKind.LOGICAL: "diamond",
    SubsystemKind.GAUGE_BIN: "box",
    SubsystemKind.GAUGE_MODULAR: "circle",
}


def _dot_label(graph: SubsystemGraph, node: Node) -> str:
    if node.kind is SubsystemKind.LOGICAL:
        if node.state is NodeState.LOGICAL_LABELED:
            record = graph.mode_by_index(node.mode)
            return record.label or "psi"
        return "+"
    if node.kind is SubsystemKind.GAUGE_BIN:
        return "m"
    return "u=0" if node.state is NodeState.MODULAR_ZERO else "u"


def render_dot(graph: SubsystemGraph) -> str:
    """Deterministic DOT text; double edges are emitted as two parallel lines."""
    ordered = sorted(graph.nodes, key=lambda n: n.id)
    lines = ["graph subsystem_cluster {", "  node [fontsize=10];"]
    for node in ordered:
        style = ', style=filled' if node.state.filled else ""
        lines.append(
            f'  n{node.id} [shape={_DOT_SHAPE[node.kind]}, '
            f'label="{_dot_label(graph, node)}"{style}];'
        )
    for edge in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        lines.extend(f"  n{edge.a} -- n{edge.b};" for _ in range(edge.multiplicity))
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- serialization -----------------------------------------------------------


def _complex_pair(values: tuple[complex, complex]) -> list[list[float]]:
    return [[z.real, z.imag] for z in values]


def to_json(graph: SubsystemGraph) -> str:
    doc = {
        "alpha": graph.alpha,
        "modes": [
            {
                "index": record.index,
                "cv_type": record.cv_type.value,
                **({"label": record.label} if record.label is not None else {}),
                **(
                    {"amplitudes": _complex_pair(record.amplitudes)}
                    if record.amplitudes is not None
                    else {}
                ),
            }
            for record in graph.modes
        ],
        "nodes": [
            {"id": n.id, "mode": n.mode, "kind": n.kind.value, "state": n.state.value}
            for n in graph.nodes
        ],
        "edges": [
            {"a": e.a, "b": e.b, "multiplicity": e.multiplicity} for e in graph.edges
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parse_amplitudes(raw: object, where: str) -> tuple[complex, complex]:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or not all(isinstance(p, list) and len(p) == 2 for p in raw)
    ):
        raise GraphParseError(f"{where}: amplitudes must be [[re, im], [re, im]]")
    return (complex(raw[0][0], raw[0][1]), complex(raw[1][0], raw[1][1]))


def from_json(text: str) -> SubsystemGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise GraphParseError(
            f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}"
        ) from err
    if not isinstance(doc, dict):
        raise GraphParseError("top-level document must be an object")
    try:
        alpha = require_bin_size(doc["alpha"])
        modes = []
        for raw in doc["modes"]:
            amplitudes = (
                _parse_amplitudes(raw["amplitudes"], f"mode {raw['index']}")
                if "amplitudes" in raw
                else None
            )
            modes.append(
                ModeRecord(
                    index=int(raw["index"]),
                    cv_type=CvType(raw["cv_type"]),
                    label=raw.get("label"),
                    amplitudes=amplitudes,
                )
            )
        nodes = [
            Node(
                id=int(raw["id"]),
                mode=int(raw["mode"]),
                kind=SubsystemKind(raw["kind"]),
                state=NodeState(raw["state"]),
            )
            for raw in doc["nodes"]
        ]
        edges = [
            SubsystemEdge(a=int(raw["a"]), b=int(raw["b"]), multiplicity=int(raw["multiplicity"]))
            for raw in doc["edges"]
        ]
    except (KeyError, TypeError, ValueError) as err:
        raise GraphParseError(f"malformed graph document: {err}") from err

    graph = SubsystemGraph(alpha=alpha, modes=tuple(modes), nodes=tuple(nodes), edges=tuple(edges))
    _validate_graph(graph)
    return graph


def _validate_graph(graph: SubsystemGraph) -> None:
    node_ids = {n.id for n in graph.nodes}
    if len(node_ids) != len(graph.nodes):
        raise GraphParseError("duplicate node ids")
    mode_indices = {m.index for m in graph.modes}
    if len(mode_indices) != len(graph.modes):
        raise GraphParseError("duplicate mode indices")
    for node in graph.nodes:
        if node.mode not in mode_indices:
            raise GraphParseError(f"node {node.id} references unknown mode {node.mode}")
    for record in graph.modes:
        expected = dict(zip(_KIND_ORDER, _node_states_for(record.cv_type)))
        states = {n.kind: n.state for n in graph.nodes if n.mode == record.index}
        if states != expected:
            raise GraphParseError(
                f"mode {record.index} must have one node of each kind with states "
                f"matching its cv_type {record.cv_type.value}"
            )
        if record.cv_type is CvType.GKP_LABELED:
            if record.amplitudes is None:
                raise GraphParseError(f"mode {record.index} is labeled but has no amplitudes")
            norm_sq = sum(abs(z) ** 2 for z in record.amplitudes)
            if abs(norm_sq - 1.0) > 1e-12:
                raise GraphParseError(
                    f"mode {record.index} amplitudes are not normalized (|c|^2 = {norm_sq})"
                )
        elif record.amplitudes is not None:
            raise GraphParseError(
                f"mode {record.index} of type {record.cv_type.value} cannot carry amplitudes"
            )
    for edge in graph.edges:
        if edge.a not in node_ids or edge.b not in node_ids:
            raise GraphParseError(f"edge ({edge.a}, {edge.b}) references unknown node")
    if absorb_modular_zero_edges(graph.nodes, graph.edges) != graph.edges:
        raise GraphParseError("edges incident to a pinned modular-position node")


# --- structural comparison ---------------------------------------------------


def canonical(graph: SubsystemGraph) -> SubsystemGraph:
    """Relabel modes to 0..N-1 (order preserved) and node ids to the build layout."""
    order = sorted(graph.modes, key=lambda m: m.index)
    new_index = {record.index: pos for pos, record in enumerate(order)}
    modes = tuple(replace(record, index=pos) for pos, record in enumerate(order))
    id_map = {}
    nodes = []
    for node in graph.nodes:
        new_id = 3 * new_index[node.mode] + _KIND_OFFSET[node.kind]
        id_map[node.id] = new_id
        nodes.append(replace(node, id=new_id, mode=new_index[node.mode]))
    nodes.sort(key=lambda n: n.id)
    edges = tuple(
        sorted(
            (
                SubsystemEdge(id_map[e.a], id_map[e.b], e.multiplicity)
                for e in graph.edges
            ),
            key=lambda e: (e.a, e.b),
        )
    )
    return SubsystemGraph(alpha=graph.alpha, modes=modes, nodes=tuple(nodes), edges=edges)


def structurally_equal(
    first: SubsystemGraph, second: SubsystemGraph, amplitude_tol: float = 1e-12
) -> bool:
    """Equality up to mode renumbering; label strings are display-only and ignored."""
    a, b = canonical(first), canonical(second)
    if a.alpha != b.alpha or len(a.modes) != len(b.modes):
        return False
    for ma, mb in zip(a.modes, b.modes):
        if ma.cv_type != mb.cv_type:
            return False
        if (ma.amplitudes is None) != (mb.amplitudes is None):
            return False
        if ma.amplitudes is not None:
            diff = max(
                abs(x - y) for x, y in zip(ma.amplitudes, mb.amplitudes)  # type: ignore[arg-type]
            )
            if diff > amplitude_tol:
                return False
    return a.nodes == b.nodes and a.edges == b.edges


def graph_shape(graph: SubsystemGraph) -> tuple:
    """Hashable shape ignoring logical labels: used to compare rewrites across inputs."""
    g = canonical(graph)
    return (
        tuple(m.cv_type for m in g.modes),
        tuple((n.mode, n.kind, n.state) for n in g.nodes),
        g.edges,
    )
