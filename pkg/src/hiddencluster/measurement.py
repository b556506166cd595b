"""Symbolic momentum measurements on subsystem graphs.

Measuring the full momentum of a GKP-type node (outcome fixed to 0)
factorizes into a logical X measurement with outcome +1 and a gauge
momentum projection.  On the graph this deletes the measured mode, pins the
neighbor's modular-position node to u = 0 (which absorbs all of that node's
edges), and teleports the measured logical label onto the neighbor with a
Hadamard applied.  Only outcome 0 is modeled and only degree-1 nodes may be
measured; anything else raises instead of producing an unproved rewrite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, UnsupportedMeasurement, UnsupportedTopology
from .graphs import (
    CvType,
    NodeState,
    SubsystemGraph,
    absorb_modular_zero_edges,
    logical_subgraph,
)
from .modular import SubsystemKind

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class LogicalFrame:
    """Accumulated logical byproduct along a wire: one Hadamard per hop."""

    hadamard_count: int = 0
    current_label: tuple[complex, complex] = (1.0 + 0.0j, 0.0 + 0.0j)


@dataclass(frozen=True)
class MeasurementRecord:
    measured_mode: int
    outcome: float
    removed_nodes: tuple[int, int, int]
    converted_node: int


@dataclass(frozen=True)
class ProjectorFactorization:
    """Fixed factorization of the outcome-0 momentum projector."""

    logical_basis: str
    logical_outcome: int
    gauge_projection: str


def factorize_p0_projector() -> ProjectorFactorization:
    """Describe the measurement as separable logical and gauge projections."""
    return ProjectorFactorization(
        logical_basis="X", logical_outcome=+1, gauge_projection="p_G = 0"
    )


@dataclass(frozen=True)
class MeasurementResult:
    graph: SubsystemGraph
    frame: LogicalFrame
    record: MeasurementRecord


def _apply_hadamard(amplitudes: tuple[complex, complex]) -> tuple[complex, complex]:
    out = HADAMARD @ np.array(amplitudes, dtype=complex)
    return (complex(out[0]), complex(out[1]))


def measure_p0(graph: SubsystemGraph, mode: int, frame: LogicalFrame) -> MeasurementResult:
    """Measure the momentum of a GKP-type mode with outcome 0.

    The measured mode must have exactly one neighbor at the mode level.  The
    neighbor becomes a GKP-labeled mode carrying the Hadamard of the measured
    label, its modular-position node is pinned to u = 0 and stripped of
    edges, and the frame's Hadamard count increments by one.
    """
    record = graph.mode_by_index(mode)
    if not record.cv_type.is_gkp:
        raise UnsupportedMeasurement(
            f"mode {mode} is a momentum node; the rewrite is only derived for GKP-type "
            "nodes (use the grid oracle instead)"
        )

    adjacency = logical_subgraph(graph)
    position = {m.index: pos for pos, m in enumerate(graph.modes)}
    degree = int(adjacency[position[mode]].sum())
    if degree != 1:
        raise UnsupportedTopology(
            f"measured mode {mode} has {degree} neighbors; only degree-1 nodes are supported"
        )
    neighbor_pos = int(np.flatnonzero(adjacency[position[mode]])[0])
    neighbor = graph.modes[neighbor_pos].index

    measured_label = graph.mode_amplitudes(mode)
    new_label = _apply_hadamard(measured_label)
    label_text = f"H({record.label or '+'})"

    removed = tuple(sorted(n.id for n in graph.nodes if n.mode == mode))
    converted = graph.node_of(neighbor, SubsystemKind.GAUGE_MODULAR).id

    modes = tuple(
        replace(m, cv_type=CvType.GKP_LABELED, label=label_text, amplitudes=new_label)
        if m.index == neighbor
        else m
        for m in graph.modes
        if m.index != mode
    )
    nodes = []
    for node in graph.nodes:
        if node.mode == mode:
            continue
        if node.id == converted:
            node = replace(node, state=NodeState.MODULAR_ZERO)
        elif node.mode == neighbor and node.kind is SubsystemKind.LOGICAL:
            node = replace(node, state=NodeState.LOGICAL_LABELED)
        nodes.append(node)
    nodes = tuple(nodes)

    kept = tuple(e for e in graph.edges if not any(e.touches(i) for i in removed))
    edges = absorb_modular_zero_edges(nodes, kept)

    new_graph = SubsystemGraph(alpha=graph.alpha, modes=modes, nodes=nodes, edges=edges)
    new_frame = LogicalFrame(
        hadamard_count=frame.hadamard_count + 1, current_label=new_label
    )
    return MeasurementResult(
        graph=new_graph,
        frame=new_frame,
        record=MeasurementRecord(
            measured_mode=mode,
            outcome=0.0,
            removed_nodes=removed,  # type: ignore[arg-type]
            converted_node=converted,
        ),
    )


@dataclass(frozen=True)
class WireRun:
    graph: SubsystemGraph
    frame: LogicalFrame
    records: tuple[MeasurementRecord, ...]
    #: frame after each step, aligned with ``records``
    frames: tuple[LogicalFrame, ...] = ()


def _wire_input_mode(graph: SubsystemGraph) -> int:
    """Pick the wire's input end: a GKP-type endpoint of the mode-level path.

    Prefers a labeled endpoint; if both ends qualify equally the higher mode
    index wins, so chains built with the input listed last behave as written.
    """
    adjacency = logical_subgraph(graph)
    n = adjacency.shape[0]
    degrees = adjacency.sum(axis=1)
    if n > 1 and (
        int(adjacency.sum()) // 2 != n - 1
        or sorted(degrees) != [1.0, 1.0] + [2.0] * (n - 2)
    ):
        raise UnsupportedTopology("run_wire requires a linear chain of modes")
    endpoints = [graph.modes[i].index for i in range(n) if n == 1 or degrees[i] == 1.0]
    gkp_ends = [i for i in endpoints if graph.mode_by_index(i).cv_type.is_gkp]
    if not gkp_ends:
        raise UnsupportedMeasurement("wire has no GKP-type input endpoint")
    labeled = [
        i for i in gkp_ends if graph.mode_by_index(i).cv_type is CvType.GKP_LABELED
    ]
    candidates = labeled or gkp_ends
    return max(candidates)


def run_wire(graph: SubsystemGraph, steps: int) -> WireRun:
    """Measure a linear wire step by step from its GKP-type input end."""
    if steps < 0 or steps > len(graph.modes) - 1:
        raise DomainError(
            f"steps must be between 0 and {len(graph.modes) - 1}, got {steps}"
        )
    current = _wire_input_mode(graph)
    frame = LogicalFrame(
        hadamard_count=0, current_label=graph.mode_amplitudes(current)
    )
    records: list[MeasurementRecord] = []
    frames: list[LogicalFrame] = []
    for _ in range(steps):
        result = measure_p0(graph, current, frame)
        graph, frame = result.graph, result.frame
        records.append(result.record)
        frames.append(result.frame)
        current = result.graph.node_by_id(result.record.converted_node).mode
    return WireRun(
        graph=graph, frame=frame, records=tuple(records), frames=tuple(frames)
    )
