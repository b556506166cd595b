"""Command-line frontend.

Exit codes: 0 success, 2 usage or bad input data, 3 I/O failure,
4 unsupported operation, 5 verification failure.  Every command is
deterministic given its inputs and the seed (flag ``--seed`` on ``verify``,
overridable through the ``HIDDENCLUSTER_SEED`` environment variable).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .certify import run_verification
from .errors import (
    DomainError,
    GraphParseError,
    HiddenClusterError,
    UnsupportedMeasurement,
    UnsupportedTopology,
)
from .gates import (
    chain_adjacency,
    decompose_cz_multimode,
    decompose_cz_two_mode,
    grid_adjacency,
)
from .graphs import (
    ModeSpec,
    build_cluster,
    from_json,
    gkp_labeled,
    gkp_plus,
    momentum,
    render_dot,
    to_json,
)
from .measurement import LogicalFrame, MeasurementRecord, measure_p0, run_wire


class UsageError(HiddenClusterError):
    """Malformed command-line value."""


def parse_alpha(text: str) -> float:
    if text.strip() == "sqrt_pi":
        return math.sqrt(math.pi)
    try:
        value = float(text)
    except ValueError as err:
        raise UsageError(f"invalid bin size {text!r}") from err
    if not math.isfinite(value) or value <= 0.0:
        raise UsageError(f"bin size must be positive, got {text!r}")
    return value


def _parse_complex(token: str) -> complex:
    try:
        return complex(token.strip().replace(" ", ""))
    except ValueError as err:
        raise UsageError(f"invalid amplitude {token!r}") from err


def parse_node_specs(text: str, n_modes: int) -> list[ModeSpec]:
    """Parse the per-mode node types: p | gkp+ | gkp:c0,c1.

    A single entry is broadcast to all modes.  The two amplitudes of
    ``gkp:c0,c1`` may use any Python complex literal without commas.
    """
    tokens = [t.strip() for t in text.split(",")]
    specs: list[ModeSpec] = []
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token == "p":
            specs.append(momentum())
        elif token in ("gkp+", "gkp:+"):
            specs.append(gkp_plus())
        elif token.startswith("gkp:"):
            if i + 1 >= len(tokens):
                raise UsageError(f"{token!r} needs two amplitudes: gkp:c0,c1")
            c0 = _parse_complex(token[4:])
            c1 = _parse_complex(tokens[i + 1])
            i += 1
            norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
            if norm == 0.0:
                raise UsageError("gkp amplitudes cannot both be zero")
            specs.append(gkp_labeled(c0 / norm, c1 / norm))
        else:
            raise UsageError(f"unknown node type {token!r} (expected p, gkp+ or gkp:c0,c1)")
        i += 1
    if len(specs) == 1 and n_modes > 1:
        specs = specs * n_modes
    if len(specs) != n_modes:
        raise UsageError(f"{n_modes} modes but {len(specs)} node types")
    return specs


def parse_topology(text: str) -> np.ndarray:
    """chain:N, grid:RxC, or a path to a JSON edge-list file."""
    if text.startswith("chain:"):
        return chain_adjacency(_positive_int(text[6:], "chain length"))
    if text.startswith("grid:"):
        dims = text[5:].lower().split("x")
        if len(dims) != 2:
            raise UsageError(f"grid spec must be grid:RxC, got {text!r}")
        return grid_adjacency(
            _positive_int(dims[0], "grid rows"), _positive_int(dims[1], "grid cols")
        )
    raw = Path(text).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise UsageError(f"{text}: invalid edge-list JSON: {err}") from err
    if isinstance(doc, dict):
        edges = doc.get("edges", [])
        n_modes = int(doc.get("n_modes", 0))
    else:
        edges = doc
        n_modes = 0
    pairs = []
    for pair in edges:
        if not isinstance(pair, list) or len(pair) != 2:
            raise UsageError(f"{text}: edges must be [i, j] pairs")
        i, j = int(pair[0]), int(pair[1])
        if i == j or i < 0 or j < 0:
            raise UsageError(f"{text}: invalid edge [{i}, {j}]")
        pairs.append((i, j))
    if not n_modes:
        n_modes = 1 + max((max(p) for p in pairs), default=0)
    adjacency = np.zeros((n_modes, n_modes))
    for i, j in pairs:
        if max(i, j) >= n_modes:
            raise UsageError(f"{text}: edge [{i}, {j}] exceeds n_modes={n_modes}")
        adjacency[i, j] = adjacency[j, i] = 1.0
    return adjacency


def _positive_int(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError as err:
        raise UsageError(f"invalid {what} {text!r}") from err
    if value < 1:
        raise UsageError(f"{what} must be positive, got {value}")
    return value


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_graph(path: str):
    return from_json(Path(path).read_text(encoding="utf-8"))


def _term_dict(term) -> dict:
    return {
        "op_a": {"kind": term.op_a.kind.value, "mode": term.op_a.mode},
        "op_b": {"kind": term.op_b.kind.value, "mode": term.op_b.mode},
        "coefficient": term.coefficient,
    }


def _log_line(step: int, record: MeasurementRecord, frame: LogicalFrame) -> str:
    label = [[z.real, z.imag] for z in frame.current_label]
    return (
        json.dumps(
            {
                "step": step,
                "measured_mode": record.measured_mode,
                "outcome": 0,
                "hadamard_count": frame.hadamard_count,
                "label": label,
            },
            sort_keys=True,
        )
        + "\n"
    )


def _resolve_seed(value: int | None) -> int:
    # the environment variable overrides even an explicit flag
    env = os.environ.get("HIDDENCLUSTER_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as err:
            raise UsageError(f"HIDDENCLUSTER_SEED must be an integer, got {env!r}") from err
    if value is not None:
        return value
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    adjacency = parse_topology(args.topology)
    specs = parse_node_specs(args.nodes, adjacency.shape[0])
    graph = build_cluster(adjacency, specs, parse_alpha(args.alpha))
    _write_text(args.output, to_json(graph))
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    alpha = parse_alpha(args.alpha)
    if args.topology is not None and args.g is not None:
        raise UsageError("--g and --topology are mutually exclusive")
    if args.topology is not None:
        adjacency = parse_topology(args.topology)
        decomposition = decompose_cz_multimode(adjacency, alpha)
        doc = {
            "alpha": alpha,
            "adjacency": adjacency.astype(int).tolist(),
            "logical_terms": [_term_dict(t) for t in decomposition.logical_terms],
            "gauge_terms": [_term_dict(t) for t in decomposition.gauge_terms],
            "interaction_terms": [_term_dict(t) for t in decomposition.interaction_terms],
        }
    elif args.g is not None:
        terms = decompose_cz_two_mode(args.g, alpha)
        doc = {"alpha": alpha, "g": args.g, "terms": [_term_dict(t) for t in terms]}
    else:
        raise UsageError("decompose requires either --g or --topology")
    _write_text(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_measure(args: argparse.Namespace) -> int:
    graph = _read_graph(args.input)
    frame = LogicalFrame(0, graph.mode_amplitudes(args.mode))
    result = measure_p0(graph, args.mode, frame)
    _write_text(args.output, to_json(result.graph))
    if args.log is not None:
        _write_text(args.log, _log_line(1, result.record, result.frame))
    return 0


def cmd_run_wire(args: argparse.Namespace) -> int:
    graph = _read_graph(args.input)
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    run = run_wire(graph, args.steps)
    _write_text(args.output, to_json(run.graph))
    if args.log is not None:
        lines = "".join(
            _log_line(step + 1, record, frame)
            for step, (record, frame) in enumerate(zip(run.records, run.frames))
        )
        _write_text(args.log, lines)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(
        alpha=parse_alpha(args.alpha),
        grid_n=args.n,
        max_modes=args.max_modes,
        seed=_resolve_seed(args.seed),
        g_scale=args.g_scale,
    )
    _write_text(args.output, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0 if report["passed"] else 5


def cmd_render(args: argparse.Namespace) -> int:
    graph = _read_graph(args.input)
    _write_text(args.output, render_dot(graph))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiddencluster",
        description="Build, rewrite and verify subsystem-decomposed cluster states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="build a cluster graph and write it as JSON")
    build.add_argument("--topology", required=True, help="chain:N, grid:RxC, or edge-list file")
    build.add_argument("--nodes", required=True, help="per-mode types: p | gkp+ | gkp:c0,c1")
    build.add_argument("--alpha", default="sqrt_pi", help="bin size (number or sqrt_pi)")
    build.add_argument("-o", "--output", default="-", help="output path (default stdout)")
    build.set_defaults(func=cmd_build)

    decompose = sub.add_parser("decompose", help="decompose a controlled-Z into couplings")
    decompose.add_argument("--g", type=float, help="two-mode gate weight")
    decompose.add_argument("--topology", help="binary adjacency for the tuned multimode gate")
    decompose.add_argument("--alpha", default="sqrt_pi")
    decompose.add_argument("-o", "--output", default="-")
    decompose.set_defaults(func=cmd_decompose)

    measure = sub.add_parser("measure", help="measure one GKP-type mode (outcome 0)")
    measure.add_argument("--input", required=True, help="graph JSON file")
    measure.add_argument("--mode", type=int, required=True)
    measure.add_argument("--log", help="JSON-lines measurement log")
    measure.add_argument("-o", "--output", default="-")
    measure.set_defaults(func=cmd_measure)

    wire = sub.add_parser("run-wire", help="teleport along a linear wire")
    wire.add_argument("--input", required=True, help="graph JSON file")
    wire.add_argument("--steps", type=int, required=True)
    wire.add_argument("--log", help="JSON-lines measurement log")
    wire.add_argument("-o", "--output", default="-")
    wire.set_defaults(func=cmd_run_wire)

    verify = sub.add_parser("verify", help="run the oracle-backed identity suite")
    verify.add_argument("--alpha", default="sqrt_pi")
    verify.add_argument("--n", type=int, default=2, help="oracle grid size (1..4)")
    verify.add_argument("--max-modes", type=int, default=3, help="largest chain length (2..3)")
    verify.add_argument("--g-scale", type=float, default=1.0, help="detuning factor (1 = tuned)")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("-o", "--output", default="-")
    verify.set_defaults(func=cmd_verify)

    render = sub.add_parser("render", help="render a graph JSON file as DOT")
    render.add_argument("--input", required=True)
    render.add_argument("-o", "--output", default="-")
    render.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, GraphParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 3
    except (UnsupportedMeasurement, UnsupportedTopology) as err:
        print(f"unsupported: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
