"""Symbolic decomposition of CV controlled-Z gates into subsystem couplings.

A position-position gate ``exp(i g q_1 q_2)`` splits, through the modular
decomposition of each position operator, into nine commuting exponentials
``exp(i c * a_1 (x) b_2)`` where ``a`` and ``b`` range over the operators
ell, m, u of each mode.  Couplings between two integer-spectrum operators
whose coefficient is a multiple of 2*pi contribute no phase at all and are
pruned.  At the tuned weight ``g = pi / alpha**2`` exactly six couplings
survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .modular import SubsystemKind, require_bin_size

_TWO_PI = 2.0 * math.pi

#: Relative tolerance of the 2*pi-multiple test; coefficients arise as exact
#: rational multiples of pi, so anything looser would mask real detuning.
COEFFICIENT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SubsystemOperator:
    """One diagonal subsystem operator (kind) acting on one mode."""

    kind: SubsystemKind
    mode: int


@dataclass(frozen=True)
class CouplingTerm:
    """One factor exp(i * coefficient * op_a (x) op_b) of a decomposed gate.

    All such factors commute, so the order of a term list never matters.
    """

    op_a: SubsystemOperator
    op_b: SubsystemOperator
    coefficient: float

    @property
    def kinds(self) -> tuple[SubsystemKind, SubsystemKind]:
        return (self.op_a.kind, self.op_b.kind)

    @property
    def modular_operand_count(self) -> int:
        return sum(k is SubsystemKind.GAUGE_MODULAR for k in self.kinds)


def is_trivial_term(term: CouplingTerm) -> bool:
    """True iff the term's phase is 1 on every joint eigenstate.

    That requires both operands to have integer spectrum and the coefficient
    to be an integer multiple of 2*pi (relative tolerance 1e-9); a modular
    operand has continuous spectrum, so such a term is never trivial.
    """
    if not (term.op_a.kind.integer_spectrum and term.op_b.kind.integer_spectrum):
        return False
    turns = term.coefficient / _TWO_PI
    return abs(turns - round(turns)) <= COEFFICIENT_TOLERANCE * max(1.0, abs(turns))


def _phase_is_identity(term: CouplingTerm) -> bool:
    # A zero coefficient is the identity factor regardless of spectra.
    return term.coefficient == 0.0 or is_trivial_term(term)


def decompose_cz_two_mode(
    g: float, alpha: float, modes: tuple[int, int] = (0, 1)
) -> list[CouplingTerm]:
    """Expand exp(i g q_i q_j) into its surviving subsystem couplings.

    Returns the cross-mode terms of the full nine-term expansion, with
    factors that are identically 1 removed.  For ``g = pi/alpha**2`` exactly
    six terms survive: ell-ell (pi), u-u (pi/alpha**2), the two m-u pairs
    (2*pi/alpha each), and the two ell-u pairs (pi/alpha each).
    """
    alpha = require_bin_size(alpha)
    g = float(g)
    if not math.isfinite(g):
        raise DomainError(f"gate weight must be finite, got {g!r}")
    i, j = modes
    if i == j:
        raise DomainError("controlled-Z couples two distinct modes")

    ell, m, u = SubsystemKind.LOGICAL, SubsystemKind.GAUGE_BIN, SubsystemKind.GAUGE_MODULAR
    a2 = alpha * alpha
    layout = [
        (ell, ell, g * a2),
        (m, m, 4.0 * g * a2),
        (u, u, g),
        (ell, m, 2.0 * g * a2),
        (m, ell, 2.0 * g * a2),
        (ell, u, g * alpha),
        (u, ell, g * alpha),
        (m, u, 2.0 * g * alpha),
        (u, m, 2.0 * g * alpha),
    ]
    terms = [
        CouplingTerm(SubsystemOperator(ka, i), SubsystemOperator(kb, j), c)
        for ka, kb, c in layout
    ]
    return [t for t in terms if not _phase_is_identity(t)]


def require_adjacency(matrix: np.ndarray) -> np.ndarray:
    """Validate a real symmetric zero-diagonal weight matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"adjacency matrix must be square, got shape {matrix.shape}")
    if not np.array_equal(matrix, matrix.T):
        raise DomainError("adjacency matrix must be symmetric")
    if np.any(np.diagonal(matrix) != 0.0):
        raise DomainError("adjacency matrix must have zero diagonal")
    return matrix


def require_binary_adjacency(matrix: np.ndarray) -> np.ndarray:
    matrix = require_adjacency(matrix)
    if not np.all((matrix == 0.0) | (matrix == 1.0)):
        raise DomainError("adjacency entries must be 0 or 1")
    return matrix


def chain_adjacency(n_modes: int) -> np.ndarray:
    """Binary adjacency of a linear chain on ``n_modes`` modes."""
    if n_modes < 1:
        raise DomainError("a chain needs at least one mode")
    a = np.zeros((n_modes, n_modes))
    for i in range(n_modes - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return a


def grid_adjacency(rows: int, cols: int) -> np.ndarray:
    """Binary adjacency of a rows-by-cols rectangular grid, row-major modes."""
    if rows < 1 or cols < 1:
        raise DomainError("grid dimensions must be positive")
    n = rows * cols
    a = np.zeros((n, n))
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                a[i, i + 1] = a[i + 1, i] = 1.0
            if r + 1 < rows:
                a[i, i + cols] = a[i + cols, i] = 1.0
    return a


def expand_adjacency(weights: np.ndarray, alpha: float) -> np.ndarray:
    """Expand an N x N weight matrix to the 3N x 3N subsystem weight matrix.

    Ordering is (ell, m, u) per mode block; each entry V_ij becomes the
    3 x 3 block V_ij * outer(v, v) with v = (alpha, 2*alpha, 1).
    """
    alpha = require_bin_size(alpha)
    weights = require_adjacency(weights)
    v = np.array([alpha, 2.0 * alpha, 1.0])
    return np.kron(weights, np.outer(v, v))


@dataclass(frozen=True)
class MultimodeDecomposition:
    """Surviving couplings of a tuned multimode controlled-Z, by family.

    ``logical_terms`` holds the ell-ell couplings (one per edge, pi each),
    ``gauge_terms`` the m-u and u-u couplings, and ``interaction_terms`` the
    ell-u couplings that entangle logical qubits with gauge modes.
    """

    logical_terms: tuple[CouplingTerm, ...]
    gauge_terms: tuple[CouplingTerm, ...]
    interaction_terms: tuple[CouplingTerm, ...]

    @property
    def all_terms(self) -> tuple[CouplingTerm, ...]:
        return self.logical_terms + self.gauge_terms + self.interaction_terms


def decompose_cz_multimode(adjacency: np.ndarray, alpha: float) -> MultimodeDecomposition:
    """Decompose the tuned gate with weight matrix (pi/alpha**2) * adjacency.

    ``adjacency`` must be binary; general weights are only supported pairwise
    through :func:`decompose_cz_two_mode`.  Every surviving term lands in
    exactly one family; ell-m and m-m couplings are always pruned at the
    tuned weight.
    """
    alpha = require_bin_size(alpha)
    adjacency = require_binary_adjacency(adjacency)
    g = math.pi / (alpha * alpha)

    logical: list[CouplingTerm] = []
    gauge: list[CouplingTerm] = []
    interaction: list[CouplingTerm] = []
    n = adjacency.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if adjacency[i, j] == 0.0:
                continue
            for term in decompose_cz_two_mode(g, alpha, modes=(i, j)):
                kinds = set(term.kinds)
                if kinds == {SubsystemKind.LOGICAL}:
                    logical.append(term)
                elif SubsystemKind.LOGICAL not in kinds:
                    gauge.append(term)
                elif kinds == {SubsystemKind.LOGICAL, SubsystemKind.GAUGE_MODULAR}:
                    interaction.append(term)
                else:
                    # ell-m survives only for detuned weights, which the
                    # binary precondition rules out.
                    raise AssertionError(f"unexpected surviving term {term}")
    return MultimodeDecomposition(tuple(logical), tuple(gauge), tuple(interaction))


@dataclass(frozen=True)
class ControlledRotationForm:
    """Equivalent shift-plus-rotation form of one logical-modular coupling.

    ``exp(i c u (x) ell)`` factors into a modular-position phase
    ``exp(i (c/2) u)`` on the gauge mode and a logical z-rotation by the
    angle ``c * u`` controlled on that modular position.  Rendering and
    diagnostics only; both forms act identically.
    """

    control_mode: int
    rotated_mode: int
    shift_coefficient: float
    rotation_coefficient: float

    def describe(self) -> str:
        return (
            f"exp(i*{self.shift_coefficient:g}*u[{self.control_mode}]) followed by "
            f"Rz({self.rotation_coefficient:g}*u[{self.control_mode}]) "
            f"on logical qubit {self.rotated_mode}"
        )


def interaction_as_controlled_rotation(term: CouplingTerm) -> ControlledRotationForm:
    """Rewrite a logical-modular coupling as shift times controlled rotation."""
    kinds = {term.op_a.kind, term.op_b.kind}
    if kinds != {SubsystemKind.LOGICAL, SubsystemKind.GAUGE_MODULAR}:
        raise DomainError(
            "controlled-rotation form applies only to logical-modular couplings, "
            f"got kinds {tuple(k.value for k in term.kinds)}"
        )
    if term.op_a.kind is SubsystemKind.GAUGE_MODULAR:
        control, rotated = term.op_a.mode, term.op_b.mode
    else:
        control, rotated = term.op_b.mode, term.op_a.mode
    return ControlledRotationForm(
        control_mode=control,
        rotated_mode=rotated,
        shift_coefficient=term.coefficient / 2.0,
        rotation_coefficient=term.coefficient,
    )
