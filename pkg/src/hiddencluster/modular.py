"""Modular-position arithmetic for a single bosonic mode.

A position eigenvalue ``x`` splits uniquely into

    x = alpha * ell + 2 * alpha * m + u

with a binary logical quantum number ``ell``, an integer gauge bin number
``m``, and a centered modular remainder ``u`` in the half-open interval
``[-alpha/2, alpha/2)``.  The bin size ``alpha`` is a free positive
parameter; ``sqrt(pi)`` is the conventional square-lattice choice and is
exported as :data:`DEFAULT_ALPHA`, but every function here takes ``alpha``
explicitly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

DEFAULT_ALPHA = math.sqrt(math.pi)


class SubsystemKind(enum.Enum):
    """The three virtual subsystems of one mode.

    LOGICAL has spectrum {0, 1}, GAUGE_BIN has integer spectrum, and
    GAUGE_MODULAR has continuous spectrum [-alpha/2, alpha/2).
    """

    LOGICAL = "logical"
    GAUGE_BIN = "gauge_m"
    GAUGE_MODULAR = "gauge_u"

    @property
    def integer_spectrum(self) -> bool:
        return self is not SubsystemKind.GAUGE_MODULAR


@dataclass(frozen=True)
class QuantumNumbers:
    """The triple (ell, m, u) describing one position eigenvalue."""

    ell: int
    m: int
    u: float


def require_bin_size(alpha: float) -> float:
    """Validate a bin size: finite and strictly positive."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise DomainError(f"bin size must be finite and positive, got {alpha!r}")
    return alpha


def _require_quantum_numbers(q: QuantumNumbers, alpha: float) -> None:
    if q.ell not in (0, 1):
        raise DomainError(f"logical quantum number must be 0 or 1, got {q.ell!r}")
    if not isinstance(q.m, int):
        raise DomainError(f"bin number must be an integer, got {q.m!r}")
    if not math.isfinite(q.u) or not (-alpha / 2 <= q.u < alpha / 2):
        raise DomainError(
            f"modular position {q.u!r} outside [-alpha/2, alpha/2) for alpha={alpha}"
        )


def decompose_position(x: float, alpha: float) -> QuantumNumbers:
    """Split a position eigenvalue into (ell, m, u).

    The combined bin index is k = floor(x/alpha + 1/2), so a remainder that
    would land exactly on +alpha/2 rolls upward into the next bin, realizing
    the half-open interval.  ``ell = k mod 2`` and ``m = (k - ell) / 2``.
    """
    alpha = require_bin_size(alpha)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"position value must be finite, got {x!r}")

    k = math.floor(x / alpha + 0.5)
    u = x - alpha * k
    # x/alpha rounding can put k off by one near the bin boundary.
    if u >= alpha / 2:
        k += 1
        u = x - alpha * k
    elif u < -alpha / 2:
        k -= 1
        u = x - alpha * k
    # Residual round-off exactly at the boundary: pin to the included
    # endpoint (perturbs the represented x by at most 1 ulp).
    if u >= alpha / 2:
        k += 1
        u = -alpha / 2
    elif u < -alpha / 2:
        u = -alpha / 2

    ell = k % 2
    m = (k - ell) // 2
    return QuantumNumbers(ell=ell, m=m, u=u)


def recompose(q: QuantumNumbers, alpha: float) -> float:
    """Rebuild the position eigenvalue alpha*ell + 2*alpha*m + u."""
    alpha = require_bin_size(alpha)
    _require_quantum_numbers(q, alpha)
    return alpha * (q.ell + 2 * q.m) + q.u


def gauge_position(q: QuantumNumbers, alpha: float) -> float:
    """Position of the gauge mode alone: alpha*m + u (ell does not enter)."""
    alpha = require_bin_size(alpha)
    _require_quantum_numbers(q, alpha)
    return alpha * q.m + q.u
