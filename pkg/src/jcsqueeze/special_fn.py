"""Hermite polynomials and log-factorials in overflow-safe form.

Hermite values are carried as ``phase * exp(log_magnitude)`` so that
degrees in the thousands can be combined with ``1/n!`` and ``2**-n``
factors without ever forming the raw numbers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NumericDomainError

# Rescale the running pair whenever the magnitude leaves this window.
_BIG = 1e100
_SMALL = 1e-100


@dataclass(frozen=True)
class ScaledHermite:
    """Physicists' Hermite polynomial value ``H_n(x) = phase * exp(log_magnitude)``.

    A zero value has ``log_magnitude == -inf`` and ``phase == 1``.
    """

    n: int
    log_magnitude: float
    phase: complex

    @property
    def value(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0j
        return self.phase * math.exp(self.log_magnitude)


def _check_argument(x) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NumericDomainError(f"Hermite argument must be finite, got {x!r}")
    return z


def hermite_sequence(n_max: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(log_magnitude, phase)`` arrays for ``H_0(x) .. H_{n_max}(x)``.

    Uses the three-term recurrence ``H_{n+1} = 2x H_n - 2n H_{n-1}`` with a
    running log scale. For real ``x`` the phases are exactly +1 or -1.
    """
    if n_max < 0:
        raise NumericDomainError(f"degree must be non-negative, got {n_max}")
    z = _check_argument(x)
    is_real = z.imag == 0.0
    if is_real:
        z = z.real

    log_mag = np.empty(n_max + 1)
    phase = np.empty(n_max + 1, dtype=float if is_real else complex)

    prev = 0.0
    cur = 1.0
    scale = 0.0
    for n in range(n_max + 1):
        if n > 0:
            prev, cur = cur, 2.0 * z * cur - 2.0 * (n - 1) * prev
        big = max(abs(prev), abs(cur))
        if big > _BIG or 0.0 < big < _SMALL:
            prev /= big
            cur /= big
            scale += math.log(big)
        m = abs(cur)
        if m == 0.0:
            log_mag[n] = -math.inf
            phase[n] = 1.0
        else:
            log_mag[n] = scale + math.log(m)
            phase[n] = cur / m
    return log_mag, phase


def hermite(n: int, x) -> ScaledHermite:
    """Evaluate ``H_n(x)`` for complex or real ``x``."""
    log_mag, phase = hermite_sequence(n, x)
    p = phase[n]
    if isinstance(p, np.floating):
        p = float(p)
    else:
        p = complex(p)
        # Snap the phase back onto the unit circle after repeated division.
        if p != 0:
            p = cmath.exp(1j * cmath.phase(p))
    return ScaledHermite(n=n, log_magnitude=float(log_mag[n]), phase=p)


def log_factorial(n: int) -> float:
    """Natural log of ``n!``."""
    if n < 0:
        raise NumericDomainError(f"factorial of negative integer {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


def log_factorials(n_max: int) -> np.ndarray:
    """Vector of ``ln(k!)`` for ``k = 0 .. n_max``."""
    return gammaln(np.arange(n_max + 1) + 1.0)
