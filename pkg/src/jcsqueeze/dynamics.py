"""Resonant Jaynes-Cummings transition probabilities and lifted-state sums.

Units: hbar = 1, times in units of ``1/g`` when ``g = 1``. The bare
frequency ``omega0`` only contributes local phases and drops out of
everything computed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericDomainError
from .photon_stats import PhotonDistribution


@dataclass(frozen=True)
class ModelParams:
    g: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g > 0):
            raise NumericDomainError(f"coupling g must be > 0, got {self.g!r}")
        if not math.isfinite(self.omega0):
            raise NumericDomainError("omega0 must be finite")


@dataclass(frozen=True)
class AtomMixture:
    """Diagonal atom state ``lambda0 |1><1| + lambda1 |2><2|`` (|1> ground, |2> excited)."""

    lambda0: float
    lambda1: float

    def __post_init__(self):
        for name in ("lambda0", "lambda1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise NumericDomainError(f"{name} must lie in [0, 1], got {v!r}")
        if abs(self.lambda0 + self.lambda1 - 1.0) > 1e-12:
            raise NumericDomainError("lambda0 + lambda1 must equal 1")

    @classmethod
    def from_excited(cls, lambda1: float) -> AtomMixture:
        return cls(1.0 - lambda1, lambda1)


@dataclass(frozen=True)
class LiftedCoefficients:
    """The four aggregated entries ``e1..e4``; ``e2``, ``e3`` are purely imaginary."""

    t: float
    e1: float
    e2: complex
    e3: complex
    e4: float


def rabi_frequency(params: ModelParams, n):
    """``g * sqrt(n + 1)``; accepts scalars or integer arrays."""
    if np.any(np.asarray(n) < 0):
        raise NumericDomainError("photon number must be non-negative")
    if np.ndim(n) == 0:
        return params.g * math.sqrt(n + 1)
    return params.g * np.sqrt(np.asarray(n, dtype=float) + 1.0)


def _accumulate(terms: np.ndarray, compensated: bool) -> float:
    # Plain ascending-n accumulation keeps results bit-reproducible.
    if compensated:
        return math.fsum(terms)
    total = 0.0
    for x in terms.tolist():
        total += x
    return total


def _check_time(t):
    if not (math.isfinite(t) and t >= 0):
        raise NumericDomainError(f"time must be finite and >= 0, got {t!r}")


def _angles(dist: PhotonDistribution, params: ModelParams, t: float) -> np.ndarray:
    return rabi_frequency(params, np.arange(len(dist.probs))) * t


def transition_c(dist: PhotonDistribution, params: ModelParams, t: float,
                 compensated: bool = False) -> float:
    """Probability of finding an initially excited atom still excited at ``t``."""
    _check_time(t)
    return _accumulate(dist.probs * np.cos(_angles(dist, params, t)) ** 2, compensated)


def transition_s(dist: PhotonDistribution, params: ModelParams, t: float,
                 compensated: bool = False) -> float:
    """Probability of finding an initially excited atom in the ground state at ``t``."""
    _check_time(t)
    return _accumulate(dist.probs * np.sin(_angles(dist, params, t)) ** 2, compensated)


def transition_series(dist: PhotonDistribution, params: ModelParams,
                      times) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``c(t)`` and ``s(t)`` over a time grid."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise NumericDomainError("times must be finite and >= 0")
    phase = np.outer(times, rabi_frequency(params, np.arange(len(dist.probs))))
    c = np.cos(phase) ** 2 @ dist.probs
    s = np.sin(phase) ** 2 @ dist.probs
    return c, s


def lifted_coefficients(dist: PhotonDistribution, atom: AtomMixture,
                        params: ModelParams, t: float,
                        compensated: bool = False) -> LiftedCoefficients:
    """Aggregate ``e1..e4`` exactly as printed in the closed-form lifted state.

    Sums run over ``n = 0 .. cutoff`` with ``P(cutoff + 1)`` taken as 0.
    No physical correction is applied: ``e4`` uses ``lambda0 P(n)`` with
    ``sin^2`` and ``lambda1 P(n+1)`` with ``cos^2``, as written.
    """
    _check_time(t)
    p = dist.probs
    pn = p
    pn1 = np.append(p[1:], 0.0)
    angle = rabi_frequency(params, np.arange(len(pn))) * t
    s2 = np.sin(angle) ** 2
    c2 = np.cos(angle) ** 2
    l0, l1 = atom.lambda0, atom.lambda1

    e1 = _accumulate(l0 * pn1 * s2 + l1 * pn * c2, compensated)
    coh = 0.5 * _accumulate(np.sin(2.0 * angle) * (l1 * pn - l0 * pn1), compensated)
    e4 = _accumulate(l0 * pn * s2 + l1 * pn1 * c2, compensated)
    e2 = complex(0.0, coh)
    return LiftedCoefficients(t=t, e1=e1, e2=e2, e3=-e2, e4=e4)
