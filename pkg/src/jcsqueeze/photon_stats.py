"""Photon-number statistics of a squeezed coherent field.

The field is the two-photon coherent state with coherent amplitude
``theta`` and squeeze parameter ``xi = r * exp(i * squeeze_phase)``,
written with ``mu = cosh r``, ``nu = exp(i * squeeze_phase) * sinh r`` and
``beta = mu * theta + nu * conj(theta)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericDomainError, TruncationError
from .special_fn import hermite_sequence, log_factorials

# Below this squeeze magnitude the Poisson limit is used directly.
COHERENT_THRESHOLD = 1e-8
DEFAULT_TAIL_EPS = 1e-12
DEFAULT_MAX_CUTOFF = 16384
MIN_CUTOFF = 16


@dataclass(frozen=True)
class SqueezedField:
    theta: complex
    r: float = 0.0
    squeeze_phase: float = 0.0

    def __post_init__(self):
        theta = complex(self.theta)
        if not (math.isfinite(theta.real) and math.isfinite(theta.imag)):
            raise NumericDomainError(f"theta must be finite, got {self.theta!r}")
        if not math.isfinite(self.r) or self.r < 0:
            raise NumericDomainError(f"squeeze magnitude r must be >= 0, got {self.r!r}")
        if not math.isfinite(self.squeeze_phase):
            raise NumericDomainError("squeeze_phase must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "squeeze_phase", float(self.squeeze_phase) % (2 * math.pi))

    @property
    def mu(self) -> float:
        return math.cosh(self.r)

    @property
    def nu(self) -> complex:
        return cmath.exp(1j * self.squeeze_phase) * math.sinh(self.r)

    @property
    def beta(self) -> complex:
        if self.r == 0.0:
            return self.theta
        return self.mu * self.theta + self.nu * self.theta.conjugate()

    @property
    def is_coherent(self) -> bool:
        return self.r < COHERENT_THRESHOLD

    def mean_photon_number(self) -> float:
        return abs(self.theta) ** 2 + math.sinh(self.r) ** 2

    def photon_number_variance(self) -> float:
        mu, nu, a = self.mu, self.nu, self.theta
        return abs(mu * a - nu * a.conjugate()) ** 2 + 2 * abs(mu * nu) ** 2


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Truncated ``P(0..cutoff)``; ``tail_mass`` is the weight beyond the cutoff.

    Entries are the raw formula values; the vector is never renormalized.
    """

    probs: np.ndarray
    tail_mass: float
    source: SqueezedField | None = None

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def cutoff(self) -> int:
        return len(self.probs) - 1

    def __len__(self):
        return len(self.probs)


def _initial_cutoff(mean: float, variance: float, max_cutoff: int) -> int:
    guess = math.ceil(mean + 10.0 * math.sqrt(max(variance, 0.0)))
    return min(max(guess, MIN_CUTOFF), max_cutoff)


def _check_truncation_args(tail_eps, max_cutoff):
    if not 0.0 < tail_eps < 1.0:
        raise NumericDomainError(f"tail_eps must lie in (0, 1), got {tail_eps!r}")
    if max_cutoff < MIN_CUTOFF:
        raise NumericDomainError(f"max_cutoff must be >= {MIN_CUTOFF}, got {max_cutoff}")


def _grow_until_converged(log_probs_fn, n0, tail_eps, max_cutoff, fld):
    n = n0
    while True:
        probs = np.exp(log_probs_fn(n))
        tail = max(0.0, 1.0 - float(np.sum(probs)))
        if tail < tail_eps:
            return PhotonDistribution(probs, tail, fld)
        if n >= max_cutoff:
            raise TruncationError(
                f"tail mass {tail:.3e} still >= {tail_eps:.1e} at cutoff {n}",
                tail_mass=tail,
                cutoff=n,
            )
        n = min(2 * n, max_cutoff)


def coherent_log_probs(theta, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    m = abs(complex(theta)) ** 2
    if m == 0.0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return -m + n * math.log(m) - log_factorials(n_max)


def squeezed_log_probs(fld: SqueezedField, n_max: int) -> np.ndarray:
    """``ln P(n)`` for ``n = 0 .. n_max`` from the Hermite closed form.

    The Gaussian exponent is written as ``-|beta|^2 + Re(conj(nu) beta^2 / mu)``;
    for a real squeeze (phase 0) this is identical to the symmetric
    ``(nu/2mu) beta^2 + c.c.`` form, and it stays normalized for complex ``nu``.
    """
    mu, nu, beta = fld.mu, fld.nu, fld.beta
    x = beta / cmath.sqrt(2.0 * mu * nu)
    if x.imag == 0.0:
        x = x.real
    log_h, _ = hermite_sequence(n_max, x)
    n = np.arange(n_max + 1)
    gauss = -abs(beta) ** 2 + (nu.conjugate() * beta**2 / mu).real
    return (
        -math.log(mu)
        - log_factorials(n_max)
        + n * math.log(abs(nu) / (2.0 * mu))
        + 2.0 * log_h
        + gauss
    )


def coherent_distribution(theta, tail_eps: float = DEFAULT_TAIL_EPS,
                          max_cutoff: int = DEFAULT_MAX_CUTOFF) -> PhotonDistribution:
    """Poisson distribution with mean ``|theta|^2``."""
    _check_truncation_args(tail_eps, max_cutoff)
    fld = SqueezedField(theta, 0.0)
    m = abs(fld.theta) ** 2
    n0 = _initial_cutoff(m, m, max_cutoff)
    return _grow_until_converged(lambda n: coherent_log_probs(fld.theta, n),
                                 n0, tail_eps, max_cutoff, fld)


def photon_distribution(fld: SqueezedField, tail_eps: float = DEFAULT_TAIL_EPS,
                        max_cutoff: int = DEFAULT_MAX_CUTOFF) -> PhotonDistribution:
    """Truncated photon-number distribution of ``fld``.

    The cutoff starts near ``mean + 10 sigma`` and doubles until the missing
    mass drops below ``tail_eps``. Raises ``TruncationError`` if
    ``max_cutoff`` is reached first. The missing mass is ``1 - sum(P)``, so
    its floor is the roundoff of the sum (about ``1e-16 * |beta|^2``).
    """
    _check_truncation_args(tail_eps, max_cutoff)
    if fld.is_coherent:
        dist = coherent_distribution(fld.theta, tail_eps, max_cutoff)
        return PhotonDistribution(dist.probs, dist.tail_mass, fld)
    n0 = _initial_cutoff(fld.mean_photon_number(), fld.photon_number_variance(), max_cutoff)
    return _grow_until_converged(lambda n: squeezed_log_probs(fld, n),
                                 n0, tail_eps, max_cutoff, fld)


def distribution_moments(dist: PhotonDistribution) -> tuple[float, float]:
    """Mean and variance of the truncated vector, as stored."""
    p = dist.probs
    n = np.arange(len(p), dtype=float)
    mean = float(np.dot(n, p))
    variance = float(np.dot((n - mean) ** 2, p))
    return mean, variance


def fock_amplitudes(fld: SqueezedField, cutoff: int) -> np.ndarray:
    """Complex amplitudes ``<n|theta; xi>`` for ``n = 0 .. cutoff``.

    Built from the eigenvalue relation ``(mu a + nu a^dag)|psi> = beta |psi>``,
    which gives ``c_{m+1} = (beta c_m - nu sqrt(m) c_{m-1}) / (mu sqrt(m+1))``.
    The seed is ``c_0 = exp(-|beta|^2/2 + conj(nu) beta^2 / (2 mu)) / sqrt(mu)``
    so that ``|c_n|^2`` reproduces the Hermite form of ``P(n)``. A running
    log scale keeps the recurrence clear of under- and overflow.
    """
    if cutoff < 0:
        raise NumericDomainError(f"cutoff must be non-negative, got {cutoff}")
    mu = fld.mu
    nu = fld.nu if fld.r > 0 else 0j
    beta = fld.beta
    log_seed = -0.5 * abs(beta) ** 2 + nu.conjugate() * beta**2 / (2.0 * mu) - 0.5 * math.log(mu)

    mantissa = np.empty(cutoff + 1, dtype=complex)
    log_scale = np.empty(cutoff + 1)
    prev, cur, scale = 0j, 1.0 + 0j, 0.0
    mantissa[0], log_scale[0] = cur, scale
    for m in range(cutoff):
        prev, cur = cur, (beta * cur - nu * math.sqrt(m) * prev) / (mu * math.sqrt(m + 1))
        big = max(abs(prev), abs(cur))
        if big > 1e100 or 0.0 < big < 1e-100:
            prev /= big
            cur /= big
            scale += math.log(big)
        mantissa[m + 1], log_scale[m + 1] = cur, scale

    total = log_scale + log_seed.real
    with np.errstate(under="ignore"):
        out = mantissa * np.exp(total) * cmath.exp(1j * log_seed.imag)
    return out
