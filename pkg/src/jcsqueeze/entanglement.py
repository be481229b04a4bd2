"""Entropies and the atom-field mutual entropy (DEM).

Two routes are provided:

* ``dem_paper`` evaluates the closed form built from the aggregated
  coefficients ``e1..e4`` exactly as printed, without correction.
* ``dem_exact`` evolves both atomic branches of the initial mixture through
  the Jaynes-Cummings unitary and computes ``S(rho_A) + S(rho_F) - S(sigma)``
  from the true joint state, using Gram matrices so that nothing larger than
  4x4 is ever diagonalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AtomMixture, LiftedCoefficients, ModelParams, rabi_frequency
from .errors import ConsistencyError, NumericDomainError, TruncationError
from .photon_stats import (
    DEFAULT_MAX_CUTOFF,
    DEFAULT_TAIL_EPS,
    SqueezedField,
    fock_amplitudes,
    photon_distribution,
)

NEG_CLAMP = 1e-12
HERMITIAN_TOL = 1e-10
BOUNDARY_AMPLITUDE_TOL = 1e-6
DENSE_CHECK_MAX_CUTOFF = 64

GROUND = "ground"
EXCITED = "excited"


def _log_base(base) -> float:
    if base in ("e", None):
        return 1.0
    if base in (2, "2"):
        return math.log(2.0)
    raise NumericDomainError(f"logarithm base must be 'e' or 2, got {base!r}")


def _base_label(base) -> str:
    return "e" if _log_base(base) == 1.0 else "2"


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def shannon_entropy(p, base="e") -> float:
    """``-sum p log p`` with ``0 log 0 = 0``; tiny negatives are clamped."""
    p = np.asarray(p, dtype=float).ravel()
    if np.any(p < -NEG_CLAMP):
        raise NumericDomainError(f"probability entry {p.min():.3e} is negative")
    if p.sum() > 1.0 + 1e-9:
        raise NumericDomainError(f"probabilities sum to {p.sum():.12f} > 1")
    p = np.clip(p, 0.0, None)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz))) / _log_base(base)


def hermitian_spectrum_small(m, tol: float = 1e-13, max_sweeps: int = 64) -> np.ndarray:
    """Eigenvalues of a small Hermitian matrix, descending, by cyclic Jacobi.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation to zero it.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NumericDomainError("matrix must be square")
    dim = a.shape[0]
    if dim > 8:
        raise NumericDomainError(f"dimension {dim} exceeds the small-matrix limit of 8")
    if not np.all(np.isfinite(a)):
        raise NumericDomainError("matrix has non-finite entries")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NumericDomainError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)

    off_mask = ~np.eye(dim, dtype=bool)

    def off_norm(x):
        return float(np.linalg.norm(x[off_mask]))

    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if off_norm(a) <= threshold:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-3 * threshold / dim:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # V = diag(.., 1 at p, conj(phase) at q, ..) @ R(c, s)
                v = np.eye(dim, dtype=complex)
                w = np.conj(apq / mag)
                v[p, p] = c
                v[p, q] = s
                v[q, p] = -s * w
                v[q, q] = c * w
                a = v.conj().T @ a @ v
                a[p, q] = a[q, p] = 0.0
    else:
        raise ConsistencyError("Jacobi iteration did not converge")
    return np.sort(np.diag(a).real)[::-1]


@dataclass(frozen=True)
class DemResult:
    mode: str
    dem: float
    t: float
    s_atom: float
    s_field: float = math.nan
    s_joint: float = math.nan
    kappa_plus: float = math.nan
    kappa_minus: float = math.nan
    base: str = "e"


def dem_paper(coeffs: LiftedCoefficients, base="e") -> DemResult:
    """Closed-form DEM from ``e1..e4``.

    ``kappa_pm = ((e1 + e4) +- sqrt((e1 + e4)^2 - 4 (e1 e4 - e2 e3))) / 2`` and
    ``DEM = -2 (e1 log e1 + e4 log e4) + kappa_+ log kappa_+ + kappa_- log kappa_-``.
    """
    e1, e4 = coeffs.e1, coeffs.e4
    e2e3 = coeffs.e2 * coeffs.e3
    if abs(e2e3.imag) > 1e-12:
        raise NumericDomainError(f"e2*e3 is not real: {coeffs!r}")
    for name, v in (("e1", e1), ("e4", e4)):
        if v < -NEG_CLAMP or v > 1.0 + 1e-9:
            raise NumericDomainError(f"{name} = {v!r} outside [0, 1]: {coeffs!r}")
    e1, e4 = max(e1, 0.0), max(e4, 0.0)

    trace = e1 + e4
    disc = trace * trace - 4.0 * (e1 * e4 - e2e3.real)
    if disc < -NEG_CLAMP:
        raise NumericDomainError(f"negative discriminant {disc!r}: {coeffs!r}")
    root = math.sqrt(max(disc, 0.0))
    kp = 0.5 * (trace + root)
    km = 0.5 * (trace - root)
    for name, v in (("kappa_plus", kp), ("kappa_minus", km)):
        if v < -NEG_CLAMP or v > 1.0 + 1e-9:
            raise NumericDomainError(f"{name} = {v!r} outside [0, 1]: {coeffs!r}")
    kp, km = max(kp, 0.0), max(km, 0.0)

    lb = _log_base(base)
    marginal = -(_xlogx(e1) + _xlogx(e4))
    dem = 2.0 * marginal + _xlogx(kp) + _xlogx(km)
    return DemResult(
        mode="paper",
        dem=dem / lb,
        t=coeffs.t,
        s_atom=marginal / lb,
        kappa_plus=kp,
        kappa_minus=km,
        base=_base_label(base),
    )


@dataclass(frozen=True, eq=False)
class BranchState:
    """Joint pure state ``|1>|ground> + |2>|excited>`` for one initial atomic level.

    Both field vectors have length ``cutoff + 2`` (index = photon number).
    """

    start: str
    ground: np.ndarray
    excited: np.ndarray

    def norm_squared(self) -> float:
        return float(np.vdot(self.ground, self.ground).real + np.vdot(self.excited, self.excited).real)

    def joint_vector(self) -> np.ndarray:
        return np.concatenate([self.ground, self.excited])


def _check_boundary(amplitudes: np.ndarray):
    edge = abs(amplitudes[-1])
    if edge > BOUNDARY_AMPLITUDE_TOL:
        raise TruncationError(
            f"boundary amplitude {edge:.3e} at cutoff {len(amplitudes) - 1} exceeds "
            f"{BOUNDARY_AMPLITUDE_TOL:.0e}",
            tail_mass=edge**2,
            cutoff=len(amplitudes) - 1,
        )


def evolve_amplitudes(amplitudes: np.ndarray, params: ModelParams, start: str, t: float) -> BranchState:
    """Apply the resonant JCM propagator to ``|start> (x) sum_n c_n |n>``.

    Sector ``n`` spans ``{|2, n>, |1, n+1>}`` and rotates as
    ``cos(Omega_n t) I - i sin(Omega_n t) sigma_x`` times the phase
    ``exp(-i omega0 (n + 1/2) t)``; ``|1, 0>`` only picks up ``exp(i omega0 t / 2)``.
    """
    if not (math.isfinite(t) and t >= 0):
        raise NumericDomainError(f"time must be finite and >= 0, got {t!r}")
    c = np.asarray(amplitudes, dtype=complex)
    size = len(c) + 1
    n = np.arange(len(c))
    ground = np.zeros(size, dtype=complex)
    excited = np.zeros(size, dtype=complex)
    w0 = params.omega0

    if start == EXCITED:
        angle = rabi_frequency(params, n) * t
        phase = np.exp(-1j * w0 * (n + 0.5) * t)
        excited[:-1] = c * phase * np.cos(angle)
        ground[1:] = -1j * c * phase * np.sin(angle)
    elif start == GROUND:
        # |1, n> lives in sector n - 1; Omega_{-1} = 0 covers the uncoupled |1, 0>.
        angle = params.g * np.sqrt(n.astype(float)) * t
        phase = np.exp(-1j * w0 * (n - 0.5) * t)
        ground[:-1] = c * phase * np.cos(angle)
        excited[:-2] = (-1j * c * phase * np.sin(angle))[1:]
    else:
        raise NumericDomainError(f"start must be {GROUND!r} or {EXCITED!r}, got {start!r}")
    return BranchState(start=start, ground=ground, excited=excited)


def exact_amplitudes(fld: SqueezedField, cutoff: int, max_cutoff: int = DEFAULT_MAX_CUTOFF) -> np.ndarray:
    """Fock amplitudes starting from ``cutoff``, doubled until the boundary amplitude is small."""
    while True:
        amplitudes = fock_amplitudes(fld, cutoff)
        if abs(amplitudes[-1]) <= BOUNDARY_AMPLITUDE_TOL or cutoff >= max_cutoff:
            return amplitudes
        cutoff = min(2 * cutoff, max_cutoff)


def evolve_branch(fld: SqueezedField, params: ModelParams, start: str, cutoff: int, t: float) -> BranchState:
    """Evolve one atomic branch with the squeezed field truncated at ``cutoff``."""
    amplitudes = fock_amplitudes(fld, cutoff)
    _check_boundary(amplitudes)
    return evolve_amplitudes(amplitudes, params, start, t)


def _gram(vectors) -> np.ndarray:
    u = np.array(vectors, dtype=complex)
    return u.conj() @ u.T


def _checked_spectrum(m: np.ndarray, what: str) -> np.ndarray:
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ConsistencyError(f"{what} is not Hermitian within {HERMITIAN_TOL}")
    ev = hermitian_spectrum_small(m)
    if ev[-1] < -HERMITIAN_TOL:
        raise ConsistencyError(f"{what} has negative eigenvalue {ev[-1]:.3e}")
    return ev


def _dense_spectra(branches, weights):
    """Build the full joint density matrix and trace out each side (verification only)."""
    size = len(branches[0].ground)
    sigma = np.zeros((2 * size, 2 * size), dtype=complex)
    for b, w in zip(branches, weights):
        v = b.joint_vector()
        sigma += w * np.outer(v, v.conj())
    blocks = sigma.reshape(2, size, 2, size)
    rho_a = np.einsum("injn->ij", blocks)
    rho_f = np.einsum("inim->nm", blocks)
    return (np.linalg.eigvalsh(rho_a), np.linalg.eigvalsh(rho_f), np.linalg.eigvalsh(sigma))


def dem_exact_from_amplitudes(amplitudes: np.ndarray, atom: AtomMixture, params: ModelParams,
                              t: float, base="e", dense_check: bool = False) -> DemResult:
    """Exact DEM for pre-computed initial field amplitudes."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    _check_boundary(amplitudes)
    branches = (evolve_amplitudes(amplitudes, params, GROUND, t),
                evolve_amplitudes(amplitudes, params, EXCITED, t))
    weights = (atom.lambda0, atom.lambda1)

    rho_a = np.zeros((2, 2), dtype=complex)
    for b, w in zip(branches, weights):
        vecs = (b.ground, b.excited)
        for i in range(2):
            for j in range(2):
                rho_a[i, j] += w * np.vdot(vecs[j], vecs[i])
    spec_a = _checked_spectrum(rho_a, "atom reduced state")

    field_vectors = []
    for b, w in zip(branches, weights):
        field_vectors += [math.sqrt(w) * b.ground, math.sqrt(w) * b.excited]
    spec_f = _checked_spectrum(_gram(field_vectors), "field Gram matrix")

    joint = _gram([math.sqrt(w) * b.joint_vector() for b, w in zip(branches, weights)])
    spec_j = _checked_spectrum(joint, "joint Gram matrix")

    s_a = shannon_entropy(spec_a)
    s_f = shannon_entropy(spec_f)
    s_j = shannon_entropy(spec_j)
    expected_joint = shannon_entropy(weights)
    if abs(s_j - expected_joint) > 1e-8:
        raise ConsistencyError(
            f"joint entropy {s_j!r} differs from mixture entropy {expected_joint!r}")

    if dense_check:
        if len(amplitudes) - 1 > DENSE_CHECK_MAX_CUTOFF:
            raise NumericDomainError(
                f"dense check limited to cutoff <= {DENSE_CHECK_MAX_CUTOFF}")
        dense = [shannon_entropy(np.clip(ev, 0.0, None)) for ev in _dense_spectra(branches, weights)]
        for label, got, ref in zip(("atom", "field", "joint"), (s_a, s_f, s_j), dense):
            if abs(got - ref) > 1e-9:
                raise ConsistencyError(f"{label} entropy {got!r} disagrees with dense {ref!r}")

    lb = _log_base(base)
    return DemResult(
        mode="exact",
        dem=(s_a + s_f - s_j) / lb,
        t=t,
        s_atom=s_a / lb,
        s_field=s_f / lb,
        s_joint=s_j / lb,
        base=_base_label(base),
    )


def dem_exact(fld: SqueezedField, atom: AtomMixture, params: ModelParams, t: float,
              base="e", cutoff: int | None = None, tail_eps: float = DEFAULT_TAIL_EPS,
              max_cutoff: int = DEFAULT_MAX_CUTOFF, dense_check: bool = False) -> DemResult:
    """Mutual entropy of the exactly evolved atom-field state at time ``t``.

    Without an explicit ``cutoff`` the photon-distribution cutoff is used,
    enlarged if needed so the boundary amplitude stays below tolerance.
    """
    if cutoff is None:
        start = photon_distribution(fld, tail_eps, max_cutoff).cutoff
        amplitudes = exact_amplitudes(fld, start, max_cutoff)
    else:
        amplitudes = fock_amplitudes(fld, cutoff)
    return dem_exact_from_amplitudes(amplitudes, atom, params, t, base, dense_check)
