"""Grid evaluation of the DEM surface and the figure presets.

Work is split by squeeze value: each task builds the photon distribution
(and, for exact mode, the Fock amplitudes) for one ``r`` and evaluates every
``(lambda1, t)`` point with it. Rows are reassembled in the fixed order
lambda1 -> r -> t -> mode, so output does not depend on scheduling.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .dynamics import AtomMixture, ModelParams, lifted_coefficients
from .entanglement import dem_exact_from_amplitudes, dem_paper, exact_amplitudes
from .errors import ConsistencyError, NumericDomainError, TruncationError
from .photon_stats import (
    DEFAULT_MAX_CUTOFF,
    DEFAULT_TAIL_EPS,
    SqueezedField,
    photon_distribution,
)

MODES = ("paper", "exact", "both")


def revival_time(theta, g: float) -> float:
    """``2 pi theta / g`` with ``theta`` the (real) field amplitude."""
    amp = abs(complex(theta)) if isinstance(theta, complex) else theta
    if not (math.isfinite(amp) and amp > 0):
        raise NumericDomainError(f"revival time needs theta > 0, got {theta!r}")
    if not (math.isfinite(g) and g > 0):
        raise NumericDomainError(f"revival time needs g > 0, got {g!r}")
    return 2.0 * math.pi * amp / g


@dataclass(frozen=True)
class TimeSpec:
    """One of: a fixed time, the revival time, or ``steps`` intervals on ``[0, t_max]``."""

    kind: str = "revival"
    t: float = 0.0
    t_max: float = 25.0
    steps: int = 500

    def __post_init__(self):
        if self.kind not in ("fixed", "revival", "grid"):
            raise NumericDomainError(f"unknown time spec kind {self.kind!r}")
        if self.kind == "fixed" and not (math.isfinite(self.t) and self.t >= 0):
            raise NumericDomainError(f"fixed time must be >= 0, got {self.t!r}")
        if self.kind == "grid" and not (self.t_max > 0 and self.steps >= 1):
            raise NumericDomainError("time grid needs t_max > 0 and steps >= 1")

    def times(self, theta, g: float) -> np.ndarray:
        if self.kind == "fixed":
            return np.array([float(self.t)])
        if self.kind == "revival":
            return np.array([revival_time(theta, g)])
        return np.linspace(0.0, self.t_max, self.steps + 1)


def _check_grid(name, values, lo, hi):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise NumericDomainError(f"{name} must be a non-empty 1-d grid")
    if not np.all(np.isfinite(arr)) or arr.min() < lo or arr.max() > hi:
        raise NumericDomainError(f"{name} values must lie in [{lo}, {hi}]")
    if np.any(np.diff(arr) <= 0):
        raise NumericDomainError(f"{name} must be strictly ascending")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class SweepSpec:
    lambda1_grid: tuple
    r_grid: tuple
    time: TimeSpec = TimeSpec()
    theta: complex = math.sqrt(5.0)
    squeeze_phase: float = 0.0
    params: ModelParams = ModelParams()
    mode: str = "paper"
    tail_eps: float = DEFAULT_TAIL_EPS
    max_cutoff: int = DEFAULT_MAX_CUTOFF
    base: str = "e"

    def __post_init__(self):
        object.__setattr__(self, "lambda1_grid", _check_grid("lambda1_grid", self.lambda1_grid, 0.0, 1.0))
        object.__setattr__(self, "r_grid", _check_grid("r_grid", self.r_grid, 0.0, math.inf))
        if self.mode not in MODES:
            raise NumericDomainError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def modes(self) -> tuple:
        return ("paper", "exact") if self.mode == "both" else (self.mode,)

    def provenance(self) -> dict:
        theta = complex(self.theta)
        return {
            "package": "jcsqueeze",
            "version": __version__,
            "lambda1_grid": list(self.lambda1_grid),
            "r_grid": list(self.r_grid),
            "time": asdict(self.time),
            "theta_real": theta.real,
            "theta_imag": theta.imag,
            "squeeze_phase": self.squeeze_phase,
            "g": self.params.g,
            "omega0": self.params.omega0,
            "mode": self.mode,
            "tail_eps": self.tail_eps,
            "max_cutoff": self.max_cutoff,
            "base": self.base,
        }


@dataclass(frozen=True)
class SweepRow:
    lambda1: float
    r: float
    t: float
    mode: str
    dem: float = math.nan
    s_atom: float = math.nan
    s_field: float = math.nan
    s_joint: float = math.nan
    kappa_plus: float = math.nan
    kappa_minus: float = math.nan
    tail_mass: float = math.nan
    cutoff: int = -1
    error: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class SweepResult:
    rows: list
    provenance: dict = field(default_factory=dict)

    def values(self, mode: str | None = None) -> np.ndarray:
        """DEM values as an array shaped ``(n_lambda1, n_r, n_t)`` for one mode."""
        lam = self.provenance["lambda1_grid"]
        rs = self.provenance["r_grid"]
        mode = mode or self.rows[0].mode
        picked = [row.dem for row in self.rows if row.mode == mode]
        return np.array(picked).reshape(len(lam), len(rs), -1)

    @property
    def failed(self) -> list:
        return [row for row in self.rows if row.error]


def _format_error(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _evaluate_r(spec: SweepSpec, r: float, times, dist=None, amplitudes=None):
    """All rows for one squeeze value, indexed ``[i_lambda][i_t][i_mode]``."""
    fld = SqueezedField(spec.theta, r, spec.squeeze_phase)
    out = [[[None] * len(spec.modes) for _ in times] for _ in spec.lambda1_grid]
    try:
        if dist is None:
            dist = photon_distribution(fld, spec.tail_eps, spec.max_cutoff)
        if "exact" in spec.modes and amplitudes is None:
            amplitudes = exact_amplitudes(fld, dist.cutoff, spec.max_cutoff)
    except (NumericDomainError, TruncationError, ConsistencyError) as exc:
        msg = _format_error(exc)
        for i, lam in enumerate(spec.lambda1_grid):
            for k, t in enumerate(times):
                for m, mode in enumerate(spec.modes):
                    out[i][k][m] = SweepRow(lam, r, float(t), mode, error=msg)
        return out

    for i, lam in enumerate(spec.lambda1_grid):
        atom = AtomMixture.from_excited(lam)
        for k, t in enumerate(times):
            t = float(t)
            for m, mode in enumerate(spec.modes):
                try:
                    if mode == "paper":
                        res = dem_paper(lifted_coefficients(dist, atom, spec.params, t), spec.base)
                        cutoff = dist.cutoff
                    else:
                        res = dem_exact_from_amplitudes(amplitudes, atom, spec.params, t, spec.base)
                        cutoff = len(amplitudes) - 1
                    row = SweepRow(lam, r, t, mode, res.dem, res.s_atom, res.s_field, res.s_joint,
                                   res.kappa_plus, res.kappa_minus, dist.tail_mass, cutoff)
                except (NumericDomainError, TruncationError, ConsistencyError) as exc:
                    row = SweepRow(lam, r, t, mode, tail_mass=dist.tail_mass,
                                   cutoff=dist.cutoff, error=_format_error(exc))
                out[i][k][m] = row
    return out


def _evaluate_r_task(args):
    spec, r, times = args
    return _evaluate_r(spec, r, times)


def _evaluate_point_uncached(spec: SweepSpec, lam: float, r: float, t: float):
    one = SweepSpec((lam,), (r,), TimeSpec("fixed", t), spec.theta, spec.squeeze_phase,
                    spec.params, spec.mode, spec.tail_eps, spec.max_cutoff, spec.base)
    return _evaluate_r(one, r, [t])[0][0]


_ERROR_TYPES = {cls.__name__: cls for cls in (NumericDomainError, TruncationError, ConsistencyError)}


def run_sweep(spec: SweepSpec, workers: int = 1, reuse_distributions: bool = True) -> SweepResult:
    """Evaluate the requested DEM mode(s) on the full grid.

    Per-point failures are recorded in the row's ``error`` column. The sweep
    raises only when every point failed.
    """
    times = spec.time.times(spec.theta, spec.params.g)
    if reuse_distributions:
        tasks = [(spec, r, times) for r in spec.r_grid]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
                per_r = list(pool.map(_evaluate_r_task, tasks))
        else:
            per_r = [_evaluate_r_task(task) for task in tasks]
    else:
        per_r = [
            [[_evaluate_point_uncached(spec, lam, r, float(t)) for t in times]
             for lam in spec.lambda1_grid]
            for r in spec.r_grid
        ]

    rows = []
    for i in range(len(spec.lambda1_grid)):
        for j in range(len(spec.r_grid)):
            for k in range(len(times)):
                rows.extend(per_r[j][i][k])

    result = SweepResult(rows, spec.provenance())
    if rows and all(row.error for row in rows):
        name, _, msg = rows[0].error.partition(": ")
        raise _ERROR_TYPES.get(name, RuntimeError)(f"all sweep points failed; first: {msg}")
    return result


def fig3_spec(mode: str = "paper", theta=math.sqrt(5.0), params: ModelParams = ModelParams(),
              lambda1_step: float = 0.05, r_step: float = 0.25, r_max: float = 3.0, **kw) -> SweepSpec:
    """DEM over ``lambda1 in [0, 1]`` and ``r in [0, r_max]`` at the revival time."""
    lam = np.round(np.linspace(0.0, 1.0, round(1.0 / lambda1_step) + 1), 12)
    rs = np.round(np.linspace(0.0, r_max, round(r_max / r_step) + 1), 12)
    return SweepSpec(tuple(lam), tuple(rs), TimeSpec("revival"), theta=theta,
                     params=params, mode=mode, **kw)
