"""Exit criteria. Each check records a one-line verdict shown in the
"acceptance criteria" section of the pytest summary."""
import io
import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from jcsqueeze import cli
from jcsqueeze.dynamics import AtomMixture, ModelParams, transition_c, transition_series
from jcsqueeze.entanglement import EXCITED, dem_exact, evolve_branch, shannon_entropy
from jcsqueeze.photon_stats import SqueezedField, distribution_moments, photon_distribution, squeezed_log_probs
from jcsqueeze.results_io import read_table
from jcsqueeze.sweep import fig3_spec, revival_time, run_sweep

from oracles import poisson

pytestmark = pytest.mark.acceptance

SQRT5 = math.sqrt(5)
P1 = ModelParams()


@pytest.mark.parametrize("theta", [0.0, 1.0, SQRT5])
@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 2.0, 3.0])
def test_01_normalization(criterion, theta, r):
    d = photon_distribution(SqueezedField(theta, r), tail_eps=1e-12)
    total = d.probs.sum() + d.tail_mass
    # mass actually present beyond the cutoff, from a four-times longer vector
    if r > 0:
        beyond = np.exp(squeezed_log_probs(SqueezedField(theta, r), 4 * d.cutoff))[d.cutoff + 1:].sum()
    else:
        beyond = sum(poisson(theta**2, n) for n in range(d.cutoff + 1, 4 * d.cutoff)) if theta else 0.0
    ok = abs(total - 1) <= 1e-9 and d.tail_mass < 1e-12 and beyond <= 1e-12 + 1e-14
    criterion(f"1 normalization theta={theta:.4g} r={r}", ok,
              f"sum+tail-1={total - 1:.2e} tail={d.tail_mass:.2e} beyond={beyond:.2e} N={d.cutoff}")


@pytest.mark.parametrize("theta", [0.0, 1.0, SQRT5])
def test_02_coherent_limit(criterion, theta):
    d = photon_distribution(SqueezedField(theta, 0.0), tail_eps=1e-12)
    ref = np.array([poisson(theta**2, n) for n in range(len(d.probs))])
    err = np.max(np.abs(d.probs - ref))
    ok = err <= 1e-10
    detail = f"max|P-Poisson|={err:.2e}"
    if theta == SQRT5:
        p0_err = abs(d.probs[0] - math.exp(-5))
        ok = ok and p0_err <= 1e-12
        detail += f" |P(0)-e^-5|={p0_err:.2e}"
    criterion(f"2 coherent limit theta={theta:.4g}", ok, detail)


def test_03_squeezed_vacuum_parity(criterion):
    d = photon_distribution(SqueezedField(0.0, 1.0), tail_eps=1e-12)
    odd_zero = bool(np.all(d.probs[1::2] == 0.0))
    mean, _ = distribution_moments(d)
    err = abs(mean - math.sinh(1.0) ** 2)
    criterion("3 squeezed vacuum parity and mean", odd_zero and err <= 1e-8,
              f"odd all zero={odd_zero} |mean-sinh^2 1|={err:.2e}")


def test_04_fig2_structure(criterion):
    counts = {}
    for r in (0.0, 2.0):
        p = photon_distribution(SqueezedField(SQRT5, r)).probs[:31]
        counts[r] = len(find_peaks(p, prominence=1e-4)[0])
    criterion("4 fig2 interior maxima", counts[2.0] >= 2 and counts[0.0] == 1,
              f"r=2: {counts[2.0]} maxima, r=0: {counts[0.0]}")


def test_05_fig1_structure(criterion):
    d = photon_distribution(SqueezedField(SQRT5, 0.0))
    c0 = transition_c(d, P1, 0.0)
    collapse, _ = transition_series(d, P1, np.linspace(4, 10, 2001))
    revival, _ = transition_series(d, P1, np.linspace(12, 17, 2001))
    dev = np.max(np.abs(revival - 0.5))
    ok = abs(c0 - (1 - d.tail_mass)) <= 1e-15 and abs(collapse.mean() - 0.5) <= 0.05 and dev > 0.1
    criterion("5 fig1 collapse and revival", ok,
              f"c(0)={c0:.15f} mean[4,10]={collapse.mean():.4f} max|c-.5|[12,17]={dev:.4f} "
              f"t_r={revival_time(SQRT5, 1.0):.4f}")


@pytest.mark.parametrize("r", [0.0, 2.0])
def test_06_oracle_consistency(criterion, r):
    f = SqueezedField(SQRT5, r)
    d = photon_distribution(f)
    worst = 0.0
    for t in np.linspace(0, 25, 100):
        b = evolve_branch(f, P1, EXCITED, d.cutoff, t)
        worst = max(worst, abs(np.vdot(b.excited, b.excited).real - transition_c(d, P1, t)))
    criterion(f"6 branch population vs c(t) r={r}", worst <= 1e-10, f"max diff={worst:.2e}")


@pytest.mark.parametrize("r", [0.0, 1.0, 3.0])
def test_07_exact_invariants(criterion, r):
    f = SqueezedField(SQRT5, r)
    zero_err = joint_err = al_violation = pure_err = 0.0
    for lam in (0.0, 0.25, 0.5, 1.0):
        atom = AtomMixture.from_excited(lam)
        zero_err = max(zero_err, abs(dem_exact(f, atom, P1, 0.0).dem))
        h = shannon_entropy([atom.lambda0, atom.lambda1])
        for t in np.linspace(0, 25, 50):
            res = dem_exact(f, atom, P1, t)
            joint_err = max(joint_err, abs(res.s_joint - h))
            al_violation = max(al_violation,
                               abs(res.s_atom - res.s_field) - res.s_joint,
                               res.s_joint - res.s_atom - res.s_field)
            if lam in (0.0, 1.0):
                pure_err = max(pure_err, abs(res.dem - 2 * res.s_atom))
    ok = zero_err <= 1e-9 and joint_err <= 1e-8 and al_violation <= 1e-8 and pure_err <= 1e-9
    criterion(f"7 exact-mode invariants r={r}", ok,
              f"|DEM(0)|={zero_err:.1e} |S_joint-H|={joint_err:.1e} "
              f"Araki-Lieb excess={al_violation:.1e} |DEM-2S_A|={pure_err:.1e}")


@pytest.fixture(scope="module")
def fig3_paper():
    res = run_sweep(fig3_spec("paper"))
    lam = np.array(res.provenance["lambda1_grid"])
    rs = np.array(res.provenance["r_grid"])
    return lam, rs, res.values("paper")[:, :, 0], len(res.failed)


def test_08a_argmax_at_half(criterion, fig3_paper):
    lam, rs, z, failed = fig3_paper
    argmax = lam[np.nanargmax(z, axis=0)]
    bad = [f"r={r}:{a}" for r, a in zip(rs, argmax) if a != 0.5]
    criterion("8a fig3 argmax over lambda1 is 0.5 for every r", not bad,
              f"off at {len(bad)}/{len(rs)} r values ({', '.join(bad[:4])}...); {failed} domain-error points")


def test_08b_min_at_edges(criterion, fig3_paper):
    lam, rs, z, failed = fig3_paper
    argmin = lam[np.nanargmin(z, axis=0)]
    bad = [f"r={r}:{a}" for r, a in zip(rs, argmin) if a not in (0.0, 1.0)]
    criterion("8b fig3 min over lambda1 at 0 or 1 for every r", not bad,
              f"interior minima at {bad}; {failed} domain-error points")


def test_08c_squeezing_strengthens(criterion, fig3_paper):
    lam, rs, z, _ = fig3_paper
    i = int(np.argmin(np.abs(lam - 0.5)))
    d3, d0 = z[i, -1], z[i, 0]
    criterion("8c DEM(0.5, r=3) > DEM(0.5, r=0)", d3 > d0, f"{d3:.6f} vs {d0:.6f}")


def test_08d_symmetry(criterion, fig3_paper):
    lam, rs, z, _ = fig3_paper
    asym = np.nanmax(np.abs(z - z[::-1, :]))
    top = np.nanmax(z)
    criterion("8d max|DEM(l)-DEM(1-l)| < 10% of surface max", asym < 0.1 * top,
              f"asymmetry={asym:.4f} ({100 * asym / top:.1f}% of max {top:.4f})")


def test_09_compare_gap(criterion, tmp_path):
    out = tmp_path / "compare.csv"
    code = cli.main(["compare", "--lambda1", "0.5", "--r", "1", "--theta", repr(SQRT5),
                     "--t-max", "25", "--steps", "500", "-o", str(out)])
    table = read_table(io.StringIO(out.read_text()))
    p0 = photon_distribution(SqueezedField(SQRT5, 1.0)).probs[0]
    e1, e4 = 0.5, 0.5 * (1 - p0)
    predicted = -(e1 * math.log(e1) + e4 * math.log(e4))
    gap0 = table["gap"][0]
    ok = code == 0 and table["t"][0] == 0.0 and abs(gap0 - predicted) <= 1e-9 and abs(table["dem_exact"][0]) <= 1e-9
    criterion("9 paper-vs-exact gap at t=0", ok,
              f"gap={gap0:.12f} predicted={predicted:.12f} exact(0)={table['dem_exact'][0]:.1e} rows={len(table['t'])}")


def test_10_determinism(criterion, tmp_path):
    outs = []
    for workers in ("1", "4"):
        path = tmp_path / f"fig3_w{workers}.csv"
        assert cli.main(["fig3", "--mode", "both", "--workers", workers, "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    criterion("10 fig3 byte-identical for 1 and 4 workers", outs[0] == outs[1],
              f"{len(outs[0])} bytes")
