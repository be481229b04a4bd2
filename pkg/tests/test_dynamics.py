import math

import numpy as np
import pytest

from jcsqueeze.dynamics import (
    AtomMixture,
    ModelParams,
    lifted_coefficients,
    rabi_frequency,
    transition_c,
    transition_s,
    transition_series,
)
from jcsqueeze.errors import NumericDomainError
from jcsqueeze.photon_stats import SqueezedField, photon_distribution

from oracles import evolve_joint, poisson, squeezed_state

SQRT5 = math.sqrt(5)
P1 = ModelParams()


@pytest.fixture(scope="module")
def coherent5():
    return photon_distribution(SqueezedField(SQRT5, 0.0))


@pytest.mark.parametrize("g, n, expected", [(1, 0, 1), (1, 3, 2), (2, 8, 6)])
def test_rabi_frequency(g, n, expected):
    assert rabi_frequency(ModelParams(g), n) == expected


def test_params_and_atom_validation():
    with pytest.raises(NumericDomainError):
        ModelParams(0.0)
    with pytest.raises(NumericDomainError):
        AtomMixture(0.3, 0.6)
    with pytest.raises(NumericDomainError):
        AtomMixture(-0.1, 1.1)
    with pytest.raises(NumericDomainError):
        transition_c(photon_distribution(SqueezedField(1.0)), P1, -1.0)


def test_c_at_zero_and_complement(coherent5):
    total = 1 - coherent5.tail_mass
    assert transition_c(coherent5, P1, 0.0) == pytest.approx(total, abs=1e-15)
    assert transition_s(coherent5, P1, 0.0) == 0.0
    for t in np.linspace(0, 30, 31):
        c = transition_c(coherent5, P1, t)
        s = transition_s(coherent5, P1, t)
        assert c + s == pytest.approx(total, abs=1e-14)


def test_s_regression_fixture(coherent5):
    t = math.pi / (2 * math.sqrt(6))
    direct = sum(poisson(5, n) * math.sin(math.sqrt(n + 1) * t) ** 2 for n in range(80))
    s = transition_s(coherent5, P1, t)
    assert 0 < s < 1
    assert s == pytest.approx(direct, abs=1e-12)


def test_c_against_dense_hamiltonian():
    # excited atom, squeezed field: compare with exp(-iHt) on the full space
    theta, r, dim = 1.0, 0.5, 70
    psi = squeezed_state(theta, r, dim=dim)
    dist = photon_distribution(SqueezedField(theta, r))
    for t in (0.3, 1.7, 5.0):
        sigma = evolve_joint(psi, 1.0, t)
        excited_pop = np.trace(sigma[dim:, dim:]).real
        assert transition_c(dist, P1, t) == pytest.approx(excited_pop, abs=1e-10)


def test_series_matches_pointwise(coherent5):
    times = np.linspace(0, 25, 51)
    c, s = transition_series(coherent5, ModelParams(1.3), times)
    for k, t in enumerate(times):
        assert c[k] == pytest.approx(transition_c(coherent5, ModelParams(1.3), t), abs=1e-13)
        assert s[k] == pytest.approx(transition_s(coherent5, ModelParams(1.3), t), abs=1e-13)


def test_collapse_plateau(coherent5):
    c, _ = transition_series(coherent5, P1, np.linspace(4, 10, 2001))
    assert c.mean() == pytest.approx(0.5, abs=0.05)


def test_lifted_at_zero_time(coherent5):
    e = lifted_coefficients(coherent5, AtomMixture(0.0, 1.0), P1, 0.0)
    assert e.e1 == pytest.approx(1.0, abs=1e-12)
    assert e.e2 == 0 and e.e3 == 0
    assert e.e4 == pytest.approx(1 - math.exp(-5), abs=1e-12)
    assert e.e4 == pytest.approx(0.993262, abs=1e-6)


def test_lifted_equal_weights_coherence(coherent5):
    t = 2.2
    e = lifted_coefficients(coherent5, AtomMixture(0.5, 0.5), P1, t)
    p = coherent5.probs
    p1 = np.append(p[1:], 0.0)
    ref = 0.25 * np.sum(np.sin(2 * np.sqrt(np.arange(len(p)) + 1) * t) * (p - p1))
    assert e.e2.imag == pytest.approx(ref, abs=1e-14)
    assert e.e2.real == 0.0


@pytest.mark.parametrize("r", [0.0, 1.0, 2.0])
def test_e1_is_c_for_excited_atom(r):
    dist = photon_distribution(SqueezedField(SQRT5, r))
    for t in np.linspace(0, 25, 26):
        e = lifted_coefficients(dist, AtomMixture(0.0, 1.0), P1, t)
        assert e.e1 == transition_c(dist, P1, t)


@pytest.mark.parametrize("lam", [0.0, 0.3, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("r", [0.0, 0.75, 2.5])
def test_coefficient_structure(lam, r):
    dist = photon_distribution(SqueezedField(SQRT5, r))
    for t in (0.0, 1.1, 7.3, 14.05):
        e = lifted_coefficients(dist, AtomMixture.from_excited(lam), P1, t)
        assert e.e3 == -e.e2
        assert (e.e2 * e.e3).real >= 0 and (e.e2 * e.e3).imag == 0
        for v in (e.e1, e.e2.imag, e.e4):
            assert -1 - 1e-12 <= v <= 1 + 1e-12


def test_omega0_does_not_enter(coherent5):
    a = lifted_coefficients(coherent5, AtomMixture(0.4, 0.6), ModelParams(1.0, 1.0), 3.3)
    b = lifted_coefficients(coherent5, AtomMixture(0.4, 0.6), ModelParams(1.0, 17.0), 3.3)
    assert a == b


def test_determinism_and_compensated(coherent5):
    atom = AtomMixture(0.25, 0.75)
    a = lifted_coefficients(coherent5, atom, P1, 9.1)
    b = lifted_coefficients(coherent5, atom, P1, 9.1)
    assert a == b
    c = lifted_coefficients(coherent5, atom, P1, 9.1, compensated=True)
    assert c.e1 == pytest.approx(a.e1, abs=1e-15)
    assert c.e4 == pytest.approx(a.e4, abs=1e-15)
