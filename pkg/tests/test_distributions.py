import numpy as np
import pytest
from scipy import stats

from clickstats import (
    CutoffOverflowError,
    InvalidArgumentError,
    PhotonDistribution,
    coherent_pn,
    fock_pn,
    moments,
    thermal_pn,
)


def test_photon_distribution_validates_and_freezes():
    p = PhotonDistribution(np.array([0.25, 0.75]))
    assert not p.probs.flags.writeable
    assert p.n_max == 1
    with pytest.raises(InvalidArgumentError):
        PhotonDistribution(np.array([0.5, -0.1, 0.6]))
    with pytest.raises(InvalidArgumentError):
        PhotonDistribution(np.array([0.5, 0.4]))  # sums to 0.9


@pytest.mark.parametrize("mu", [0.1, 1.0, 5.0])
def test_coherent_matches_poisson(mu):
    p = coherent_pn(mu, n_max=80)
    ref = stats.poisson.pmf(np.arange(81), mu)
    assert np.allclose(p.probs, ref, atol=1e-13, rtol=0)
    assert np.isclose(p.probs.sum(), 1.0, atol=1e-15)


@pytest.mark.parametrize("mu", [0.2, 1.0, 3.0])
def test_thermal_matches_geometric(mu):
    p = thermal_pn(mu, n_max=200)
    r = mu / (1.0 + mu)
    ref = (1 - r) * r ** np.arange(201)
    assert np.allclose(p.probs, ref, atol=1e-13, rtol=0)


@pytest.mark.parametrize(
    "build,mu,mean,var",
    [
        (coherent_pn, 0.7, 0.7, 0.7),
        (thermal_pn, 0.7, 0.7, 0.7 + 0.49),
        (thermal_pn, 2.0, 2.0, 6.0),
    ],
)
def test_moments_against_closed_forms(build, mu, mean, var):
    p = build(mu, n_max=150)
    m, v = moments(p)
    assert np.isclose(m, mean, atol=1e-9)
    assert np.isclose(v, var, atol=1e-9)


def test_moments_of_vacuum_and_fock():
    assert moments(coherent_pn(0.0)) == (0.0, 0.0)
    m, v = moments(fock_pn(3))
    assert m == 3.0 and v == 0.0


def test_default_cutoff_resolves_tail():
    for build, mu in [(coherent_pn, 4.0), (thermal_pn, 1.5)]:
        p = build(mu)
        wide = build(mu, n_max=p.n_max + 200)
        assert wide.probs[p.n_max + 1 :].sum() < 1e-10


def test_moments_stable_under_cutoff_doubling():
    # The n^2 weighting makes the variance the slowest moment to converge;
    # (2/3)^90 leaves it stable at the 1e-12 level.
    a = thermal_pn(2.0, n_max=90)
    b = thermal_pn(2.0, n_max=180)
    assert abs(a.mean - b.mean) < 1e-9
    assert abs(a.variance - b.variance) < 1e-9


def test_cutoff_overflow_raises():
    with pytest.raises(CutoffOverflowError):
        thermal_pn(50.0)


def test_explicit_cutoff_renormalizes():
    p = coherent_pn(2.0, n_max=4)  # aggressive truncation
    assert np.isclose(p.probs.sum(), 1.0, atol=1e-15)


def test_fock_one_hot_and_bounds():
    p = fock_pn(2, n_max=5)
    expected = np.zeros(6)
    expected[2] = 1.0
    assert np.array_equal(p.probs, expected)
    with pytest.raises(InvalidArgumentError):
        fock_pn(7, n_max=5)
    with pytest.raises(InvalidArgumentError):
        fock_pn(-1)


@pytest.mark.parametrize("mu", [-0.5, -1e-9])
def test_negative_means_rejected(mu):
    with pytest.raises(InvalidArgumentError):
        coherent_pn(mu)
    with pytest.raises(InvalidArgumentError):
        thermal_pn(mu)
