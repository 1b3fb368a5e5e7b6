import numpy as np
import pytest

from clickstats import (
    ClickDistribution,
    CountRecord,
    DetectorModel,
    IllConditionedInversionError,
    InvalidArgumentError,
    PhotonDistribution,
    forward_clicks,
    fock_pn,
    invert_clicks,
    lstsq_simplex,
    mc_q_mandel_from_clicks,
    q_mandel_from_clicks,
    sample_counts,
)
from oracles import lstsq_simplex_by_enumeration


def objective(A, x, b):
    return float(np.sum((A @ x - b) ** 2))


def test_lstsq_simplex_matches_support_enumeration():
    rng = np.random.default_rng(19)
    for dim in range(3, 9):
        for trial in range(4):
            A = rng.standard_normal((dim + 2, dim))
            if trial == 3:
                A[:, 1] = A[:, 0]  # duplicate columns, degenerate optimum
            b = rng.standard_normal(dim + 2)
            x = lstsq_simplex(A, b)
            assert np.all(x >= 0)
            assert np.isclose(x.sum(), 1.0, atol=1e-12)
            ref = lstsq_simplex_by_enumeration(A, b)
            assert objective(A, x, b) == pytest.approx(objective(A, ref, b), abs=1e-8)


def test_lstsq_simplex_exact_interior_solution():
    rng = np.random.default_rng(23)
    A = rng.standard_normal((10, 5))
    target = np.array([0.1, 0.3, 0.2, 0.25, 0.15])
    x = lstsq_simplex(A, A @ target)
    np.testing.assert_allclose(x, target, atol=1e-10)


def test_lstsq_simplex_input_validation():
    with pytest.raises(InvalidArgumentError):
        lstsq_simplex(np.ones(4), np.ones(4))
    with pytest.raises(InvalidArgumentError):
        lstsq_simplex(np.ones((3, 2)), np.ones(4))


def test_invert_clicks_round_trip():
    det = DetectorModel.ideal(8)
    probs = np.zeros(9)
    probs[[0, 2, 5]] = [0.5, 0.3, 0.2]
    c = forward_clicks(PhotonDistribution(probs), det)
    for method in ("constrained", "pseudo_inverse"):
        res = invert_clicks(c, det, n_max=8, method=method)
        np.testing.assert_allclose(res.probs, probs, atol=1e-8)
        assert res.residual_norm < 1e-10
        assert res.method == method
        assert res.condition_number > 1.0
    np.testing.assert_allclose(res.distribution().probs, probs, atol=1e-8)


def test_pseudo_inverse_reports_negative_mass():
    det = DetectorModel.ideal(8)
    # Half "no clicks", half "every bin clicked" is not reachable from any
    # photon distribution on 0..8, so the unconstrained solve goes negative.
    c = np.zeros(9)
    c[0] = c[8] = 0.5
    raw = invert_clicks(ClickDistribution(c), det, n_max=8, method="pseudo_inverse")
    assert raw.negative_mass > 1e-3
    with pytest.raises(InvalidArgumentError):
        raw.distribution()
    fitted = invert_clicks(ClickDistribution(c), det, n_max=8, method="constrained")
    assert fitted.negative_mass == 0.0
    assert fitted.residual_norm > 1e-3
    # The unconstrained solve can only fit better, never worse.
    assert fitted.residual_norm >= raw.residual_norm - 1e-12
    fitted.distribution()  # must not raise


def test_invert_clicks_refuses_underdetermined_problems():
    det = DetectorModel.ideal(8)
    c = forward_clicks(fock_pn(1), det)
    with pytest.raises(IllConditionedInversionError):
        invert_clicks(c, det, n_max=40)


def test_invert_clicks_refuses_ill_conditioned_matrix():
    det = DetectorModel(n_bins=8, efficiency=0.07)
    c = forward_clicks(fock_pn(1), det)
    with pytest.raises(IllConditionedInversionError) as info:
        invert_clicks(c, det, n_max=8)
    assert info.value.condition_number > 1e12


def test_invert_clicks_argument_errors():
    det = DetectorModel.ideal(8)
    c = forward_clicks(fock_pn(1), det)
    with pytest.raises(InvalidArgumentError):
        invert_clicks(c, det, n_max=8, method="magic")
    with pytest.raises(InvalidArgumentError):
        invert_clicks(c, DetectorModel.ideal(4), n_max=4)
    with pytest.raises(InvalidArgumentError):
        invert_clicks(c, det, n_max=-1)


def test_q_mandel_from_clicks_keeps_loss_in_the_state():
    det = DetectorModel(n_bins=8, efficiency=0.6)
    c = forward_clicks(fock_pn(1), det)
    # The witness refers to the photons that survived the 60% efficiency:
    # a Bernoulli(0.6) photon number with Q = -0.6.
    assert q_mandel_from_clicks(c, det, n_max=8) == pytest.approx(-0.6, abs=1e-6)


def test_mc_q_mandel_from_clicks_reproducible():
    det = DetectorModel(n_bins=8, efficiency=0.6)
    c = forward_clicks(fock_pn(1), det)
    rec = sample_counts(c, 50_000, seed=3)
    a = mc_q_mandel_from_clicks(rec, det, n_max=8, n_replicas=200, seed=9)
    b = mc_q_mandel_from_clicks(rec, det, n_max=8, n_replicas=200, seed=9)
    assert a.value == b.value
    assert np.array_equal(a.samples, b.samples)
    assert a.value == q_mandel_from_clicks(
        ClickDistribution(np.array(rec.counts) / rec.total_events), det, 8
    )
    assert abs(a.value + 0.6) < 4 * a.std_error + 0.05
    with pytest.raises(InvalidArgumentError):
        mc_q_mandel_from_clicks(rec, det, n_max=8, n_replicas=1, seed=0)
