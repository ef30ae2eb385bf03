import math

import numpy as np
import pytest

from fracarray import (
    CouplingModel,
    EstimationFailure,
    IdentifiabilityError,
    Scenario,
    SensorArray,
    coarray_music,
    coarray_statistics,
    difference_coarray,
    equally_spaced_thetas,
    nested,
    run_sweep,
    run_trial,
    synthesize,
    trial_seed,
)
from conftest import S_ELEMS


def _scenario(**kw):
    base = dict(array=SensorArray((0, 1, 4, 6)), thetas=(0.1, -0.2), snapshots=200,
                trials=4, grid_size=2048)
    base.update(kw)
    return Scenario(**base)


def test_scenario_validation():
    with pytest.raises(ValueError):
        _scenario(thetas=())
    with pytest.raises(ValueError):
        _scenario(thetas=(0.1, 0.1))
    with pytest.raises(ValueError):
        _scenario(thetas=(0.7,))
    with pytest.raises(ValueError):
        _scenario(powers=(1.0,))
    with pytest.raises(ValueError):
        _scenario(powers=(1.0, -1.0))
    with pytest.raises(ValueError):
        _scenario(failure_probability=1.0)
    with pytest.raises(ValueError):
        _scenario(trials=0)
    with pytest.raises(ValueError):
        _scenario(snapshots=0)
    with pytest.raises(ValueError):
        _scenario(grid_size=2)


def test_noise_power_mapping():
    assert _scenario(snr_db=0.0).noise_power == 1.0
    assert _scenario(snr_db=-10.0).noise_power == pytest.approx(10.0)
    assert _scenario(snr_db=20.0).noise_power == pytest.approx(0.01)
    assert _scenario(snr_db=math.inf).noise_power == 0.0


def test_equally_spaced_thetas():
    th = equally_spaced_thetas(20)
    assert len(th) == len(set(th)) == 20
    assert th[0] == pytest.approx(-0.45)
    assert th[-1] == pytest.approx(0.45)
    assert equally_spaced_thetas(1) == (0.0,)
    with pytest.raises(ValueError):
        equally_spaced_thetas(0)


def test_synthesize_shapes_and_determinism():
    sc = _scenario()
    arr1, x1 = synthesize(sc, np.random.default_rng(5))
    arr2, x2 = synthesize(sc, np.random.default_rng(5))
    assert arr1.elements == sc.array.elements  # no failures configured
    assert x1.shape == (4, 200)
    assert np.array_equal(x1, x2)
    _, x3 = synthesize(sc, np.random.default_rng(6))
    assert not np.array_equal(x1, x3)


def test_synthesize_broadside_noiseless_is_rank_one():
    sc = _scenario(thetas=(0.0,), snr_db=math.inf)
    _, x = synthesize(sc, np.random.default_rng(0))
    # steering at broadside is all ones, so every sensor sees the same signal
    assert np.allclose(x, x[0:1, :])


def test_synthesize_zero_coupling_matches_no_coupling():
    sc_none = _scenario(snr_db=math.inf)
    sc_zero = _scenario(snr_db=math.inf, coupling=CouplingModel(c1_magnitude=0.0))
    _, a = synthesize(sc_none, np.random.default_rng(9))
    _, b = synthesize(sc_zero, np.random.default_rng(9))
    assert np.allclose(a, b)


def test_coarray_statistics_matches_per_lag_average():
    arr = SensorArray((0, 1, 4, 6))
    rng = np.random.default_rng(3)
    x = rng.standard_normal((4, 50)) + 1j * rng.standard_normal((4, 50))
    v = coarray_statistics(x, arr)
    R = x @ x.conj().T / 50
    pos = arr.elements
    m = difference_coarray(arr).central_ula_halfwidth
    assert v.shape == (2 * m + 1,)
    for lag in range(-m, m + 1):
        cells = [R[i, j] for i in range(4) for j in range(4) if pos[i] - pos[j] == lag]
        assert cells, "central run must be covered"
        assert v[lag + m] == pytest.approx(np.mean(cells), abs=1e-12)
    assert v[m].imag == pytest.approx(0.0, abs=1e-12)
    assert v[m].real > 0  # lag zero is a mean power


def test_coarray_statistics_duplicate_count_is_weight():
    arr = SensorArray(S_ELEMS)
    prof = difference_coarray(arr)
    # every lag inside the central run averages exactly w(m) covariance cells
    pos = np.asarray(arr.elements)
    lag = pos[:, None] - pos[None, :]
    m = prof.central_ula_halfwidth
    for d in range(-m, m + 1):
        assert int((lag == d).sum()) == prof.weight(d)


def test_coarray_statistics_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        coarray_statistics(np.zeros((3, 10), dtype=complex), SensorArray((0, 1, 4, 6)))


def test_noiseless_virtual_vector_has_exact_phase_ramp():
    theta = 0.1234567
    sc = _scenario(thetas=(theta,), snr_db=math.inf)
    surviving, x = synthesize(sc, np.random.default_rng(11))
    v = coarray_statistics(x, surviving)
    m = (v.size - 1) // 2
    ramp = v / v[m]
    want = np.exp(2j * np.pi * theta * np.arange(-m, m + 1))
    assert np.allclose(ramp, want, atol=1e-10)


def test_virtual_vector_converges_to_closed_form():
    # many snapshots: lag-m entry approaches sum_k p_k e^{j2 pi theta_k m},
    # plus the noise power at lag zero
    sc = _scenario(thetas=(0.3, -0.25), powers=(1.0, 2.0), snapshots=100_000,
                   snr_db=0.0)
    surviving, x = synthesize(sc, np.random.default_rng(2))
    v = coarray_statistics(x, surviving)
    m = (v.size - 1) // 2
    lags = np.arange(-m, m + 1)
    want = (1.0 * np.exp(2j * np.pi * 0.3 * lags)
            + 2.0 * np.exp(2j * np.pi * -0.25 * lags))
    want[m] += sc.noise_power
    assert np.max(np.abs(v - want)) < 0.05


def test_music_recovers_grid_aligned_sources_exactly():
    grid_size = 2048
    thetas = np.array([-0.25, 0.0, 0.125])  # all multiples of 1/2048
    m = 6
    lags = np.arange(-m, m + 1)
    v = np.exp(2j * np.pi * np.outer(lags, thetas)).sum(axis=1)
    est = coarray_music(v, 3, grid_size)
    assert np.allclose(est, np.sort(thetas), atol=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_noiseless_single_source_within_one_cell(seed):
    rng = np.random.default_rng(700 + seed)
    theta = float(rng.uniform(-0.5, 0.5))
    sc = _scenario(thetas=(theta,), snr_db=math.inf, grid_size=4096)
    surviving, x = synthesize(sc, np.random.default_rng(seed))
    est = coarray_music(coarray_statistics(x, surviving), 1, 4096)
    assert abs(est[0] - theta) <= 1 / 4096


def test_music_identifiability_limit():
    v = np.ones(5, dtype=complex)  # m = 2 -> at most 2 sources
    with pytest.raises(IdentifiabilityError):
        coarray_music(v, 3)
    with pytest.raises(ValueError):
        coarray_music(np.ones(4, dtype=complex), 1)  # even length is malformed


def test_smoothed_covariance_is_positive_semidefinite():
    sc = _scenario(snr_db=0.0)
    surviving, x = synthesize(sc, np.random.default_rng(21))
    v = coarray_statistics(x, surviving)
    m = (v.size - 1) // 2
    idx = np.arange(m + 1)
    Z = v[m + idx[:, None] - idx[None, :]]
    R = (Z @ Z.conj().T) / (m + 1)
    ev = np.linalg.eigvalsh(R)
    assert ev.min() >= -1e-10 * max(ev.max(), 1.0)


def test_run_trial_none_when_sources_exceed_identifiability():
    sc = Scenario(array=nested(4, 4), thetas=equally_spaced_thetas(20),
                  snapshots=100, trials=1, grid_size=2048)
    # central run halfwidth 19 gives a 20-sensor smoothed subarray: 20 sources
    # is one too many
    assert run_trial(sc, 0) is None


def test_run_trial_none_when_every_sensor_fails():
    sc = Scenario(array=SensorArray((0, 1)), thetas=(0.1,), snapshots=20,
                  trials=1, failure_probability=0.97, grid_size=512)
    outcomes = {run_trial(sc, s) is None for s in range(60)}
    assert True in outcomes  # some seed kills both sensors
    with pytest.raises(EstimationFailure):
        for s in range(60):
            rng = np.random.default_rng(s)
            synthesize(sc, rng)


def test_trial_seed_is_order_free_and_distinct():
    a = np.random.default_rng(trial_seed(7, 0.25, 3)).integers(0, 1 << 30, 8)
    b = np.random.default_rng(trial_seed(7, 0.25, 3)).integers(0, 1 << 30, 8)
    c = np.random.default_rng(trial_seed(7, 0.25, 4)).integers(0, 1 << 30, 8)
    d = np.random.default_rng(trial_seed(7, 0.5, 3)).integers(0, 1 << 30, 8)
    e = np.random.default_rng(trial_seed(8, 0.25, 3)).integers(0, 1 << 30, 8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert not np.array_equal(a, e)


def test_run_trial_deterministic():
    sc = _scenario()
    a = run_trial(sc, trial_seed(0, 0.0, 0))
    b = run_trial(sc, trial_seed(0, 0.0, 0))
    assert a is not None and np.array_equal(a, b)


def test_sweep_points_and_determinism():
    sc = _scenario(trials=5)
    res1 = run_sweep(sc, "snr_db", [-10.0, 20.0])
    res2 = run_sweep(sc, "snr_db", [-10.0, 20.0])
    assert res1.axis == "snr_db"
    assert [p.value for p in res1.points] == [-10.0, 20.0]
    for p1, p2 in zip(res1.points, res2.points):
        assert p1.trial_count == 5
        assert p1.success_count == p2.success_count
        assert p1.rmse == p2.rmse  # bit-identical reruns
        assert 0 <= p1.success_count <= p1.trial_count


def test_sweep_clean_conditions_all_trials_succeed():
    # no failures, no coupling, generous SNR: every trial must resolve
    sc = _scenario(trials=5, snr_db=20.0)
    point = run_sweep(sc, "failure_probability", [0.0]).points[0]
    assert point.success_count == point.trial_count == 5
    assert point.rmse is not None and point.rmse >= 0.0


def test_sweep_worker_count_does_not_change_results():
    sc = _scenario(trials=6)
    serial = run_sweep(sc, "snr_db", [0.0])
    threaded = run_sweep(sc, "snr_db", [0.0], workers=3)
    assert serial.points[0].rmse == threaded.points[0].rmse
    assert serial.points[0].success_count == threaded.points[0].success_count


def test_sweep_rmse_averages_only_successful_trials():
    # heavy coupling makes some trials fail; the reported rmse must equal the
    # mean of per-trial rms errors recomputed over the surviving trials only
    sc = Scenario(array=SensorArray(S_ELEMS), thetas=equally_spaced_thetas(20),
                  snapshots=400, trials=6, seed=3, grid_size=4096)
    value = 0.5
    res = run_sweep(sc, "coupling_c1_mag", [value])
    point = res.points[0]
    assert 0 < point.success_count < point.trial_count, "need a mixed outcome"

    probe = Scenario(array=sc.array, thetas=sc.thetas, snapshots=sc.snapshots,
                     trials=sc.trials, seed=sc.seed, grid_size=sc.grid_size,
                     coupling=CouplingModel(q=15, c1_magnitude=value,
                                            phase_mode="random"))
    truth = np.sort(np.asarray(sc.thetas))
    errs = []
    for i in range(sc.trials):
        est = run_trial(probe, trial_seed(sc.seed, value, i))
        if est is not None:
            errs.append(math.sqrt(float(np.mean((est - truth) ** 2))))
    assert len(errs) == point.success_count
    assert point.rmse == float(np.mean(errs))


def test_sweep_on_trial_callback_order():
    sc = _scenario(trials=3)
    seen = []
    run_sweep(sc, "snr_db", [0.0, 10.0], on_trial=lambda v, i, est: seen.append((v, i, est is not None)))
    assert [(v, i) for v, i, _ in seen] == [(0.0, 0), (0.0, 1), (0.0, 2),
                                           (10.0, 0), (10.0, 1), (10.0, 2)]


def test_sweep_axis_validation():
    sc = _scenario()
    with pytest.raises(ValueError):
        run_sweep(sc, "bandwidth", [1.0])
    with pytest.raises(ValueError):
        run_sweep(sc, "snr_db", [])


def test_sweep_failure_axis_reports_none_rmse_when_hopeless():
    sc = Scenario(array=nested(4, 4), thetas=equally_spaced_thetas(20),
                  snapshots=50, trials=3, grid_size=1024)
    res = run_sweep(sc, "failure_probability", [0.0])
    assert res.points[0].rmse is None
    assert res.points[0].success_count == 0
