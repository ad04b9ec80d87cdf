import json

import numpy as np
import pytest

from conftest import random_sector_state
from iontrap_parity import (
    ProbeConfig,
    build_space,
    choose_probe_time,
    correlation_operator,
    end_to_end,
    estimate_mean,
    expectation,
    fock_state,
    linearization_bound,
    observable,
    pauli,
    rotate_electronic,
    run_direct_measurement,
    sigma_z_readout,
    spectral_sine_expectation,
    su2_coherent,
)
from iontrap_parity.exceptions import PreconditionError, QubitCouplingError
from iontrap_parity.probe import MeasurementReport, cutoff_population
from iontrap_parity.states import qubit_reference, same_ray, vibrational_amplitudes


def assert_report_consistent(report):
    assert abs(report.sigma_z_readout) <= 1
    assert report.error_bound >= 0
    if not report.cutoff_violated:
        assert abs(report.estimate - report.true_mean) <= report.error_bound


def test_rotation_examples(rng):
    sp = build_space(2, 2)
    rotated = rotate_electronic(fock_state(sp, 0, 0))
    assert expectation(rotated, pauli(sp, "y")) == pytest.approx(-1)
    assert expectation(rotated, pauli(sp, "z")) == pytest.approx(0, abs=1e-15)

    psi = random_sector_state(rng, sp, 3)
    rotated = rotate_electronic(psi)
    assert same_ray(rotated, qubit_reference(psi, "minus_y"))
    amps = vibrational_amplitudes(rotated)
    marginal = np.sqrt(np.sum(np.abs(amps) ** 2, axis=2)).ravel()
    original = np.abs(vibrational_amplitudes(psi)[:, :, 0]).ravel()
    np.testing.assert_allclose(marginal, original, atol=1e-15)

    with pytest.raises(PreconditionError):
        rotate_electronic(fock_state(sp, 0, 0, "excited"))


def test_readout_examples():
    sp = build_space(6, 6)
    C = correlation_operator(sp)
    assert sigma_z_readout(su2_coherent(sp, 4), C, 1e4, 0.0) == 0
    for N in (1, 3, 4, 6):
        space = build_space(N, N)
        for t in (1e-6, 3e-5, 2e-4):
            r = sigma_z_readout(su2_coherent(space, N), correlation_operator(space), 1e4, t)
            # sign lock: -sin, never +sin
            assert r == pytest.approx(-np.sin(2 * 1e4 * t * N), abs=1e-12)
            if 2 * 1e4 * t * N < np.pi:
                assert r < 0
    for t in (1e-5, 3e-4, 0.01):
        assert sigma_z_readout(fock_state(build_space(1, 1), 1, 0), correlation_operator(build_space(1, 1)),
                               1e4, t) == pytest.approx(0, abs=1e-12)


def test_readout_identity_general_observables(rng):
    sp = build_space(4, 4)
    psi = random_sector_state(rng, sp, 3)
    for kind, mode in (("total_number", None), ("angular_momentum_z", None),
                       ("correlation_squared", None), ("number", "y")):
        obs = observable(sp, kind, mode)
        for gamma, t in ((1e4, 3e-6), (2.5e3, 1.7e-4)):
            full = sigma_z_readout(psi, obs, gamma, t)
            assert full == pytest.approx(-spectral_sine_expectation(psi, obs, 2 * gamma * t), abs=1e-10)


def test_readout_rejects_qubit_observable():
    sp = build_space(1, 1)
    with pytest.raises(QubitCouplingError):
        sigma_z_readout(fock_state(sp, 0, 0), pauli(sp, "z"), 1e4, 1e-6)


def test_estimate_mean_examples():
    assert estimate_mean(0.0, 1e4, 3e-6) == 0
    assert estimate_mean(-0.2, 0.5, 0.01) == pytest.approx(20)
    with pytest.raises(ValueError):
        estimate_mean(0.1, 1e4, 0)
    gamma, t = 1e4, 5e-7
    for c in (1, 7, 20, 30):
        x = 2 * gamma * t
        est = estimate_mean(-np.sin(x * c), gamma, t)
        assert abs(est - c) <= c * (x * c) ** 2 / 6


def test_choose_probe_time_examples():
    assert choose_probe_time(1e4, 30, 0.4) == pytest.approx(6.666666666666667e-07, rel=1e-12)
    assert choose_probe_time(1e4, 30, 0.3) == pytest.approx(5.0e-7, rel=1e-12)
    assert choose_probe_time(2e4, 30, 0.4) == pytest.approx(choose_probe_time(1e4, 30, 0.4) / 2)
    for bad in ((0, 30, 0.4), (1e4, 0, 0.4), (1e4, 30, 0)):
        with pytest.raises(ValueError):
            choose_probe_time(*bad)


def test_probe_time_monotone():
    gammas = np.geomspace(1e2, 1e6, 9)
    ts = [choose_probe_time(g, 30, 0.4) for g in gammas]
    assert np.all(np.diff(ts) < 0)
    ts = [choose_probe_time(1e4, c, 0.4) for c in (1, 5, 10, 30, 100)]
    assert np.all(np.diff(ts) < 0)


def test_linearization_bound_examples():
    assert linearization_bound(1e4, 0.0, 30) == 0
    x = 0.4 / 30
    assert linearization_bound(x / 2, 1.0, 30) == pytest.approx(0.8)
    for x_max in (0.1, 0.3, 0.4):
        t = choose_probe_time(1e4, 30, x_max)
        assert linearization_bound(1e4, t, 30) <= x_max ** 2 * 30 / 6 * (1 + 1e-12)


def test_run_direct_measurement_examples():
    sp = build_space(20, 20)
    r = run_direct_measurement(su2_coherent(sp, 20), correlation_operator(sp))
    assert abs(r.estimate - 20) <= 0.8
    assert not r.cutoff_violated and r.error_bound == pytest.approx(0.8)
    assert_report_consistent(r)

    sp = build_space(3, 3)
    r = run_direct_measurement(fock_state(sp, 2, 1), observable(sp, "total_number"))
    assert r.true_mean == pytest.approx(3)
    assert_report_consistent(r)

    r = run_direct_measurement(fock_state(sp, 0, 0), correlation_operator(sp))
    assert r.estimate == 0 and r.sigma_z_readout == 0 and r.true_mean == 0


def test_cutoff_violation_flag():
    sp = build_space(31, 31)
    psi = su2_coherent(sp, 31)
    C = correlation_operator(sp)
    assert cutoff_population(psi, C, 30) == pytest.approx(1.0)
    r = run_direct_measurement(psi, C, ProbeConfig())
    assert r.cutoff_violated


def test_probe_config_validation_and_fixed_time():
    assert ProbeConfig().probe_time() == pytest.approx(6.6666666667e-7)
    assert ProbeConfig(t=1e-6).probe_time() == 1e-6
    for bad in (dict(gamma=0), dict(c_max=-1), dict(x_max=2.0), dict(t="soon"), dict(t=-1.0)):
        with pytest.raises(ValueError):
            ProbeConfig(**bad)


def test_report_json_field_names():
    r = MeasurementReport(1.0, 1.1, -0.01, 6e-7, 0.8, False)
    data = json.loads(r.to_json())
    assert list(data) == ["estimate", "true_mean", "sigma_z_readout", "probe_time",
                          "error_bound", "cutoff_violated"]
    assert data["cutoff_violated"] is False


def test_end_to_end_at_origin_and_small_case():
    report, record = end_to_end(6, 1.0, 0.0)
    assert report.true_mean == pytest.approx(6, abs=1e-12)
    assert record["ground_probability"] == pytest.approx(1.0)
    assert_report_consistent(report)
    report, record = end_to_end(6, 2.0, 1.3)
    assert_report_consistent(report)
    assert 0 < record["ground_probability"] < 1
