import io

import numpy as np
import pytest

from spinnet.fitting import fit_envelope, fit_power_law
from spinnet.runner import (AveragedSeries, ExperimentConfig, SweepRow,
                            envelope_from_series, read_sweep_csv,
                            run_experiment, run_sweep, sweep_to_csv,
                            units_for_qubits)

TWO_QUBIT = ExperimentConfig(unit="stick", config="chain", n_units=1,
                             j0=100.0, sigma=0.0, n_realizations=1,
                             t_max=0.5, master_seed=1)


def test_two_qubit_noiseless_analytic():
    series = run_experiment(TWO_QUBIT, workers=1)
    expected = np.cos(2 * 100.0 * series.times) ** 2
    assert np.max(np.abs(series.p_mean - expected)) < 1e-10
    assert np.all(series.p_stderr == 0.0)


def test_determinism_bit_identical():
    cfg = ExperimentConfig(unit="node", config="chain", n_units=3, sigma=0.5,
                           n_realizations=20, t_max=0.1, master_seed=33)
    a = run_experiment(cfg, workers=1)
    b = run_experiment(cfg, workers=1)
    assert np.array_equal(a.p_mean, b.p_mean)
    assert np.array_equal(a.p_stderr, b.p_stderr)


def test_worker_count_invariance():
    cfg = ExperimentConfig(unit="node", config="chain", n_units=4, sigma=0.5,
                           n_realizations=120, t_max=0.05, master_seed=7)
    serial = run_experiment(cfg, workers=1)
    parallel = run_experiment(cfg, workers=2)
    assert np.array_equal(serial.p_mean, parallel.p_mean)
    assert np.array_equal(serial.p_stderr, parallel.p_stderr)


def test_sector_transparency():
    cfg = ExperimentConfig(unit="node", config="ring", n_units=5, sigma=0.5,
                           n_realizations=10, t_max=0.2, master_seed=11)
    with_sector = run_experiment(cfg, workers=1, use_sector=True)
    without = run_experiment(cfg, workers=1, use_sector=False)
    assert np.max(np.abs(with_sector.p_mean - without.p_mean)) < 1e-9


def test_stderr_scales_as_sqrt_n():
    base = ExperimentConfig(unit="stick", config="chain", n_units=1, sigma=0.5,
                            n_realizations=1000, t_max=0.8, master_seed=5)
    big = ExperimentConfig(unit="stick", config="chain", n_units=1, sigma=0.5,
                           n_realizations=4000, t_max=0.8, master_seed=5)
    s1 = run_experiment(base, workers=1)
    s2 = run_experiment(big, workers=1)
    mid = (s1.times > 0.3) & (s1.times < 0.6)  # mid-decay region
    ratio = np.mean(s1.p_stderr[mid] / s2.p_stderr[mid])
    assert ratio == pytest.approx(2.0, rel=0.15)


def test_ghz_stationarity():
    for unit, config, n in [("node", "ring", 5), ("stick", "chain", 3),
                            ("triangle", "ring", 3)]:
        cfg = ExperimentConfig(unit=unit, config=config, n_units=n, sigma=0.5,
                               initial_state="ghz", n_realizations=5,
                               t_max=0.3, master_seed=3)
        series = run_experiment(cfg, workers=1)
        assert np.max(np.abs(series.p_mean - 1.0)) < 1e-9


def test_entropy_output():
    cfg = ExperimentConfig(unit="node", config="chain", n_units=4, sigma=0.5,
                           n_realizations=8, t_max=0.3, master_seed=13,
                           outputs=("P", "S"))
    series = run_experiment(cfg, workers=1)
    assert series.has_entropy
    assert series.s_mean[0] == pytest.approx(0.0, abs=1e-10)  # product start
    assert np.all(series.s_mean >= -1e-12)
    assert np.all(series.s_mean <= 2 * np.log(2) + 1e-9)  # half-cut of L=4


def test_zeeman_invariance_in_sector():
    # uniform Zeeman only adds a global phase for fixed-magnetization states
    base = ExperimentConfig(unit="node", config="ring", n_units=4, sigma=0.4,
                            n_realizations=10, t_max=0.2, master_seed=17)
    zee = ExperimentConfig(unit="node", config="ring", n_units=4, sigma=0.4,
                           e_z=10.0, n_realizations=10, t_max=0.2, master_seed=17)
    a = run_experiment(base, workers=1)
    b = run_experiment(zee, workers=1)
    assert np.max(np.abs(a.p_mean - b.p_mean)) < 1e-10


def test_dynamic_noise_runs():
    cfg = ExperimentConfig(unit="node", config="chain", n_units=3, sigma=0.5,
                           noise_kind="dynamic", alpha_noise=2.0,
                           n_realizations=4, t_max=0.1, master_seed=19)
    series = run_experiment(cfg, workers=1)
    assert series.p_mean[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(series.p_mean <= 1.0 + 1e-12)
    again = run_experiment(cfg, workers=1)
    assert np.array_equal(series.p_mean, again.p_mean)


def test_config_validation():
    with pytest.raises(ValueError, match="ring requires"):
        ExperimentConfig(unit="stick", config="ring", n_units=2).validate()
    with pytest.raises(ValueError, match="n_realizations"):
        ExperimentConfig(n_realizations=0).validate()
    with pytest.raises(ValueError, match="undersamples"):
        ExperimentConfig(dt=0.01).validate()
    with pytest.raises(ValueError, match="outputs"):
        ExperimentConfig(outputs=("S",)).validate()
    with pytest.raises(ValueError, match="alpha"):
        ExperimentConfig(noise_kind="dynamic", alpha_noise=None).validate()
    with pytest.raises(ValueError, match="initial_state"):
        ExperimentConfig(initial_state="bell").validate()


def test_config_json_round_trip_and_unknown_keys():
    cfg = ExperimentConfig(unit="stick", config="ring", n_units=3,
                           partition=(0, 1), outputs=("P", "S"), t_max=1.0)
    d = cfg.to_json_dict()
    assert d["partition"] == [0, 1]
    assert ExperimentConfig.from_json_dict(d) == cfg
    d["typo_key"] = 1
    with pytest.raises(ValueError, match="typo_key"):
        ExperimentConfig.from_json_dict(d)


def test_series_csv_round_trip():
    cfg = ExperimentConfig(unit="stick", config="chain", n_units=1, sigma=0.2,
                           n_realizations=5, t_max=0.05, master_seed=2,
                           outputs=("P", "S"))
    series = run_experiment(cfg, workers=1)
    buf = io.StringIO()
    series.to_csv(buf)
    buf.seek(0)
    back = AveragedSeries.from_csv(buf, n_realizations=5)
    assert np.allclose(back.times, series.times, atol=1e-15)
    assert np.allclose(back.p_mean, series.p_mean, rtol=1e-10)
    assert np.allclose(back.s_mean, series.s_mean, rtol=1e-10, atol=1e-12)


def test_units_for_qubits():
    assert units_for_qubits("node", 7) == 7
    assert units_for_qubits("stick", 8) == 4
    assert units_for_qubits("triangle", 9) == 3
    assert units_for_qubits("triangle", 7, "shared") == 7
    with pytest.raises(ValueError, match="multiple"):
        units_for_qubits("stick", 7)


def test_sweep_single_cell_matches_manual():
    template = ExperimentConfig(unit="stick", config="chain", n_units=1,
                                sigma=0.5, n_realizations=60, t_max=1.2,
                                master_seed=23)
    rows = run_sweep(template, {"L": [2]}, workers=1)
    assert len(rows) == 1 and rows[0].completed
    series = run_experiment(template, workers=1)
    manual = fit_envelope(envelope_from_series(series))
    assert rows[0].fit.t2 == pytest.approx(manual.t2, rel=1e-12)


def test_sweep_skips_infeasible_cells():
    template = ExperimentConfig(unit="stick", config="ring", n_units=3,
                                sigma=0.5, n_realizations=10, t_max=0.3,
                                master_seed=29)
    rows = run_sweep(template, {"L": [4, 6, 7]}, workers=1)
    by_L = {r.L: r for r in rows}
    assert not by_L[4].completed and "ring requires" in by_L[4].reason
    assert not by_L[7].completed and "multiple" in by_L[7].reason
    assert by_L[6].completed


def test_sweep_all_invalid_rejected():
    template = ExperimentConfig(unit="stick", config="ring", n_units=3,
                                n_realizations=2, t_max=0.05)
    with pytest.raises(ValueError, match="all sweep cells"):
        run_sweep(template, {"L": [3, 4]}, workers=1)


def test_sweep_csv_round_trip():
    rows = [SweepRow(unit="node", config="ring", L=4, sigma=0.5, alpha_noise=None,
                     fit=fit_envelope_from_synthetic()),
            SweepRow(unit="node", config="ring", L=5, sigma=0.5, alpha_noise=2.0,
                     fit=None, reason="skipped")]
    buf = io.StringIO()
    sweep_to_csv(rows, buf)
    buf.seek(0)
    parsed = read_sweep_csv(buf)
    assert len(parsed) == 1
    assert parsed[0]["unit"] == "node" and parsed[0]["L"] == 4
    assert parsed[0]["alpha_noise"] is None
    assert parsed[0]["converged"] is True
    assert parsed[0]["T2"] == pytest.approx(0.489, rel=1e-6)


def fit_envelope_from_synthetic():
    from spinnet.fitting import EnvelopePoints
    t = np.linspace(0, 2, 30)
    y = 0.5 + 0.5 * np.exp(-((t / 0.489) ** 2))
    return fit_envelope(EnvelopePoints(t=t, value=y, side="upper"))


def test_power_law_on_synthetic_sweep():
    fits = [(L, 2.95 * L ** -1.197) for L in (4, 6, 8, 10)]
    pl = fit_power_law(fits)
    assert pl.gamma == pytest.approx(1.197, abs=1e-10)
