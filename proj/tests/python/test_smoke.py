import math

import pytest

import eitlab

GAMMA = eitlab.rad(5.75e6)
W_D_353 = 1710426192.6041851


def zeeman(omega_c_hz=1e5, gamma_bc_hz=1.5e3, delta2_hz=0.0):
    return eitlab.LambdaSystem(
        gamma=GAMMA,
        gamma_bc=eitlab.rad(gamma_bc_hz),
        omega_c=eitlab.rad(omega_c_hz),
        delta2=eitlab.rad(delta2_hz),
    )


def test_version_and_helpers():
    assert eitlab.__version__ == "0.1.0"
    assert eitlab.hz(eitlab.rad(123.0)) == pytest.approx(123.0)


def test_weak_signal_coherence_matches_frozen_value():
    s = eitlab.LambdaSystem(
        gamma=GAMMA,
        gamma_bc=eitlab.rad(1.5e3),
        omega_c=eitlab.rad(4e5),
        delta2=eitlab.rad(3e3),
        delta_pump=eitlab.rad(2e5),
    )
    z = eitlab.coherence_per_signal(s)
    assert z.real == pytest.approx(2.8151113609354064e-9, rel=1e-10)
    assert z.imag == pytest.approx(1.5899049123806012e-9, rel=1e-10)
    assert eitlab.extrapolate_weak_signal(s) == pytest.approx(z, rel=1e-6)


def test_populations_sum_to_one():
    s = zeeman(5e5)
    s.omega_b = eitlab.rad(2e4)
    assert sum(eitlab.bloch_populations(s)) == pytest.approx(1.0, abs=1e-12)


def test_doppler_width_and_intercept_ratio():
    w = eitlab.doppler_width(353.15)
    assert w == pytest.approx(W_D_353, rel=1e-12)
    assert eitlab.intercept_ratio(w, GAMMA) == pytest.approx(94.686185511932623, rel=1e-12)


def test_closed_form_and_quadrature_agree():
    s = zeeman(delta2_hz=5e3)
    med = eitlab.MediumConfig(1e17)
    closed = eitlab.average_susceptibility_closed(s, med, W_D_353)
    assert closed.real == pytest.approx(1.2995453061961433e-7, rel=1e-9)
    assert closed.imag == pytest.approx(1.9576192286752445e-5, rel=1e-9)
    prof = eitlab.DopplerProfile(W_D_353, eitlab.ProfileShape.LorentzianApprox)
    numeric = eitlab.average_susceptibility_numeric(s, med, prof)
    assert abs(numeric - closed) / abs(closed) < 1e-6


def test_scan_fwhm_follows_the_law():
    s = zeeman(1e5)
    med = eitlab.MediumConfig(1e17)
    law = eitlab.fwhm_dephasing(s.gamma_bc, s.omega_c, W_D_353, s.gamma())
    scan = eitlab.dephasing_scan(s, med, W_D_353, eitlab.symmetric_grid(5 * law, 401))
    assert len(scan) == 401
    assert eitlab.fwhm_numeric(scan) == pytest.approx(law, rel=1e-3)
    fit = eitlab.fit_lorentzian(scan)
    assert fit.value("fwhm") == pytest.approx(law, rel=1e-6)


def test_linear_fit_recovers_dephasing_rate():
    powers = [1e-4 * (i + 1) for i in range(12)]
    fwhms = [eitlab.rad(3e3) + 3e8 * p for p in powers]
    fit = eitlab.fit_linear(eitlab.LinewidthSeries(powers, fwhms))
    assert fit.model == "linear"
    assert eitlab.hz(fit.value("gamma_bc")) == pytest.approx(1500.0, rel=1e-10)


def test_rabi_round_trip():
    om = eitlab.rabi_from_power(1e-3)
    assert om == pytest.approx(13604075.070151128, rel=1e-12)
    assert eitlab.power_from_rabi(om) == pytest.approx(1e-3, rel=1e-12)


def test_exception_hierarchy():
    assert issubclass(eitlab.NoDip, eitlab.DataError)
    assert issubclass(eitlab.PoleError, eitlab.NumericalError)
    with pytest.raises(eitlab.PoleError):
        eitlab.absorption_coefficient(0.0, zeeman(0.0, 0.0), eitlab.MediumConfig(1e17), W_D_353)
    with pytest.raises(eitlab.ConfigError, match="unknown key"):
        eitlab.parse_config("cell:\n  bogus: 1\n")


def test_config_round_trip():
    cfg = eitlab.RunConfig()
    again = eitlab.parse_config(cfg.to_yaml())
    assert again.to_yaml() == cfg.to_yaml()
    assert again.w_d() == cfg.w_d()


def test_run_command_writes_outputs(tmp_path):
    outputs, manifest, report = eitlab.run_command("simulate-scan", out=tmp_path)
    assert manifest.name == "simulate-scan.manifest.yaml"
    assert any(o.name == "scan.csv" for o in outputs)
    text = (tmp_path / "scan.csv").read_text()
    assert text.startswith("# eitlab-csv v1 scan")
    assert "FWHM" in report or "fwhm" in report

    synth_out, _, _ = eitlab.run_command("synth", out=tmp_path / "s", seed=7, noise=0.0)
    assert (tmp_path / "s" / "synth_scan.csv").exists()
    assert len(synth_out) == 2
