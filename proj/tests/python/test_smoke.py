import json
import math

import numpy as np
import pytest

import fracshe


def test_constants():
    c = fracshe.constants(1.5, 0.5, 1)
    assert c["c_agd"] == pytest.approx(2 ** -0.5, abs=1e-9)
    assert c["c14"] == pytest.approx(0.5, abs=1e-9)
    assert c["hurst"] == 0.5


def test_parameter_errors_map_to_value_error():
    with pytest.raises(ValueError):
        fracshe.constants(0.5, 0.5, 1)
    with pytest.raises(fracshe.ParameterDomainError):
        fracshe.c_alpha_gamma_d(1.5, 1.5, 1)


def test_gaussian_kernel():
    # wide enough box that periodic images are below 1e-20
    x = fracshe.coordinates(32.0, 1024)
    g = fracshe.green_kernel(2.0, 1.0, dim=1, n=1024, extent=32.0)
    assert g.shape == (1024,)
    closed = np.exp(-x ** 2 / 4) / math.sqrt(4 * math.pi)
    assert np.max(np.abs(g - closed)) < 1e-8
    assert g.sum() * (32.0 / 1024) == pytest.approx(1.0, abs=1e-10)


def test_two_dimensional_arrays():
    w = fracshe.sample_noise(1.5, 1.0, 2, 32, 4.0, 0.01, seed=3)
    assert w.shape == (32, 32)
    again = fracshe.sample_noise(1.5, 1.0, 2, 32, 4.0, 0.01, seed=3)
    assert np.array_equal(w, again)


def test_brownian_quadratic_variation():
    b = fracshe.fbm_path(4096, 0.5, seed=2)
    assert b[0] == 0.0
    assert fracshe.q_variation(b, 2.0) == pytest.approx(1.0, abs=0.05)


def test_simulate_records():
    out = fracshe.simulate(1.5, 0.5, 1, 64, 8.0, 1 / 64, 0.5, record_times=[0.25, 0.5])
    assert [t for t, _ in out] == [0.25, 0.5]
    assert out[1][1].shape == (64,)
    sine = json.dumps({"kind": "sine", "offset": 1.0, "amplitude": 0.5, "frequency": 1.0})
    nl = fracshe.simulate(1.5, 0.5, 1, 64, 8.0, 1 / 64, 0.5, diffusion=sine)
    assert np.all(np.isfinite(nl[0][1]))


def test_variance_oracle():
    disc = fracshe.linear_variance(1.5, 0.5, 1, 1024, 16.0, 1 / 512, 1.0)
    assert disc == pytest.approx(fracshe.continuum_variance(1.5, 0.5, 1, 1.0), rel=0.02)


def test_ks_critical_value():
    assert fracshe.ks_critical_value(10, 0.05) == pytest.approx(0.4092460847775048, abs=1e-8)


def test_config_resolution_and_rejection():
    cfg = fracshe.resolve({"experiments": ["constants"]})
    assert cfg["grid"]["n"] == 1024
    with pytest.raises(fracshe.ConfigurationError):
        fracshe.resolve({"experiments": ["constants"], "bogus": 1})


def test_execute_constants():
    out = fracshe.execute({"experiments": ["constants"]})
    assert out["constants"]["pass"]
    assert out["constants"]["metrics"]["c14"] == pytest.approx(0.5)


def test_run_and_replay(tmp_path):
    cfg = {
        "experiments": ["simulate"],
        "grid": {"extent": 8.0, "n": 64},
        "solver": {"dt": 0.0625, "t_end": 0.5, "record_times": [0.5]},
        "probe": {"t": 0.5, "holder_time_steps": []},
        "ensemble": {"members": 3, "seed": 4},
        "output_dir": str(tmp_path),
    }
    rec = fracshe.run(cfg)
    assert rec["passed"]
    assert (tmp_path / rec["run_id"] / "manifest.json").exists()
    rep = fracshe.replay(rec["run_id"], str(tmp_path), threads=2)
    assert rep["replay_match"]
