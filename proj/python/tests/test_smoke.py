import math

import numpy as np
import pytest

import sbsim

BASE = """
[domain]
dimension = 2
resolution = 16
[physics]
viscosity = 0.5
epsilon = {eps}
[time]
dt = 0.01
t_end = 0.2
[noise]
kind = additive
max_wavenumber = 2
[initial]
velocity = random
velocity_amplitude = 0.8
temperature = sin_x1
"""


def config(eps=0.1, extra=""):
    return sbsim.parse_config_string(BASE.format(eps=eps) + extra)


def sin_field(n, k=1, axis=0):
    x = sbsim.Grid(2, n).coordinates()
    return np.sin(k * x[axis])


def test_version_and_grid():
    assert sbsim.__version__
    g = sbsim.Grid(2, 8)
    x, y = g.coordinates()
    assert x.shape == (8, 8)
    assert x[0, 0] == pytest.approx(-math.pi)
    assert x[1, 0] - x[0, 0] == pytest.approx(g.spacing)
    assert np.all(y[:, 0] == y[0, 0])


def test_leray_removes_gradients():
    x, y = sbsim.Grid(2, 32).coordinates()
    grad = np.stack([np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)])
    assert np.max(np.abs(sbsim.leray_project(grad))) < 1e-13
    sol = np.stack([np.sin(y), np.zeros_like(x)])
    assert np.max(np.abs(sbsim.leray_project(sol) - sol)) < 1e-14
    assert np.max(np.abs(sbsim.divergence(sol))) < 1e-14


def test_curl_biot_savart_roundtrip():
    x, y = sbsim.Grid(2, 32).coordinates()
    w = np.sin(2 * x) * np.cos(y) + 0.3 * np.cos(3 * y)
    assert np.max(np.abs(sbsim.curl_2d(sbsim.biot_savart(w)) - w)) < 1e-12


def test_mollifier_and_norms():
    f = sin_field(32)
    assert np.max(np.abs(sbsim.mollify(f, 1.0) - math.exp(-1.0) * f)) < 1e-14
    assert sbsim.sobolev_norm(f, 0) == pytest.approx(math.sqrt(0.5))
    assert sbsim.sobolev_norm(np.stack([f, f]), 0, vector=True) == pytest.approx(1.0)
    assert sbsim.lp_norm(f, math.inf) == pytest.approx(1.0, rel=1e-2)
    assert sbsim.smoothing_gain_bound(1.0) == pytest.approx(1.0)
    assert sbsim.cutoff(0.5, 1.0) == 1.0 and sbsim.cutoff(2.0, 1.0) == 0.0
    with pytest.raises(sbsim.ValidationError):
        sbsim.mollify(f, 0.0)


def test_config_errors_name_the_key():
    with pytest.raises(ValueError, match=r"\[physics\]\.cutoff_R"):
        sbsim.parse_config_string(BASE.format(eps=0.1).replace("viscosity = 0.5", "viscosity = 0.5\ncutoff_R = -1"))
    with pytest.raises(sbsim.ValidationError, match="unknown"):
        config(extra="[output]\ncolour = red\n")


def test_simulate_is_reproducible_and_records_columns():
    cfg = config()
    a = sbsim.simulate(cfg, seed=3)
    b = sbsim.simulate(cfg, seed=3)
    c = sbsim.simulate(cfg, seed=4)
    ts = a["timeseries"]
    assert list(ts)[:3] == ["t", "l2_u", "hs_u"]
    assert len(ts["t"]) == 21
    assert ts["t"][-1] == pytest.approx(0.2)
    assert a["stop_reason"] == "t_end" and not a["blew_up"]
    assert np.array_equal(a["final"]["u"], b["final"]["u"])
    assert not np.array_equal(a["final"]["u"], c["final"]["u"])
    assert np.max(np.abs(sbsim.divergence(a["final"]["u"]))) < 1e-10


def test_skeleton_with_zero_control_matches_noiseless_simulate():
    cfg = config(eps=0.0)
    sim = sbsim.simulate(cfg, seed=1)
    sk = sbsim.skeleton(cfg, "t,mode,value\n0,0,0\n")
    assert np.array_equal(sim["final"]["u"], sk["final"]["u"])
    assert np.array_equal(sim["final"]["theta"], sk["final"]["theta"])


def test_blow_up_is_reported():
    cfg = sbsim.parse_config_string(
        """
[domain]
dimension = 2
resolution = 16
[physics]
viscosity = 0.001
epsilon = 0
advection = spectral_rk2
[time]
dt = 0.5
t_end = 50
blowup_limit = 1e6
[initial]
velocity = taylor_green
velocity_amplitude = 50
temperature = random
temperature_amplitude = 50
[output]
diagnostics = light
"""
    )
    rec = sbsim.simulate(cfg)
    assert rec["blew_up"]
    assert rec["stop_reason"] != "t_end"


def test_snapshot_roundtrip(tmp_path):
    x, y = sbsim.Grid(2, 64).coordinates()
    u = np.stack([np.sin(y), np.zeros_like(x)])
    theta = np.cos(x)
    path = tmp_path / "s.bqsf"
    sbsim.write_snapshot(str(path), u, theta, 0.25)
    assert path.stat().st_size == 98336
    back = sbsim.read_snapshot(str(path))
    assert back["t"] == 0.25
    assert np.max(np.abs(back["u"] - u)) < 1e-14
    assert np.max(np.abs(back["theta"] - theta)) < 1e-14
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(sbsim.IoError):
        sbsim.read_snapshot(str(path))


def test_ensemble_summary():
    out = sbsim.ensemble(config(), 4, seed=2)
    assert out["n_paths"] == 4 and out["blown_up"] == 0
    for f in out["functionals"].values():
        assert len(f["values"]) == 4
        assert f["mean"] == pytest.approx(np.mean(f["values"]))


TOY = """
[domain]
dimension = 2
resolution = 8
[physics]
epsilon = 0
nonlinear = false
[time]
dt = 0.01
t_end = 1
[noise]
kind = additive
modes = 1,0,cos,1.0
directions = 0,1
[output]
diagnostics = none
[ldp]
threshold = 0.2
epsilons = 0.04, 0.02
paths = 200
restarts = 1
"""


def test_linear_oracle_and_rare_event():
    o = sbsim.LinearModeOracle(1.0, 1.0, 1.0)
    v = (1 - math.exp(-2)) / 2
    assert o.variance() == pytest.approx(v)
    assert o.minimal_cost(0.2) == pytest.approx(0.04 / (2 * v))
    cfg = sbsim.parse_config_string(TOY)
    est = sbsim.rare_event(cfg, 0.04, 2000, seed=7)
    assert est["ci_low"] <= est["p_hat"] <= est["ci_high"]
    exact = 0.5 * math.erfc(0.2 / math.sqrt(2 * 0.04 * v))
    assert abs(est["p_hat"] - exact) < 4 * math.sqrt(exact * (1 - exact) / 2000)
    assert sbsim.control_cost("0,0,1\n", cfg) == pytest.approx(0.5)


def test_minimize_cost_and_varadhan_rows():
    cfg = sbsim.parse_config_string(TOY)
    r = sbsim.minimize_cost(cfg)
    assert r["feasible"]
    oracle = sbsim.LinearModeOracle().minimal_cost(0.2)
    assert oracle <= r["cost"] <= 1.05 * oracle
    rows, _ = sbsim.varadhan_table(cfg)
    assert [row["epsilon"] for row in rows] == [0.04, 0.02]
    assert all(row["n_paths"] == 200 for row in rows)


def test_small_noise_scaling_helpers():
    cfg = sbsim.parse_config_string(TOY)
    a, _ = sbsim.small_noise_distance(cfg, 1e-2, 20, seed=1)
    b, _ = sbsim.small_noise_distance(cfg, 1e-4, 20, seed=1)
    assert sbsim.loglog_slope([1e-2, 1e-4], [a, b]) == pytest.approx(0.5, abs=1e-9)


def test_counter_rng_is_pure():
    assert sbsim.normal(1, 2, 3, 4) == sbsim.normal(1, 2, 3, 4)
    assert sbsim.normal(1, 2, 3, 4) != sbsim.normal(1, 2, 3, 5)
