import math

import pytest

gmrf = pytest.importorskip("gmrf_cftp")


def test_gamma_values():
    assert gmrf.gamma_truncated(0.0, 2.0) == 1.0
    assert gmrf.gamma_truncated(0.2, 2.0) == pytest.approx(0.7179927077774129, abs=1e-10)


def test_covariance_closed_form():
    eps = 0.2
    g = 1 / math.sqrt(1 - eps * eps)
    rho = (1 - math.sqrt(1 - eps * eps)) / eps
    assert gmrf.covariance(eps, 1, [0], [2]) == pytest.approx(g * rho**2, abs=1e-12)


def test_truncated_sample_is_deterministic():
    a = gmrf.sample_truncated(3, 0.2, 2.0, [0])
    b = gmrf.sample_truncated(3, 0.2, 2.0, [0])
    assert a["status"] == "ok"
    assert a["value"] == b["value"]
    assert -2.0 <= a["value"] <= 2.0


def test_gaussian_and_l_dependent():
    g = gmrf.sample_gaussian(5, 0.05, 0.08, 4.0)
    assert g["status"] == "ok"
    y = gmrf.sample_l_dependent(5, 0.05, 0.08, 4.0, 8)
    assert math.isfinite(y)


def test_coupler_coalesces():
    c = gmrf.FlatCoupler(0.2, 2.0)
    u = 0.5 * c.gamma
    assert c.update([1.0, -2.0], u) == c.update([0.0, 2.0], u) == c.common_value(u)


def test_check_and_duality():
    assert gmrf.check(1, 0.05, 1e-3, 20.0)
    assert not gmrf.check(1, 0.05, 1.0, 20.0)
    r = gmrf.duality_check_binary(8, -3.0, 0.8, 10000, 1)
    assert r["passes"]
    assert r["pathwise_violations"] == 0


def test_cli_round_trip(tmp_path):
    code, out, _ = gmrf.run_cli(["--cmd", "validate", "--only", "1", "--out", str(tmp_path)])
    assert code == 0
    assert '"passes": true' in out
