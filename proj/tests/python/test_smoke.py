import cmath
import math

import pytest


E = math.e


def test_version(wb):
    assert wb.__version__


def test_params_and_validation(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    assert p.nu == pytest.approx(math.pi / 2)
    assert p.mu == pytest.approx(0.5)
    assert p.total_winding() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        wb.make_params(1.0, 0.9, 20.0, 4)
    with pytest.raises(ValueError):
        wb.make_params(1.0, E, 1.0, 4)


def test_defining_function_signs(wb):
    p = wb.make_params(1.0, E, 20.0, 3)
    inside = wb.CPoint(1.0, [0.0], 1.0)
    assert wb.defining_function(inside, p) == pytest.approx(-1.0)
    boundary = wb.CPoint(0.0, [0.0], 1.0)
    assert abs(wb.defining_function(boundary, p)) < 1e-14
    assert wb.sigma(-1.0, 5.0) == 0.0
    assert wb.sigma(1.0, 1.0) == pytest.approx(math.exp(-1.0))


def test_levi_at_weak_point(wb):
    p = wb.make_params(1.0, E, 20.0, 3)
    rep = wb.tangential_levi_min_eig(wb.CPoint(0.0, [0.0], 1.4), p)
    assert abs(rep["min_tangential_eigenvalue"]) < 1e-10
    assert rep["tangent_dimension"] == 2


def test_sum_eval_exact(wb):
    lhs, rhs = wb.sum_eval(2, (1, 1), (1, 1))
    assert lhs == rhs == "-8/3"


def test_cnj_constant(wb):
    assert wb.cnj_constant(3, [0]) == pytest.approx(math.pi**2, rel=1e-12)
    assert wb.cnj_constant(4, [1, 0]) == pytest.approx(math.pi**3 / 6, rel=1e-12)


def test_pole_list(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    mode = wb.zero_mode(4, -2)
    found = wb.poles_predicted(mode, p, wb.Rect(-3, 3, -3, 3))
    assert len(found) == 6
    locs = sorted((q["location"].real, round(q["location"].imag, 6)) for q in found)
    assert (0.0, 2.0) in locs and (0.0, -3.0) in locs
    refined = wb.poles_numeric(mode, p, wb.Rect(-3, 3, -3, 3))
    assert all(q["abs_g"] < 1e-10 for q in refined)


def test_kernel_hermitian(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    mode = wb.zero_mode(4, -2)
    z, w = 0.3 + 1.1j, -0.4 + 0.8j
    kzw, err = wb.strip_kernel_quadrature(z, w, mode, p)
    kwz, _ = wb.strip_kernel_quadrature(w, z, mode, p)
    assert err < 1e-10
    assert abs(kzw - kwz.conjugate()) < 1e-10


def test_residue_series(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    ex = wb.residue_series(wb.zero_mode(4, -2), p)
    assert ex["discrete_terms"] == []
    assert ex["winding_exponent"] == pytest.approx(p.nu - 1j * p.mu)


def test_threshold(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    t = wb.threshold_and_range(2.0, p)
    assert t["s_star"] == pytest.approx(math.pi / 2)
    pmin, pmax = t["lp_range"]
    assert pmax == pytest.approx(1.0 / (0.5 - math.pi / 8), rel=1e-12)


def test_reproducing_quick(wb):
    p = wb.make_params(1.0, E, 20.0, 4)
    err = wb.reproducing_check(0.0, 1.0, 1.0 + 1.0j, wb.zero_mode(4, -2), p)
    assert err < 1e-3


def test_scaling_residual(wb):
    p = wb.make_params(1.0, E, 20.0, 3)
    z = wb.CPoint(0.8 - 0.3j, [0.2 + 0.1j], 1.5 + 0.4j)
    for lam in (1.0, 10.0):
        r_lam, r_inf = wb.scaled_defining(lam, z, p)
        assert r_lam - r_inf == pytest.approx(abs(z.z1) ** 2 / (4 * lam * lam), abs=1e-13)


def test_scan_and_cli(wb, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code = wb.run_cli(["poles", "--n", "4", "--out", "pl"])
    assert code == 0
    assert (tmp_path / "pl.csv").exists()
    assert wb.run_cli(["poles", "--beta", "0.5"]) == 1
