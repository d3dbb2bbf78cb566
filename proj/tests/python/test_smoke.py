"""Smoke tests for the python bindings: import, a few solves, error mapping.
The numerical depth lives in the C++ suites; this only checks the surface."""

import math

import pytest

import plapmem


def test_space_and_interpolation():
    s = plapmem.build_space(0.0, 1.0, 8, 1)
    assert s.n_dof == 7
    assert s.h == pytest.approx(0.125)
    u = plapmem.interpolate(lambda x: math.sin(math.pi * x), s)
    assert len(u) == 7
    err = plapmem.l2_error(u, lambda x, t: math.sin(math.pi * x), 0.0, s)
    assert err < 2e-2
    mid = plapmem.evaluate(u, s, 0.5)
    assert mid == pytest.approx(1.0, abs=1e-12)
    xs = s.node_positions()
    assert xs[0] == 0.0 and xs[-1] == 1.0


def test_kernel_and_quadrature():
    k = plapmem.Kernel.exponential(2.0, 3.0)
    assert k.g0 == 3.0
    assert k.g(0.5) == pytest.approx(3.0 * math.exp(-1.0))
    assert k.g_prime(0.0) == pytest.approx(-6.0)

    w = plapmem.quad_weights(2, 0.1)
    assert w.weight_sum() == pytest.approx(0.25)
    assert [e.node for e in w.entries] == [0, 1, 2, 2, 3]


def test_admissibility():
    assert plapmem.check_delta_admissible(plapmem.Kernel.constant(1.0), 1.0) == pytest.approx(
        0.625
    )
    with pytest.raises(plapmem.InadmissibleStepError, match=r"-4/g\(0\)"):
        plapmem.check_delta_admissible(plapmem.Kernel.constant(-2.0), 3.0)


def test_cases_validate():
    case = plapmem.case_MS2(3.0)
    assert case.name == "MS2"
    chk = case.validate(resolution=20000)
    assert chk.max_pde_residual < 1e-13
    assert chk.passes(1e-7)
    gap = abs(case.y(0.3, 0.8) - plapmem.brute_force_y(case, 0.3, 0.8, 20000))
    assert gap < 1e-7

    with pytest.raises(ValueError):
        plapmem.case_MS1(2.0)  # MS1 needs p > 2


def test_solve_case_linear():
    out = plapmem.solve_case(plapmem.case_MS2(2.0), r=1, m=16, n_steps=8)
    assert out["iterations_max"] == 1  # p = 2 is linear
    assert out["err_u"] < 0.05
    assert len(out["x"]) == len(out["u"]) == len(out["y"]) == 17
    assert out["u"][0] == 0.0 and out["u"][-1] == 0.0


def test_solve_case_nonconvergence():
    with pytest.raises(plapmem.NonConvergenceError):
        plapmem.solve_case(plapmem.case_MS2(4.0), r=1, m=8, n_steps=32, max_iter=15)


def test_spatial_study():
    out = plapmem.spatial_study(plapmem.case_MS2(2.0), 1, [4, 8, 16])
    assert out["err_u"][0] > out["err_u"][1] > out["err_u"][2]
    assert 1.7 < out["fitted_order_u"] < 2.3
    assert len(out["eoc_u"]) == 2


def test_temporal_study_threads_match():
    serial = plapmem.temporal_study(plapmem.case_MS2(2.0), 1, 16, [2, 4, 8])
    pooled = plapmem.temporal_study(plapmem.case_MS2(2.0), 1, 16, [2, 4, 8], threads=3)
    assert serial["err_u"] == pooled["err_u"]
    assert serial["err_y"] == pooled["err_y"]
