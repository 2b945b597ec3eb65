import os
import subprocess
import sys

import numpy as np
import pytest

from supersol import _accel, kernels


def _extremal_prm(q=0.5, p=0.0, N=3):
    kap = (2 - p) / (1 - p)
    alpha = (1 - p) / (2 - p) * (N + p / (1 - p)) ** (-1 / (1 - p))
    return np.array([kernels.F_POWER, q, 0.0, p, kap, alpha, 1.0])


def _solve(fn, kind, prm, y0, t_eval, stop=-1):
    return fn(kind, prm, float(t_eval[0]), np.asarray(y0, float), np.asarray(t_eval, float),
              1e-12, 1e-15, 2_000_000, stop, 1e12)


def test_fd_stencil_backends_agree():
    rng = np.random.default_rng(3)
    for shape in [(9, 9), (7, 8, 9), (5, 5, 5, 5)]:
        u = rng.normal(size=shape)
        l1, g1 = kernels.fd_lap_grad(u, 0.1, use_numba=True)
        l2, g2 = kernels.fd_lap_grad(u, 0.1, use_numba=False)
        assert np.array_equal(np.isnan(l1), np.isnan(l2))
        m = ~np.isnan(l1)
        assert np.allclose(l1[m], l2[m], rtol=1e-12, atol=1e-12)
        assert np.allclose(g1[m], g2[m], rtol=1e-12, atol=1e-12)


def test_fd_stencil_exact_on_quadratics():
    h = 0.05
    ax = np.arange(11) * h
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    u = 3 * X**2 - Y**2 + 0.5 * Z**2 + X * Y + 2 * Z
    lap, grad = kernels.fd_lap_grad(u, h)
    core = (slice(1, -1),) * 3
    assert np.allclose(lap[core], 6 - 2 + 1, atol=1e-9)
    exact = np.sqrt((6 * X + Y) ** 2 + (-2 * Y + X) ** 2 + (Z + 2) ** 2)
    assert np.allclose(grad[core], exact[core], atol=1e-12)
    assert np.all(np.isnan(lap[0]))


def test_fd_needs_three_nodes():
    with pytest.raises(ValueError):
        kernels.fd_lap_grad(np.zeros((2, 5)), 0.1)


def test_dopri_compiled_and_python_agree():
    t = np.linspace(0.0, 7.0, 71)
    a = _solve(kernels.dopri_solve, kernels.KIND_EXTREMAL, _extremal_prm(), [9.0], t, stop=0)
    b = _solve(kernels.dopri_solve.py_func, kernels.KIND_EXTREMAL, _extremal_prm(), [9.0], t, stop=0)
    assert a[1] == b[1] and a[5] == b[5] == kernels.STATUS_STOPPED
    assert np.allclose(a[0], b[0], rtol=1e-13, atol=1e-14)
    assert abs(a[2] - b[2]) < 1e-12


def test_dopri_lands_on_output_points():
    # u'' + 2u'/r = -6 has the regular solution 5 - r^2
    t = np.linspace(0.0, 2.0, 9)
    prm = np.array([kernels.F_POWER, 1.0, 0.0, 0.0, 3.0, kernels.W_CONSTANT, 1.0, 6.0, 0.0])
    ys, n, _, _, _, status = _solve(kernels.dopri_solve, kernels.KIND_RADIAL, prm, [5.0, 0.0], t)
    assert status == kernels.STATUS_OK and n == t.size
    assert np.allclose(ys[:, 0], 5 - t**2, atol=1e-12)
    assert np.allclose(ys[:, 1], -2 * t, atol=1e-12)


def test_dopri_zero_crossing():
    t = np.linspace(0.0, 7.0, 8)
    ys, n, t_stop, *_ = _solve(kernels.dopri_solve, kernels.KIND_EXTREMAL, _extremal_prm(), [9.0], t, stop=0)
    assert abs(t_stop - 6.0) < 1e-6
    assert n == 7  # radii 0..6 filled, 7 lies past the zero
    assert np.allclose(ys[:n, 0], (3 - t[:n] ** 2 / 12) ** 2, atol=1e-8)


def test_dopri_blowup_status():
    # a huge negative source drives |u| past the blow-up cap
    t = np.linspace(0.0, 1e3, 5)
    prm = np.array([kernels.F_POWER, 1.0, 0.0, 0.0, 3.0, kernels.W_CONSTANT, 1.0, -1e30, 0.0])
    *_, status = _solve(kernels.dopri_solve, kernels.KIND_RADIAL, prm, [1.0, 0.0], t)
    assert status == kernels.STATUS_BLOWUP


def test_cone_rhs():
    y = np.array([0.25, 1.0])
    out = kernels.rhs_eval(kernels.KIND_CONE, 0.0, y, np.array([16.0, 0.5]))
    assert out[0] == 1.0 and out[1] == pytest.approx(-16 * 0.25 - 0.5)


def test_disable_flag_selects_python_backend():
    env = dict(os.environ, SUPERSOL_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from supersol import _accel, kernels; print(_accel.backend(), hasattr(kernels.dopri_solve, 'signatures'))"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split() == ["numpy", "False"]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SUPERSOL_THREADS", "3")
    assert _accel.worker_count() == 3
    assert _accel.parallel_map(lambda v: v * v, [1, 2, 3, 4]) == [1, 4, 9, 16]
