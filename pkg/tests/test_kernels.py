"""Backend parity: the jitted and pure-numpy kernels must integrate the same
recursion, and the env switch must select them predictably."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from lzsim import ModelParams, kernel_coefficients, kernels
from lzsim import _kernels_numpy, _kernels_scalar

try:
    from lzsim import _kernels_numba
except ImportError:  # pragma: no cover - numba is an optional dependency
    _kernels_numba = None

needs_numba = pytest.mark.skipif(_kernels_numba is None,
                                 reason="numba not installed")

TWO_PI = 2.0 * math.pi
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _drive_args(fe, v_dc=0.15, v_rf=0.26, f=0.5, t_pump=18.0, spp=512):
    n_steps = int(math.ceil(t_pump * f * spp))
    h = t_pump / n_steps
    return (0.0, h, n_steps, v_dc, v_rf, TWO_PI * f, 0.0) + kernel_coefficients(fe)


def test_pauli_step_matches_matrix_exponential():
    rng = np.random.default_rng(7)
    for _ in range(20):
        ax, az = rng.uniform(-2.0, 2.0, size=2)
        cp, cm = _kernels_scalar.pauli_step(1.0 + 0.0j, 0.0j, ax, az)
        u = scipy.linalg.expm(-1j * (ax * SX + az * SZ))
        assert abs(cp - u[0, 0]) < 1e-14
        assert abs(cm - u[1, 0]) < 1e-14
    assert _kernels_scalar.pauli_step(0.6 + 0.0j, 0.8j, 0.0, 0.0) == (0.6, 0.8j)


def test_ground_amplitudes_solves_the_eigenproblem():
    delta = 0.05
    for eps in (-5.0, -0.5, -1e-9, 0.0, 1e-9, 0.5, 5.0):
        a, b = _kernels_scalar.ground_amplitudes(delta, eps)
        assert math.hypot(a, b) == pytest.approx(1.0, abs=1e-15)
        assert a >= 0.0 and b >= 0.0
        h = np.array([[-0.5 * eps, -0.5 * delta], [-0.5 * delta, 0.5 * eps]])
        lo = np.linalg.eigvalsh(h)[0]
        psi = np.array([a, b])
        assert np.max(np.abs(h @ psi - lo * psi)) < 1e-14


def test_ground_amplitudes_continuous_through_crossing():
    a_lo, b_lo = _kernels_scalar.ground_amplitudes(0.05, -1e-12)
    a_hi, b_hi = _kernels_scalar.ground_amplitudes(0.05, 1e-12)
    assert a_lo == pytest.approx(a_hi, abs=1e-10)
    assert b_lo == pytest.approx(b_hi, abs=1e-10)
    assert a_lo == pytest.approx(math.sqrt(0.5), abs=1e-10)


def test_zero_coupling_keeps_diabatic_population():
    args = (0.0, 0.01, 1000, 0.1, 0.26, TWO_PI * 0.5, 0.0,
            0.0, 0.0, 10.0 / 3.0, 0.0, 0.0)
    cp, cm = _kernels_scalar.propagate_sin(0.0j, 1.0 + 0.0j, *args)
    assert abs(abs(cm) ** 2 - 1.0) < 1e-13
    assert abs(cp) == 0.0


def test_static_drive_single_step_is_exact(fe):
    # with v_rf = 0 every CF4 factor commutes, so one step equals many
    coef = kernel_coefficients(fe)
    one = _kernels_scalar.propagate_sin(1.0 + 0.0j, 0.0j, 0.0, 5.0, 1,
                                        0.123, 0.0, TWO_PI * 0.5, 0.0, *coef)
    many = _kernels_scalar.propagate_sin(1.0 + 0.0j, 0.0j, 0.0, 5.0 / 640, 640,
                                         0.123, 0.0, TWO_PI * 0.5, 0.0, *coef)
    assert abs(one[0] - many[0]) < 1e-12
    assert abs(one[1] - many[1]) < 1e-12


def test_numpy_grid_matches_scalar_loop(fe):
    t0, h, n_steps, v_dc, v_rf, tpf, ph, *coef = _drive_args(fe, t_pump=4.0)
    v_dcs = np.linspace(-0.3, 0.3, 7)
    v_rfs = np.full(7, v_rf)
    sz0 = np.empty(7)
    sz1 = np.empty(7)
    _kernels_numpy.final_sz_grid(v_dcs, v_rfs, 4.0, n_steps, tpf, ph,
                                 *coef, sz0, sz1)
    for i, v in enumerate(v_dcs):
        a, b = _kernels_scalar.ground_amplitudes(
            coef[0] + coef[1] * v, coef[2] * v + coef[4] * v * v + coef[3])
        cp, cm = _kernels_scalar.propagate_sin(complex(a), complex(b), t0, h,
                                               n_steps, v, v_rf, tpf, ph, *coef)
        assert sz0[i] == pytest.approx(2.0 * (a * a - b * b), abs=1e-13)
        assert sz1[i] == pytest.approx(2.0 * (abs(cp) ** 2 - abs(cm) ** 2),
                                       abs=1e-12)


@needs_numba
def test_backends_agree_on_grid(fe):
    t0, h, n_steps, v_dc, v_rf, tpf, ph, *coef = _drive_args(fe, t_pump=6.0)
    v_dcs = np.repeat(np.linspace(-0.32, 0.32, 9), 2)
    v_rfs = np.tile(np.array([0.1, 0.26]), 9)
    a0 = np.empty(v_dcs.size)
    a1 = np.empty(v_dcs.size)
    b0 = np.empty(v_dcs.size)
    b1 = np.empty(v_dcs.size)
    _kernels_numpy.final_sz_grid(v_dcs, v_rfs, 6.0, n_steps, tpf, ph, *coef, a0, a1)
    _kernels_numba.final_sz_grid(v_dcs, v_rfs, 6.0, n_steps, tpf, ph, *coef, b0, b1)
    assert np.max(np.abs(a0 - b0)) < 1e-12
    assert np.max(np.abs(a1 - b1)) < 1e-12


@needs_numba
def test_backends_agree_on_ramp(fe):
    coef = kernel_coefficients(fe)
    args = (0.0, 0.001, 40000, -0.45, 0.01) + coef
    a = _kernels_numba.propagate_ramp(complex(1.0), complex(0.0), *args)
    b = _kernels_numpy.propagate_ramp(complex(1.0), complex(0.0), *args)
    assert abs(a[0] - b[0]) < 1e-12
    assert abs(a[1] - b[1]) < 1e-12


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env["LZSIM_KERNELS"] = value
    return subprocess.run(
        [sys.executable, "-c", "import lzsim; print(lzsim.backend_name())"],
        capture_output=True, text=True, env=env)


def test_env_flag_selects_backend():
    out = _backend_in_subprocess("numpy")
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"
    if _kernels_numba is not None:
        out = _backend_in_subprocess("numba")
        assert out.returncode == 0
        assert out.stdout.strip() == "numba"


def test_env_flag_rejects_unknown_backend():
    out = _backend_in_subprocess("cuda")
    assert out.returncode != 0
    assert "LZSIM_KERNELS" in out.stderr


def test_active_backend_exposes_kernel_surface():
    assert kernels.backend_name() in ("numba", "numpy")
    for name in ("ground_amplitudes", "propagate_sin", "propagate_ramp",
                 "final_sz_grid", "warmup"):
        assert callable(getattr(kernels, name))
