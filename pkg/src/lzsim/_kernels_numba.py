"""numba backend: the scalar kernels jitted unchanged, plus a batch kernel.

All kernels release the GIL so the block-level thread pool in experiments
gets real concurrency. cache=True persists compilation across processes.
"""

from __future__ import annotations

import numpy as np
import numba

from . import _kernels_scalar as _s

NAME = "numba"

_JIT = dict(cache=True, nogil=True)

ground_amplitudes = numba.njit(**_JIT)(_s.ground_amplitudes)
propagate_sin = numba.njit(**_JIT)(_s.propagate_sin)
propagate_ramp = numba.njit(**_JIT)(_s.propagate_ramp)


@numba.njit(cache=True, nogil=True)
def final_sz_grid(v_dc, v_rf, t_pump, n_steps, two_pi_f, phase,
                  delta0, dmod, kappa, eps0, quadv, sz_initial, sz_final):
    """Per grid point: adiabatic ground state at V = v_dc, evolve one pulse
    window [0, t_pump], record initial and final <S_z> into the out arrays."""
    h = t_pump / n_steps
    for i in range(v_dc.shape[0]):
        d0 = delta0 + dmod * v_dc[i]
        e0 = kappa * v_dc[i] + quadv * v_dc[i] * v_dc[i] + eps0
        a, b = ground_amplitudes(d0, e0)
        sz_initial[i] = 2.0 * (a * a - b * b)
        cp = complex(a, 0.0)
        cm = complex(b, 0.0)
        cp, cm = propagate_sin(cp, cm, 0.0, h, n_steps, v_dc[i], v_rf[i],
                               two_pi_f, phase, delta0, dmod, kappa, eps0, quadv)
        pp = cp.real * cp.real + cp.imag * cp.imag
        pm = cm.real * cm.real + cm.imag * cm.imag
        sz_final[i] = 2.0 * (pp - pm)


def warmup():
    """Trigger compilation of every kernel with tiny inputs."""
    cp, cm = propagate_sin(1.0 + 0.0j, 0.0j, 0.0, 0.01, 2, 0.1, 0.1,
                           3.14, 0.0, 0.05, 0.0, 3.3, 0.0, 0.0)
    propagate_ramp(cp, cm, 0.0, 0.01, 2, -0.1, 0.05, 0.05, 0.0, 3.3, 0.0, 0.0)
    v = np.array([0.1, -0.1])
    out0 = np.empty(2)
    out1 = np.empty(2)
    final_sz_grid(v, v, 1.0, 4, 3.14, 0.0, 0.05, 0.0, 3.3, 0.0, 0.0, out0, out1)
