"""Kernel backend benchmark: jitted vs pure-numpy batch propagation.

Runs the same map block through both backends (imported directly, bypassing
the env-var dispatch) and reports per-point cost and the speedup. Usage:

    python -m lzsim.bench [--points 1024] [--tpump-ns 18] [--spp 512]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from .model import ModelParams, TWO_PI, kernel_coefficients


def _run(mod, v_dc, v_rf, t_pump, n_steps, two_pi_f, coefs, repeat):
    n = v_dc.shape[0]
    sz0 = np.empty(n)
    sz1 = np.empty(n)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        mod.final_sz_grid(v_dc, v_rf, t_pump, n_steps, two_pi_f, 0.0,
                          *coefs, sz0, sz1)
        best = min(best, time.perf_counter() - t0)
    return best, sz1.copy()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="python -m lzsim.bench",
        description="compare the jitted and pure-numpy propagation kernels")
    ap.add_argument("--points", type=int, default=1024)
    ap.add_argument("--tpump-ns", type=float, default=18.0)
    ap.add_argument("--f-ghz", type=float, default=0.5)
    ap.add_argument("--vrf-mv", type=float, default=260.0)
    ap.add_argument("--spp", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    params = ModelParams.fe_mgo()
    coefs = kernel_coefficients(params)
    n_steps = int(math.ceil(args.tpump_ns * args.f_ghz * args.spp))
    v_dc = np.linspace(-0.5, 0.5, args.points)
    v_rf = np.full(args.points, args.vrf_mv * 1e-3)
    two_pi_f = TWO_PI * args.f_ghz

    from . import _kernels_numpy
    t_np, sz_np = _run(_kernels_numpy, v_dc, v_rf, args.tpump_ns, n_steps,
                       two_pi_f, coefs, args.repeat)
    print(f"numpy : {t_np:8.3f} s total, {t_np / args.points * 1e3:8.3f} ms/point")

    try:
        from . import _kernels_numba
    except ImportError:
        print("numba : unavailable (pip install numba)")
        return 0
    _kernels_numba.warmup()
    t_nb, sz_nb = _run(_kernels_numba, v_dc, v_rf, args.tpump_ns, n_steps,
                       two_pi_f, coefs, args.repeat)
    print(f"numba : {t_nb:8.3f} s total, {t_nb / args.points * 1e3:8.3f} ms/point")
    print(f"speedup: {t_np / t_nb:.1f}x; max |difference| = "
          f"{float(np.max(np.abs(sz_np - sz_nb))):.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
