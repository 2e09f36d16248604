"""Voltage-sweep experiments and the splitting-extraction protocol.

The measurement protocols of the package live here: single-point pulse
traces, resonance scans over the dc voltage, two-dimensional interference
maps over (V_dc, V_rf), linear-ramp survival sweeps, and the closed-loop
extraction that recovers the tunneling splitting from scan resonances plus
ramp survivals.

Grid experiments run on a deterministic parallel engine: points are split
into fixed-size blocks whose boundaries do not depend on the degree of
parallelism, each block is evaluated by the batch kernel, and results land
in preallocated slots. Outputs are therefore bit-identical for any ``jobs``
value and any completion order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .analytic import LZParams, lz_probability, resonance_voltages
from .errors import DomainError, ExtractionError
from .model import (ModelParams, DriveProtocol, bias, kernel_coefficients,
                    TWO_PI)
from .propagator import (IntegratorOptions, SpinState, Trajectory, evolve)

# grid points per work item; fixed so that block boundaries (and hence
# floating-point results) never depend on the parallelism degree
BLOCK_SIZE = 256

_CSV_FMT = "%.12g"


def _fmt(x: float) -> str:
    return _CSV_FMT % (x,)


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class ScanResult:
    """<S_z> at the end of the pump pulse versus dc voltage.

    ``sz_initial`` is the pre-pulse magnetization per point, the reference
    against which flips are measured. ``wall_time_per_point_s`` is the
    average evaluation cost (metadata only, never serialized).
    """

    v_dc: np.ndarray
    sz_final: np.ndarray
    sz_initial: np.ndarray
    v_rf: float
    frequency_ghz: float
    t_pump_ns: float
    phase_rad: float
    params: ModelParams
    wall_time_per_point_s: float

    def __post_init__(self):
        if self.v_dc.ndim != 1 or self.v_dc.shape != self.sz_final.shape:
            raise DomainError("v_dc and sz_final must be 1-D and congruent")
        if not np.all(np.diff(self.v_dc) > 0.0):
            raise DomainError("scan axis must be strictly increasing")

    def to_csv(self, path) -> None:
        """Write ``v_dc,sz_final`` rows, 12 significant digits."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("v_dc,sz_final\n")
            for v, s in zip(self.v_dc, self.sz_final):
                fh.write(f"{_fmt(v)},{_fmt(s)}\n")


@dataclass(frozen=True)
class HeatMap:
    """<S_z>(t_pump) over a (V_dc, V_rf) grid with predicted resonance lines.

    ``sz`` is row-major ``[n_vdc, n_vrf]``. ``overlay`` holds the analytic
    resonance voltages that fall inside the dc range, as (harmonic, volts)
    pairs.
    """

    v_dc: np.ndarray
    v_rf: np.ndarray
    sz: np.ndarray
    sz_initial: np.ndarray
    overlay: tuple[tuple[int, float], ...]
    frequency_ghz: float
    t_pump_ns: float
    phase_rad: float
    params: ModelParams
    wall_time_per_point_s: float

    def __post_init__(self):
        if self.sz.shape != (self.v_dc.size, self.v_rf.size):
            raise DomainError("grid shape must equal (len(v_dc), len(v_rf))")

    def to_csv(self, path) -> None:
        """First row: ``v_dc`` then the v_rf axis; rows: v_dc then sz cells."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("v_dc," + ",".join(_fmt(v) for v in self.v_rf) + "\n")
            for i, v in enumerate(self.v_dc):
                row = ",".join(_fmt(s) for s in self.sz[i])
                fh.write(f"{_fmt(v)},{row}\n")

    def overlay_to_txt(self, path) -> None:
        """Sidecar listing the predicted resonance voltages, one per line."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("# predicted resonance lines: harmonic n, v_dc (V)\n")
            for n, v in self.overlay:
                fh.write(f"{n} {_fmt(v)}\n")

    def to_svg(self, path, cell_px: int = 4) -> None:
        render_heatmap_svg(self, path, cell_px=cell_px)


@dataclass(frozen=True)
class DeltaExtraction:
    """Result of the two-step splitting extraction.

    The scan resonances fix the voltage-to-bias coupling ``kappa``; each
    ramp survival is then inverted through the passage formula to an
    independent splitting estimate. ``delta_ghz`` is their mean;
    ``delta_std_ghz`` combines the sample spread with the propagated
    ``kappa`` fit uncertainty.
    """

    kappa_ghz_per_v: float
    kappa_std_ghz_per_v: float
    delta_ghz: float
    delta_std_ghz: float
    delta_samples_ghz: tuple[float, ...]
    lz_runs: tuple[tuple[float, float], ...]
    peak_voltages_v: tuple[float, ...]
    peak_harmonics: tuple[int, ...]

    def summary(self) -> str:
        lines = [
            f"kappa_ghz_per_v={_fmt(self.kappa_ghz_per_v)}",
            f"kappa_std_ghz_per_v={_fmt(self.kappa_std_ghz_per_v)}",
            f"delta_ghz={_fmt(self.delta_ghz)}",
            f"delta_std_ghz={_fmt(self.delta_std_ghz)}",
            "delta_samples_ghz=" + ",".join(_fmt(d) for d in self.delta_samples_ghz),
            "peak_voltages_v=" + ",".join(_fmt(v) for v in self.peak_voltages_v),
            "peak_harmonics=" + ",".join(str(n) for n in self.peak_harmonics),
        ]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# deterministic parallel grid engine


def _grid_final_sz(params: ModelParams, v_dc: np.ndarray, v_rf: np.ndarray,
                   frequency_ghz: float, t_pump_ns: float, phase_rad: float,
                   steps_per_period: int, jobs: int):
    """Evaluate <S_z>(0) and <S_z>(t_pump) for flat point arrays.

    One uniform-step kernel call per block covers the whole pump window, so
    the measurement lands exactly at t = t_pump.
    """
    if jobs < 1 or int(jobs) != jobs:
        raise DomainError(f"jobs must be an integer >= 1, got {jobs!r}")
    n_points = v_dc.shape[0]
    n_steps = int(math.ceil(t_pump_ns * frequency_ghz * steps_per_period))
    coefs = kernel_coefficients(params)
    two_pi_f = TWO_PI * frequency_ghz
    sz0 = np.empty(n_points)
    sz1 = np.empty(n_points)
    spans = [(lo, min(lo + BLOCK_SIZE, n_points))
             for lo in range(0, n_points, BLOCK_SIZE)]

    def block(span):
        lo, hi = span
        kernels.final_sz_grid(v_dc[lo:hi], v_rf[lo:hi], t_pump_ns, n_steps,
                              two_pi_f, phase_rad, *coefs,
                              sz0[lo:hi], sz1[lo:hi])

    if jobs == 1 or len(spans) == 1:
        for span in spans:
            block(span)
    else:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            # materialize so worker exceptions propagate before results are used
            list(pool.map(block, spans))
    return sz0, sz1


def _check_drive_numbers(v_rf: float, frequency_ghz: float,
                         t_pump_ns: float) -> None:
    if not math.isfinite(v_rf) or v_rf < 0.0:
        raise DomainError(f"v_rf must be finite and >= 0, got {v_rf!r}")
    if not math.isfinite(frequency_ghz) or frequency_ghz <= 0.0:
        raise DomainError(f"frequency_ghz must be > 0, got {frequency_ghz!r}")
    if not math.isfinite(t_pump_ns) or t_pump_ns <= 0.0:
        raise DomainError(f"t_pump_ns must be > 0, got {t_pump_ns!r}")


# ---------------------------------------------------------------------------
# experiments


def pulse_trace(params: ModelParams, v_dc: float, v_rf: float,
                frequency_ghz: float, t_pump_list: Sequence[float],
                t_end_ns: float, phase_rad: float = 0.0,
                options: Optional[IntegratorOptions] = None) -> list[Trajectory]:
    """Trajectories for a family of pump durations at one operating point.

    Every trajectory starts from the same adiabatic ground state at v_dc.
    Use ``math.inf`` in ``t_pump_list`` for the continuous-wave reference
    curve; ``t_pump = 0`` never switches the drive on, ``0 < t_pump <
    t_end`` rings freely after the pulse.
    """
    if len(t_pump_list) == 0:
        raise DomainError("t_pump_list must be non-empty")
    psi0 = SpinState.ground(params, v_dc)
    out = []
    for tp in t_pump_list:
        if tp != tp or tp < 0.0:
            raise DomainError(f"pump durations must be >= 0, got {tp!r}")
        if math.isinf(tp):
            proto = DriveProtocol.cw(v_dc=v_dc, v_rf=v_rf,
                                     frequency_ghz=frequency_ghz,
                                     phase_rad=phase_rad)
        else:
            proto = DriveProtocol.pulse(v_dc=v_dc, v_rf=v_rf,
                                        frequency_ghz=frequency_ghz,
                                        t_pump_ns=tp, phase_rad=phase_rad)
        out.append(evolve(params, proto, psi0, t_end_ns, options))
    return out


def dc_scan(params: ModelParams, v_dc: Sequence[float], v_rf: float,
            frequency_ghz: float, t_pump_ns: float, phase_rad: float = 0.0,
            options: Optional[IntegratorOptions] = None,
            jobs: int = 1) -> ScanResult:
    """<S_z> at the end of the pump versus dc voltage.

    ``v_dc`` must be strictly increasing and cover both signs so the scan
    brackets the full resonance pattern around the crossing.
    """
    axis = np.ascontiguousarray(v_dc, dtype=np.float64)
    if axis.ndim != 1 or axis.size < 2:
        raise DomainError("v_dc must be a 1-D grid with at least 2 points")
    if not np.all(np.diff(axis) > 0.0):
        raise DomainError("v_dc grid must be strictly increasing")
    if not (axis[0] < 0.0 < axis[-1]):
        raise DomainError("v_dc grid must cover both signs of the voltage")
    _check_drive_numbers(v_rf, frequency_ghz, t_pump_ns)
    opts = options if options is not None else IntegratorOptions()

    amps = np.full(axis.size, float(v_rf))
    t0 = time.perf_counter()
    sz0, sz1 = _grid_final_sz(params, axis, amps, frequency_ghz, t_pump_ns,
                              phase_rad, opts.steps_per_period, jobs)
    per_point = (time.perf_counter() - t0) / axis.size
    return ScanResult(v_dc=axis, sz_final=sz1, sz_initial=sz0, v_rf=float(v_rf),
                      frequency_ghz=float(frequency_ghz),
                      t_pump_ns=float(t_pump_ns), phase_rad=float(phase_rad),
                      params=params, wall_time_per_point_s=per_point)


def map2d(params: ModelParams, v_dc: Sequence[float], v_rf: Sequence[float],
          frequency_ghz: float, t_pump_ns: float, phase_rad: float = 0.0,
          options: Optional[IntegratorOptions] = None,
          jobs: int = 1) -> HeatMap:
    """Interference map: <S_z>(t_pump) over a (V_dc, V_rf) grid.

    The overlay records the analytic resonance voltages n f / kappa that
    fall inside the dc range. Grids are evaluated in deterministic blocks;
    a failure in any block aborts the whole map (partial grids are never
    returned).
    """
    dc = np.ascontiguousarray(v_dc, dtype=np.float64)
    rf = np.ascontiguousarray(v_rf, dtype=np.float64)
    for name, axis in (("v_dc", dc), ("v_rf", rf)):
        if axis.ndim != 1 or axis.size < 2:
            raise DomainError(f"{name} must be a 1-D grid with at least 2 points")
        if not np.all(np.diff(axis) > 0.0):
            raise DomainError(f"{name} grid must be strictly increasing")
    if rf[0] < 0.0:
        raise DomainError("v_rf amplitudes must be >= 0")
    _check_drive_numbers(float(rf[-1]), frequency_ghz, t_pump_ns)

    opts = options if options is not None else IntegratorOptions()
    points_dc = np.repeat(dc, rf.size)
    points_rf = np.tile(rf, dc.size)
    t0 = time.perf_counter()
    sz0, sz1 = _grid_final_sz(params, points_dc, points_rf, frequency_ghz,
                              t_pump_ns, phase_rad, opts.steps_per_period, jobs)
    per_point = (time.perf_counter() - t0) / points_dc.size

    grid = sz1.reshape(dc.size, rf.size)
    init = sz0.reshape(dc.size, rf.size)[:, 0].copy()

    v_abs_max = max(abs(dc[0]), abs(dc[-1]))
    kappa = params.kappa_ghz_per_v
    n_reach = int(math.floor(kappa * v_abs_max / frequency_ghz))
    overlay: list[tuple[int, float]] = []
    if n_reach >= 1:
        volts = resonance_voltages(params, frequency_ghz, n_reach)
        orders = list(range(-n_reach, 0)) + list(range(1, n_reach + 1))
        overlay = [(n, v) for n, v in zip(orders, volts) if dc[0] <= v <= dc[-1]]
    return HeatMap(v_dc=dc, v_rf=rf, sz=grid, sz_initial=init,
                   overlay=tuple(overlay), frequency_ghz=float(frequency_ghz),
                   t_pump_ns=float(t_pump_ns), phase_rad=float(phase_rad),
                   params=params, wall_time_per_point_s=per_point)


def lz_sweep(params: ModelParams, v_start: float, v_end: float,
             sweep_rate_v_per_ns: float,
             options: Optional[IntegratorOptions] = None) -> float:
    """Survival probability of the initial diabatic branch after one ramp.

    Ramps the voltage linearly from v_start to v_end at the given (positive)
    speed, starting from the adiabatic ground state. The crossing (bias = 0)
    must lie strictly inside the range, and the swept bias must span at
    least 20x the splitting so the asymptotic populations settle.

    The return value is the occupation of the continuation of the initial
    diabatic state past the crossing, evaluated by projecting the final
    state onto the adiabatic excited branch at v_end. At the mandated
    endpoint biases the two bases coincide to (Delta/2 eps)^2; projecting on
    the branch removes that residual admixture, which would otherwise floor
    the small survivals of slow sweeps.
    """
    for name, val in (("v_start", v_start), ("v_end", v_end)):
        if not math.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")
    if not math.isfinite(sweep_rate_v_per_ns) or sweep_rate_v_per_ns <= 0.0:
        raise DomainError(f"sweep_rate_v_per_ns must be > 0, "
                          f"got {sweep_rate_v_per_ns!r}")
    if v_start == v_end:
        raise DomainError("v_start and v_end must differ")
    e_a = bias(params, v_start)
    e_b = bias(params, v_end)
    if not (e_a * e_b < 0.0):
        raise DomainError("the crossing (bias = 0) must lie strictly inside "
                          f"(v_start, v_end); got bias {e_a:g} .. {e_b:g} GHz")
    if abs(e_b - e_a) < 20.0 * params.delta0_ghz:
        raise DomainError("swept bias must span at least 20x the splitting; "
                          f"got {abs(e_b - e_a):g} GHz vs "
                          f"{20.0 * params.delta0_ghz:g} GHz")
    rate = sweep_rate_v_per_ns if v_end > v_start else -sweep_rate_v_per_ns
    duration = (v_end - v_start) / rate
    proto = DriveProtocol.linear_ramp(v_start=v_start, sweep_rate_v_per_ns=rate,
                                      duration_ns=duration)
    psi0 = SpinState.ground(params, v_start)
    traj = evolve(params, proto, psi0, duration, options)
    target = SpinState.excited(params, v_end)
    return traj.final_state.overlap_probability(target)


# ---------------------------------------------------------------------------
# splitting extraction


def _parabola_vertex(x1, y1, x2, y2, x3, y3) -> float:
    d21 = x2 - x1
    d32 = x3 - x2
    num = d21 * d21 * (y2 - y3) - d32 * d32 * (y2 - y1)
    den = d21 * (y2 - y3) + d32 * (y2 - y1)
    if den == 0.0:
        return x2
    return x2 - 0.5 * num / den


def _find_peaks(v: np.ndarray, deviation: np.ndarray) -> list[tuple[float, float]]:
    """Local maxima of the flip magnitude above half its global maximum,
    refined by a three-point parabola. Returns (voltage, magnitude) pairs."""
    gmax = float(np.max(deviation))
    if gmax <= 0.0:
        return []
    threshold = 0.5 * gmax
    peaks = []
    for i in range(1, len(v) - 1):
        y = deviation[i]
        if y < threshold:
            continue
        if y > deviation[i - 1] and y >= deviation[i + 1]:
            vx = _parabola_vertex(v[i - 1], deviation[i - 1], v[i], y,
                                  v[i + 1], deviation[i + 1])
            if not (v[i - 1] <= vx <= v[i + 1]):
                vx = float(v[i])
            peaks.append((float(vx), float(y)))
    return peaks


def _fit_kappa(frequency_ghz: float, peak_volts: list[float]):
    """Fit |V_n| = n f / kappa through the origin with harmonic assignment.

    The lowest-|V| peak is tried as harmonic 1, 2, and 3; each trial assigns
    the remaining peaks by rounding and keeps the assignment with the
    smallest residual sum of squares. Returns (kappa, kappa_std, harmonics,
    rms_residual).
    """
    mags = [abs(v) for v in peak_volts]
    v_min = min(mags)
    best = None
    seen: set[tuple[int, ...]] = set()
    for k in (1, 2, 3):
        spacing = v_min / k
        ns = [int(round(m / spacing)) for m in mags]
        if any(n < 1 for n in ns):
            continue
        # the through-origin fit is invariant under (ns, s) -> (g*ns, s/g);
        # reduce by the gcd so rescaled duplicates collapse onto the
        # smallest-harmonic assignment instead of tying on residuals
        g = math.gcd(*ns)
        if g > 1:
            ns = [n // g for n in ns]
        key = tuple(ns)
        if key in seen:
            continue
        seen.add(key)
        s_num = sum(n * m for n, m in zip(ns, mags))
        s_den = sum(n * n for n in ns)
        s = s_num / s_den
        rss = sum((m - s * n) ** 2 for n, m in zip(ns, mags))
        if best is None or rss < best[0]:
            best = (rss, s, ns)
    if best is None:
        raise ExtractionError("peak-detection: no consistent harmonic "
                              "assignment for the detected peaks",
                              stage="peak-detection")
    rss, s, ns = best
    n_pts = len(mags)
    var_s = rss / ((n_pts - 1) * sum(n * n for n in ns)) if n_pts > 1 else 0.0
    kappa = frequency_ghz / s
    kappa_std = kappa * math.sqrt(var_s) / s
    rms = math.sqrt(rss / n_pts)
    return kappa, kappa_std, ns, rms


def extract_delta(scan: ScanResult,
                  lz_runs: Sequence[tuple[float, float]]) -> DeltaExtraction:
    """Recover the tunneling splitting from scan resonances plus ramp survivals.

    Step 1 locates the interference peaks of the scan (local maxima of the
    flip magnitude above half its global maximum, parabola-refined) and fits
    their positions to V_n = n f / kappa, which calibrates the
    voltage-to-bias coupling without knowing the lever arm. Step 2 converts
    each ramp's (sweep_rate in V/ns, survival) pair to a bias sweep rate
    kappa*rate (GHz/ns) and inverts the passage exponential, giving
    delta = sqrt(-rate_bias * ln survival) / pi in GHz per run.

    Requires at least two usable peaks on each voltage side and survivals
    strictly inside (0, 1); violations raise ExtractionError naming the
    failed stage.
    """
    deviation = np.abs(scan.sz_final - scan.sz_initial)
    peaks = _find_peaks(scan.v_dc, deviation)
    # peaks at the crossing itself carry no harmonic information
    spacing_guess = min((abs(v) for v, _ in peaks if v != 0.0), default=0.0)
    usable = [(v, m) for v, m in peaks if abs(v) > 0.5 * spacing_guess]
    n_pos = sum(1 for v, _ in usable if v > 0.0)
    n_neg = sum(1 for v, _ in usable if v < 0.0)
    if n_pos < 2 or n_neg < 2:
        raise ExtractionError(
            f"peak-detection: need >= 2 resonance peaks on each side, found "
            f"{n_neg} at negative and {n_pos} at positive voltage",
            stage="peak-detection")
    peak_volts = [v for v, _ in usable]
    kappa, kappa_std, harmonics, _rms = _fit_kappa(scan.frequency_ghz, peak_volts)

    if len(lz_runs) == 0:
        raise ExtractionError("lz-inversion: no ramp runs supplied",
                              stage="lz-inversion")
    deltas = []
    runs = []
    for rate_v, survival in lz_runs:
        if not math.isfinite(rate_v) or rate_v <= 0.0:
            raise ExtractionError(
                f"lz-inversion: sweep rate must be > 0, got {rate_v!r}",
                stage="lz-inversion")
        if not (0.0 < survival < 1.0):
            raise ExtractionError(
                f"lz-inversion: survival must lie strictly in (0, 1), "
                f"got {survival!r}", stage="lz-inversion")
        rate_bias = kappa * rate_v
        delta = math.sqrt(-rate_bias * math.log(survival)) / math.pi
        deltas.append(delta)
        runs.append((float(rate_v), float(survival)))

    mean = sum(deltas) / len(deltas)
    if len(deltas) > 1:
        spread = math.sqrt(sum((d - mean) ** 2 for d in deltas) / (len(deltas) - 1))
    else:
        spread = 0.0
    # delta^2 is linear in kappa, so the fit uncertainty enters at half weight
    kappa_term = mean * kappa_std / (2.0 * kappa) if kappa > 0.0 else 0.0
    delta_std = math.hypot(spread, kappa_term)
    return DeltaExtraction(
        kappa_ghz_per_v=kappa, kappa_std_ghz_per_v=kappa_std,
        delta_ghz=mean, delta_std_ghz=delta_std,
        delta_samples_ghz=tuple(deltas), lz_runs=tuple(runs),
        peak_voltages_v=tuple(peak_volts), peak_harmonics=tuple(harmonics))


def survival_oracle(params: ModelParams, sweep_rate_v_per_ns: float) -> float:
    """Closed-form survival for a linear voltage ramp at the model's kappa.

    Convenience for synthesizing extraction inputs and for oracle tests:
    builds the angular-unit passage parameters from the GHz-unit gap and
    bias sweep rate kappa * rate.
    """
    p = LZParams.from_ghz(params.delta0_ghz,
                          params.kappa_ghz_per_v * sweep_rate_v_per_ns)
    return lz_probability(p)


# ---------------------------------------------------------------------------
# SVG rendering


def _ramp_color(sz: float) -> str:
    """Fixed diverging ramp: -2 blue, 0 white, +2 red."""
    t = max(-1.0, min(1.0, sz / 2.0))
    white = (255, 255, 255)
    blue = (59, 76, 192)
    red = (180, 4, 38)
    anchor = blue if t < 0.0 else red
    w = abs(t)
    r = round(white[0] + (anchor[0] - white[0]) * w)
    g = round(white[1] + (anchor[1] - white[1]) * w)
    b = round(white[2] + (anchor[2] - white[2]) * w)
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap_svg(hm: HeatMap, path, cell_px: int = 4) -> None:
    """Standalone SVG render of a heat map with resonance-line overlay.

    x is V_dc, y is V_rf (increasing upward); dashed green verticals mark
    the predicted resonances. Output is a pure function of the map data.
    """
    if cell_px < 1:
        raise DomainError(f"cell_px must be >= 1, got {cell_px}")
    n_dc, n_rf = hm.sz.shape
    ml, mt, mr, mb = 56, 14, 16, 42
    w_plot = n_dc * cell_px
    h_plot = n_rf * cell_px
    width = ml + w_plot + mr
    height = mt + h_plot + mb
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for i in range(n_dc):
        x = ml + i * cell_px
        for j in range(n_rf):
            # row j sits at the bottom for the lowest v_rf
            y = mt + (n_rf - 1 - j) * cell_px
            parts.append(f'<rect x="{x}" y="{y}" width="{cell_px}" '
                         f'height="{cell_px}" fill="{_ramp_color(hm.sz[i, j])}"/>')
    span_dc = hm.v_dc[-1] - hm.v_dc[0]
    for _n, v in hm.overlay:
        fx = (v - hm.v_dc[0]) / span_dc
        x = ml + fx * (w_plot - cell_px) + 0.5 * cell_px
        parts.append(f'<line x1="{x:.2f}" y1="{mt}" x2="{x:.2f}" '
                     f'y2="{mt + h_plot}" stroke="#1a7f37" stroke-width="1" '
                     f'stroke-dasharray="5,4"/>')
    parts.append(f'<rect x="{ml}" y="{mt}" width="{w_plot}" height="{h_plot}" '
                 f'fill="none" stroke="#333" stroke-width="1"/>')
    font = 'font-family="sans-serif" font-size="11"'
    for frac, val in ((0.0, hm.v_dc[0]), (0.5, 0.5 * (hm.v_dc[0] + hm.v_dc[-1])),
                      (1.0, hm.v_dc[-1])):
        x = ml + frac * w_plot
        parts.append(f'<text x="{x:.1f}" y="{mt + h_plot + 16}" {font} '
                     f'text-anchor="middle">{val:.3g}</text>')
    for frac, val in ((0.0, hm.v_rf[0]), (1.0, hm.v_rf[-1])):
        y = mt + (1.0 - frac) * h_plot
        parts.append(f'<text x="{ml - 6}" y="{y + 4:.1f}" {font} '
                     f'text-anchor="end">{val:.3g}</text>')
    parts.append(f'<text x="{ml + w_plot / 2:.1f}" y="{mt + h_plot + 34}" {font} '
                 f'text-anchor="middle">V_dc (V)</text>')
    parts.append(f'<text x="14" y="{mt + h_plot / 2:.1f}" {font} '
                 f'text-anchor="middle" transform="rotate(-90 14 '
                 f'{mt + h_plot / 2:.1f})">V_rf (V)</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")
