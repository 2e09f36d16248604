"""Experiment drivers: scans, maps, ramp survivals, splitting extraction."""

import math

import numpy as np
import pytest

from lzsim import (
    DomainError,
    DriveProtocol,
    ExtractionError,
    HeatMap,
    IntegratorOptions,
    LZParams,
    ScanResult,
    SpinState,
    dc_scan,
    evolve,
    extract_delta,
    fast_drive_probability,
    lz_probability,
    lz_sweep,
    map2d,
    pulse_trace,
    render_heatmap_svg,
    survival_oracle,
)
from lzsim.experiments import _fit_kappa

F = 0.5       # drive frequency, GHz
TP = 18.0     # pump length 0.9 / Delta, ns
KAPPA = 10.0 / 3.0


def _lz_rate(delta_l, kappa=KAPPA, delta=0.05):
    # voltage sweep rate giving the requested adiabaticity parameter
    return math.pi * delta * delta / (2.0 * delta_l) / kappa


# -- dc scans ------------------------------------------------------------------


def test_scan_validations(fe):
    with pytest.raises(DomainError):
        dc_scan(fe, [0.1], 0.2, F, TP)
    with pytest.raises(DomainError):
        dc_scan(fe, [0.2, 0.1, 0.3], 0.2, F, TP)
    with pytest.raises(DomainError):
        dc_scan(fe, [0.1, 0.2, 0.3], 0.2, F, TP)  # misses negative voltages
    with pytest.raises(DomainError):
        dc_scan(fe, [-0.1, 0.1], -0.2, F, TP)
    with pytest.raises(DomainError):
        dc_scan(fe, [-0.1, 0.1], 0.2, F, 0.0)
    with pytest.raises(DomainError):
        dc_scan(fe, [-0.1, 0.1], 0.2, 0.0, TP)


def test_scan_matches_full_propagator(fe):
    grid = np.linspace(-0.2, 0.2, 5)
    scan = dc_scan(fe, grid, 0.26, F, 4.0)
    for i in (0, 2, 4):
        proto = DriveProtocol.pulse(v_dc=grid[i], v_rf=0.26, frequency_ghz=F,
                                    t_pump_ns=4.0)
        traj = evolve(fe, proto, None, 4.0)
        assert scan.sz_final[i] == pytest.approx(traj.final_state.sz, abs=1e-9)
        assert scan.sz_initial[i] == pytest.approx(
            SpinState.ground(fe, grid[i]).sz, abs=1e-12)
    assert scan.wall_time_per_point_s > 0.0


def test_scan_without_drive_is_flat(fe):
    grid = np.linspace(-0.3, 0.3, 7)
    scan = dc_scan(fe, grid, 0.0, F, TP)
    assert np.max(np.abs(scan.sz_final - scan.sz_initial)) < 1e-9


def test_scan_flips_at_harmonic_voltages(fe):
    grid = np.linspace(-0.36, 0.36, 181)  # 4 mV pitch
    scan = dc_scan(fe, grid, 0.2, F, TP)
    dev = np.abs(scan.sz_final - scan.sz_initial)
    step = grid[1] - grid[0]
    for target in (0.15, -0.15, 0.30, -0.30):
        window = np.abs(grid - target) <= 0.02
        v_peak = grid[window][np.argmax(dev[window])]
        assert abs(v_peak - target) <= step + 1e-12


def test_scan_csv_format(fe, tmp_path):
    scan = dc_scan(fe, np.linspace(-0.1, 0.1, 5), 0.2, F, 2.0)
    path = tmp_path / "scan.csv"
    scan.to_csv(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "v_dc,sz_final"
    assert len(lines) == 6
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.allclose(data[:, 0], scan.v_dc, atol=1e-12)
    assert np.allclose(data[:, 1], scan.sz_final, atol=1e-11)


def test_scan_result_validation(fe):
    with pytest.raises(DomainError):
        ScanResult(v_dc=np.array([0.0, -0.1]), sz_final=np.zeros(2),
                   sz_initial=np.zeros(2), v_rf=0.1, frequency_ghz=F,
                   t_pump_ns=1.0, phase_rad=0.0, params=fe,
                   wall_time_per_point_s=0.0)
    with pytest.raises(DomainError):
        ScanResult(v_dc=np.array([-0.1, 0.1]), sz_final=np.zeros(3),
                   sz_initial=np.zeros(3), v_rf=0.1, frequency_ghz=F,
                   t_pump_ns=1.0, phase_rad=0.0, params=fe,
                   wall_time_per_point_s=0.0)


# -- interference maps ------------------------------------------------------------


def test_map_matches_scan_column(fe):
    dc = np.linspace(-0.3, 0.3, 7)
    hm = map2d(fe, dc, [0.1, 0.26], F, 6.0)
    scan = dc_scan(fe, dc, 0.26, F, 6.0)
    assert hm.sz.shape == (7, 2)
    assert np.array_equal(hm.sz[:, 1], scan.sz_final)
    assert np.array_equal(hm.sz_initial, scan.sz_initial)


def test_map_parallel_runs_are_bit_identical(fe, tmp_path):
    dc = np.linspace(-0.35, 0.35, 29)
    rf = np.linspace(0.05, 0.30, 11)
    serial = map2d(fe, dc, rf, F, 6.0, jobs=1)
    parallel = map2d(fe, dc, rf, F, 6.0, jobs=4)
    assert np.array_equal(serial.sz, parallel.sz)
    assert np.array_equal(serial.sz_initial, parallel.sz_initial)
    p1 = tmp_path / "map1.csv"
    p4 = tmp_path / "map4.csv"
    serial.to_csv(p1)
    parallel.to_csv(p4)
    assert p1.read_bytes() == p4.read_bytes()


def test_map_overlay_lists_reachable_harmonics(fe):
    hm = map2d(fe, np.linspace(-0.5, 0.5, 5), [0.05, 0.1], F, 2.0)
    orders = [n for n, _ in hm.overlay]
    volts = [v for _, v in hm.overlay]
    assert orders == [-3, -2, -1, 1, 2, 3]
    assert volts == pytest.approx([-0.45, -0.30, -0.15, 0.15, 0.30, 0.45],
                                  rel=1e-12)
    clipped = map2d(fe, np.linspace(-0.2, 0.2, 5), [0.05, 0.1], F, 2.0)
    assert [n for n, _ in clipped.overlay] == [-1, 1]


def test_map_antisymmetric_under_voltage_and_phase_flip(fe):
    # reversing the dc axis is equivalent to shifting the drive phase by pi
    # and flipping the magnetization sign
    dc = np.linspace(-0.3, 0.3, 7)
    rf = [0.1, 0.26]
    a = map2d(fe, dc, rf, F, 6.0, phase_rad=0.0)
    b = map2d(fe, dc, rf, F, 6.0, phase_rad=math.pi)
    assert np.max(np.abs(a.sz + b.sz[::-1, :])) < 1e-9


def test_map_csv_and_overlay_format(fe, tmp_path):
    hm = map2d(fe, np.linspace(-0.2, 0.2, 3), [0.1, 0.2], F, 2.0)
    mpath = tmp_path / "map.csv"
    hm.to_csv(mpath)
    lines = mpath.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("v_dc,")
    assert len(lines) == 4
    header_rf = [float(x) for x in lines[0].split(",")[1:]]
    assert header_rf == pytest.approx([0.1, 0.2], rel=1e-12)
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == pytest.approx(-0.2, rel=1e-12)
    assert row[1:] == pytest.approx(list(hm.sz[0]), rel=1e-10)

    opath = tmp_path / "overlay.txt"
    hm.overlay_to_txt(opath)
    olines = opath.read_text(encoding="utf-8").splitlines()
    assert olines[0].startswith("#")
    assert len(olines) == 1 + len(hm.overlay)
    n, v = olines[1].split()
    assert int(n) == hm.overlay[0][0]
    assert float(v) == pytest.approx(hm.overlay[0][1], rel=1e-10)


def test_map_validations(fe):
    with pytest.raises(DomainError):
        map2d(fe, [0.1], [0.1, 0.2], F, TP)
    with pytest.raises(DomainError):
        map2d(fe, [-0.1, 0.1], [0.2, 0.1], F, TP)
    with pytest.raises(DomainError):
        map2d(fe, [-0.1, 0.1], [-0.05, 0.1], F, TP)
    with pytest.raises(DomainError):
        HeatMap(v_dc=np.linspace(-0.1, 0.1, 3), v_rf=np.array([0.1, 0.2]),
                sz=np.zeros((2, 3)), sz_initial=np.zeros(3), overlay=(),
                frequency_ghz=F, t_pump_ns=1.0, phase_rad=0.0, params=fe,
                wall_time_per_point_s=0.0)


def test_render_svg_is_deterministic(fe, tmp_path):
    hm = map2d(fe, np.linspace(-0.2, 0.2, 5), np.linspace(0.05, 0.25, 4), F, 2.0)
    p1 = tmp_path / "a.svg"
    p2 = tmp_path / "b.svg"
    render_heatmap_svg(hm, p1)
    hm.to_svg(p2)
    blob = p1.read_bytes()
    assert blob == p2.read_bytes()
    text = blob.decode("utf-8")
    assert text.count("<svg") == 1
    assert text.count("<rect") >= 20
    assert text.count('stroke-dasharray') == len(hm.overlay)


# -- pulse families ---------------------------------------------------------------


def test_pulse_trace_family(fe):
    trajs = pulse_trace(fe, 0.15, 0.26, F, [math.inf, 0.0, 5.0], 12.0)
    cw, off, pulsed = trajs
    assert cw.protocol.kind == "cw"
    assert off.protocol.kind == "pulse"
    assert pulsed.protocol.t_pump_ns == 5.0
    # never driven: the ground state only picks up a phase
    assert np.max(np.abs(off.sz - off.sz[0])) < 2e-12
    # identical drive up to the switch-off time
    common = cw.t_ns <= 5.0 + 1e-12
    assert np.array_equal(cw.sz[common], pulsed.sz[: int(np.sum(common))])
    after = pulsed.t_ns > 5.0
    assert np.max(np.abs(pulsed.sz[after] - cw.sz[after])) > 1e-3


def test_pulse_trace_validations(fe):
    with pytest.raises(DomainError):
        pulse_trace(fe, 0.15, 0.26, F, [], 12.0)
    with pytest.raises(DomainError):
        pulse_trace(fe, 0.15, 0.26, F, [-1.0], 12.0)


@pytest.mark.filterwarnings("ignore:fast-driving sum exceeds")
def test_flip_probability_tracks_closed_form(fe):
    # propagated population transfer out of the initial diabatic state vs the
    # multi-harmonic closed form, on resonance, within the pump window
    proto = DriveProtocol.cw(v_dc=0.15, v_rf=0.26, frequency_ghz=F)
    traj = evolve(fe, proto, SpinState.diabatic_plus(), 20.0,
                  IntegratorOptions(sample_interval_ns=0.5))
    worst = 0.0
    for t, pm in zip(traj.t_ns[1:], traj.p_minus[1:]):
        ref = fast_drive_probability(fe, proto, float(t))
        worst = max(worst, abs(pm - ref))
    assert worst < 0.1


# -- ramp survivals ----------------------------------------------------------------


def test_lz_sweep_matches_closed_form(fe):
    for delta_l in (0.3, 1.0):
        rate = _lz_rate(delta_l)
        measured = lz_sweep(fe, -0.45, 0.45, rate)
        expected = survival_oracle(fe, rate)
        assert measured == pytest.approx(expected, rel=2e-2)


def test_lz_sweep_direction_symmetric(fe):
    rate = _lz_rate(0.5)
    down = lz_sweep(fe, 0.45, -0.45, rate)
    up = lz_sweep(fe, -0.45, 0.45, rate)
    assert down == pytest.approx(up, rel=1e-6)


def test_lz_sweep_monotone_in_rate(fe):
    rates = [_lz_rate(d) for d in (0.2, 0.5, 1.0)]  # slower and slower
    survs = [lz_sweep(fe, -0.45, 0.45, r) for r in rates]
    assert survs[0] > survs[1] > survs[2] > 0.0


def test_survival_oracle_formula(fe):
    rate = 3.3e-3
    expected = math.exp(-math.pi**2 * fe.delta0_ghz**2
                        / (fe.kappa_ghz_per_v * rate))
    assert survival_oracle(fe, rate) == pytest.approx(expected, rel=1e-12)
    p = LZParams.from_ghz(fe.delta0_ghz, fe.kappa_ghz_per_v * rate)
    assert survival_oracle(fe, rate) == lz_probability(p)


def test_lz_sweep_validations(fe):
    with pytest.raises(DomainError):
        lz_sweep(fe, 0.05, 0.45, 0.01)  # no crossing inside
    with pytest.raises(DomainError):
        lz_sweep(fe, -0.01, 0.01, 0.01)  # swept bias spans < 20x the gap
    with pytest.raises(DomainError):
        lz_sweep(fe, -0.45, 0.45, 0.0)
    with pytest.raises(DomainError):
        lz_sweep(fe, -0.45, -0.45, 0.01)


# -- splitting extraction -----------------------------------------------------------


def _gaussian_scan(fe, centers, heights, crossing_bump=0.0):
    v = np.linspace(-0.52, 0.52, 521)
    dev = np.zeros_like(v)
    for c, a in zip(centers, heights):
        dev += a * np.exp(-((v - c) ** 2) / (2.0 * 0.012**2))
    if crossing_bump:
        dev += crossing_bump * np.exp(-(v**2) / (2.0 * 0.012**2))
    return ScanResult(v_dc=v, sz_final=dev, sz_initial=np.zeros_like(v),
                      v_rf=0.42, frequency_ghz=F, t_pump_ns=TP, phase_rad=0.0,
                      params=fe, wall_time_per_point_s=0.0)


def test_extraction_recovers_synthetic_inputs(fe):
    scan = _gaussian_scan(fe,
                          [-0.45, -0.30, -0.15, 0.15, 0.30, 0.45],
                          [0.8, 1.0, 1.2, 1.2, 1.0, 0.8],
                          crossing_bump=1.5)
    rates = [_lz_rate(d) for d in (0.2, 0.5, 1.0)]
    runs = [(r, survival_oracle(fe, r)) for r in rates]
    res = extract_delta(scan, runs)
    assert res.kappa_ghz_per_v == pytest.approx(KAPPA, rel=1e-9)
    assert res.delta_ghz == pytest.approx(fe.delta0_ghz, rel=1e-9)
    for d in res.delta_samples_ghz:
        assert d == pytest.approx(fe.delta0_ghz, rel=1e-9)
    assert res.delta_std_ghz < 1e-6
    assert sorted(res.peak_harmonics) == [1, 1, 2, 2, 3, 3]
    assert len(res.peak_voltages_v) == 6  # the crossing bump was dropped
    assert min(abs(v) for v in res.peak_voltages_v) > 0.1


def test_extraction_handles_suppressed_fundamental(fe):
    # no peaks at +-f/kappa: the harmonic assignment must still land on the
    # true spacing instead of calling the 2nd harmonic the 1st
    scan = _gaussian_scan(fe, [-0.45, -0.30, 0.30, 0.45], [0.9, 1.0, 1.0, 0.9])
    runs = [(_lz_rate(0.5), survival_oracle(fe, _lz_rate(0.5)))]
    res = extract_delta(scan, runs)
    assert res.kappa_ghz_per_v == pytest.approx(KAPPA, rel=1e-6)
    assert sorted(res.peak_harmonics) == [2, 2, 3, 3]
    assert res.delta_ghz == pytest.approx(fe.delta0_ghz, rel=1e-6)


def test_fit_kappa_reduces_scaled_assignments():
    # peak pattern (2f, 3f)/kappa: trying the lowest peak as harmonic 1 must
    # not win with a kappa scaled by an integer factor
    kappa, _std, ns, rms = _fit_kappa(F, [-0.30, -0.45, 0.30, 0.45])
    assert kappa == pytest.approx(KAPPA, rel=1e-12)
    assert sorted(ns) == [2, 2, 3, 3]
    assert rms < 1e-12


def test_extraction_requires_peaks_on_both_sides(fe):
    scan = _gaussian_scan(fe, [0.15, 0.30], [1.2, 1.0])
    with pytest.raises(ExtractionError) as err:
        extract_delta(scan, [(1e-3, 0.5)])
    assert err.value.stage == "peak-detection"


def test_extraction_rejects_bad_ramp_inputs(fe):
    scan = _gaussian_scan(fe,
                          [-0.45, -0.30, -0.15, 0.15, 0.30, 0.45],
                          [0.8, 1.0, 1.2, 1.2, 1.0, 0.8])
    for runs in ([], [(0.0, 0.5)], [(-1e-3, 0.5)], [(1e-3, 0.0)],
                 [(1e-3, 1.0)], [(1e-3, 1.2)]):
        with pytest.raises(ExtractionError) as err:
            extract_delta(scan, runs)
        assert err.value.stage == "lz-inversion"


def test_extraction_summary_is_parseable(fe):
    scan = _gaussian_scan(fe,
                          [-0.45, -0.30, -0.15, 0.15, 0.30, 0.45],
                          [0.8, 1.0, 1.2, 1.2, 1.0, 0.8])
    res = extract_delta(scan, [(_lz_rate(0.5), survival_oracle(fe, _lz_rate(0.5)))])
    summary = res.summary()
    fields = dict(line.split("=", 1) for line in summary.strip().splitlines())
    assert float(fields["delta_ghz"]) == pytest.approx(res.delta_ghz, rel=1e-10)
    assert float(fields["kappa_ghz_per_v"]) == pytest.approx(
        res.kappa_ghz_per_v, rel=1e-10)
    assert [int(n) for n in fields["peak_harmonics"].split(",")] == \
        list(res.peak_harmonics)
