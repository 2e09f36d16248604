"""Closed-form expressions for sweep survival and fast-driving interference.

Two analytic results complement the numerical propagator and serve as
oracles for it:

* the single-passage survival probability of a linear sweep through the
  avoided crossing, ``lz_probability``;
* the fast-driving flip probability of the sinusoidally driven system,
  ``fast_drive_probability``, a sum of harmonic terms weighted by Bessel
  functions whose nodes and resonance positions organize the interference
  pattern.

Everything here works in linear-frequency units (GHz, ns, volts). The
Bessel evaluator is self-contained (power series plus downward recurrence)
so the package needs no special-function dependency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .model import ModelParams, DriveProtocol, TWO_PI

BESSEL_MAX_ORDER = 200
BESSEL_MAX_ARG = 1.0e3

_SERIES_X_MAX = 8.0
_MILLER_ACC = 40.0
_RESCALE_THRESHOLD = 1.0e100

# below this ratio of crossing sweep rate to squared gap the closed-form
# fast-driving sum is known to degrade; warn, do not fail
FAST_DRIVE_MIN_RATIO = 10.0


@dataclass(frozen=True)
class LZParams:
    """Inputs of the single-passage survival formula.

    ``delta`` is the gap (coupling) and ``bias_sweep_rate`` the rate of
    change of the bias at the crossing. The closed form
    exp(-pi delta^2 / (2 rate)) takes both at face value, which is the
    hbar = 1 angular-unit convention. Numbers quoted in linear-frequency
    GHz must be converted through :meth:`from_ghz` (a factor 2 pi on each
    field); the exponent then reduces to -pi^2 delta_ghz^2 / rate_ghz.
    """

    delta: float
    bias_sweep_rate: float

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta < 0.0:
            raise DomainError(f"delta must be finite and >= 0, got {self.delta!r}")
        if not math.isfinite(self.bias_sweep_rate) or self.bias_sweep_rate <= 0.0:
            raise DomainError("bias_sweep_rate must be finite and > 0 "
                              f"(adiabatic limit must be taken explicitly), "
                              f"got {self.bias_sweep_rate!r}")

    @property
    def delta_l(self) -> float:
        """Dimensionless adiabaticity parameter delta^2 / (4 rate)."""
        return self.delta * self.delta / (4.0 * self.bias_sweep_rate)

    @classmethod
    def from_ghz(cls, delta_ghz: float, rate_ghz_per_ns: float) -> "LZParams":
        """Build from linear-frequency inputs (gap in GHz, rate in GHz/ns)."""
        return cls(TWO_PI * delta_ghz, TWO_PI * rate_ghz_per_ns)


def lz_probability(p: LZParams) -> float:
    """Probability of a diabatic (non-adiabatic) passage through the crossing.

    Returns exp(-pi delta^2 / (2 bias_sweep_rate)) = exp(-2 pi delta_l).
    A gapless crossing passes diabatically with certainty; a slow sweep is
    exponentially suppressed.
    """
    return math.exp(-math.pi * p.delta * p.delta / (2.0 * p.bias_sweep_rate))


def _bessel_series(n: int, x: float) -> float:
    # ascending series around x = 0; n >= 0, x > 0
    half = 0.5 * x
    log_t0 = n * math.log(half) - math.lgamma(n + 1.0)
    if log_t0 < -745.0:
        return 0.0
    term = math.exp(log_t0)
    total = term
    ratio_base = -half * half
    for k in range(1, 400):
        term *= ratio_base / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) + 1e-300:
            break
    return total


def _bessel_miller(n: int, x: float) -> float:
    # downward three-term recurrence from a start order well above both the
    # target order and the argument, normalized by 1 = J_0 + 2 sum J_{2k}
    m0 = max(n, int(math.ceil(x)))
    m = m0 + int(math.sqrt(_MILLER_ACC * (m0 + 1))) + 20
    if m % 2:
        m += 1
    j_up = 0.0
    j_cur = 1.0e-30
    norm = 2.0 * j_cur if m > 0 else j_cur
    target = j_cur if n == m else 0.0
    for k in range(m, 0, -1):
        j_down = (2.0 * k / x) * j_cur - j_up
        j_up = j_cur
        j_cur = j_down
        if abs(j_cur) > _RESCALE_THRESHOLD:
            j_cur *= 1.0e-100
            j_up *= 1.0e-100
            norm *= 1.0e-100
            target *= 1.0e-100
        order = k - 1
        if order == n:
            target = j_cur
        if order > 0 and order % 2 == 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return target / norm


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x), integer order.

    Valid for |n| <= 200 and |x| <= 1e3, absolute error below 1e-12.
    Satisfies J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    exactly by reduction.
    """
    if isinstance(n, float):
        if not n.is_integer():
            raise DomainError(f"order must be an integer, got {n!r}")
        n = int(n)
    if not isinstance(n, int):
        raise DomainError(f"order must be an integer, got {n!r}")
    if abs(n) > BESSEL_MAX_ORDER:
        raise DomainError(f"|order| must be <= {BESSEL_MAX_ORDER}, got {n}")
    x = float(x)
    if not math.isfinite(x) or abs(x) > BESSEL_MAX_ARG:
        raise DomainError(f"|x| must be finite and <= {BESSEL_MAX_ARG:g}, got {x!r}")

    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0.0:
        x = -x
        if n % 2:
            sign = -sign
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_X_MAX:
        return sign * _bessel_series(n, x)
    return sign * _bessel_miller(n, x)


@dataclass(frozen=True)
class ResonanceSpec:
    """One harmonic term of the fast-driving sum, evaluated at a drive point.

    ``n`` is the harmonic index; ``omega`` the drive angular frequency
    (rad/ns, = 2 pi f); ``gamma_v`` the voltage-to-angular-bias coupling
    (rad/ns per volt, = 2 pi kappa); ``v_rf`` the drive amplitude (V);
    ``gamma_n_ghz`` the flip matrix element Delta J_n(kappa V_rf / f);
    ``omega_n_ghz`` the generalized flip frequency
    sqrt((n f - kappa V_dc)^2 + gamma_n^2), both in GHz.
    """

    n: int
    omega: float
    gamma_v: float
    v_rf: float
    gamma_n_ghz: float
    omega_n_ghz: float

    @property
    def weight(self) -> float:
        """Peak term amplitude gamma_n^2 / omega_n^2 (the 1-cos factor spans [0, 2])."""
        if self.omega_n_ghz == 0.0:
            return 0.0
        r = self.gamma_n_ghz / self.omega_n_ghz
        return r * r


def _check_fast_drive_inputs(params: ModelParams, protocol: DriveProtocol,
                             n_max: Optional[int]) -> int:
    if protocol.kind not in ("cw", "pulse"):
        raise DomainError("fast-driving closed form applies to cw and pulse "
                          f"drives only, got {protocol.kind!r}")
    if n_max is None:
        kappa = params.kappa_ghz_per_v
        span = kappa * (abs(protocol.v_dc) + protocol.v_rf) / protocol.frequency_ghz
        n_max = int(math.ceil(span)) + 10
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    return n_max


def _eq_terms(params: ModelParams, protocol: DriveProtocol, n_max: int):
    f = protocol.frequency_ghz
    kappa = params.kappa_ghz_per_v
    delta = params.delta0_ghz
    arg = kappa * protocol.v_rf / f
    detune = kappa * protocol.v_dc
    for n in range(-n_max, n_max + 1):
        g = delta * bessel_j(n, arg)
        om = math.hypot(n * f - detune, g)
        yield n, g, om


def _warn_if_slow(params: ModelParams, protocol: DriveProtocol) -> None:
    delta = params.delta0_ghz
    ratio = (params.kappa_ghz_per_v * protocol.v_rf * TWO_PI
             * protocol.frequency_ghz) / (delta * delta)
    if ratio < FAST_DRIVE_MIN_RATIO:
        warnings.warn(
            f"crossing sweep rate is only {ratio:.3g}x the squared gap "
            f"(< {FAST_DRIVE_MIN_RATIO:g}); the fast-driving closed form may "
            "be inaccurate here", stacklevel=3)


def fast_drive_probability(params: ModelParams, protocol: DriveProtocol,
                           t_ns: float, n_max: Optional[int] = None) -> float:
    """Fast-driving flip probability at time t under a sinusoidal drive.

    Sums (gamma_n^2 / 2 omega_n^2)(1 - cos(2 pi omega_n t)) over harmonics
    n = -n_max..n_max, with gamma_n = Delta J_n(kappa V_rf / f) and
    omega_n = sqrt((n f - kappa V_dc)^2 + gamma_n^2), all in GHz. The sum
    assumes the system starts in the diabatic state that is the ground
    state at the operating bias, a strictly linear bias (the static offset
    and quadratic term are outside this closed form), and, for pulse
    drives, t within the pump window. n_max defaults to
    ceil(kappa (|V_dc| + V_rf) / f) + 10, past which the Bessel weights are
    negligible.

    The raw sum is an approximation and can overshoot slightly; values are
    clamped to [0, 1] with a warning when the excess is beyond 1e-6. A
    warning (not an error) is issued when the drive is too slow or weak for
    the approximation. See ``fast_drive_dominant`` for the single-term
    resonant value.
    """
    t = float(t_ns)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"t_ns must be finite and >= 0, got {t_ns!r}")
    n_max = _check_fast_drive_inputs(params, protocol, n_max)
    _warn_if_slow(params, protocol)
    total = 0.0
    for _n, g, om in _eq_terms(params, protocol, n_max):
        if om == 0.0:
            continue
        w = (g * g) / (2.0 * om * om)
        total += w * (1.0 - math.cos(TWO_PI * om * t))
    if total > 1.0 + 1e-6:
        warnings.warn(f"fast-driving sum exceeds 1 by {total - 1.0:.3g}; "
                      "clamping to 1", stacklevel=2)
    return min(max(total, 0.0), 1.0)


def fast_drive_dominant(params: ModelParams, protocol: DriveProtocol,
                        t_ns: float, n_max: Optional[int] = None) -> tuple[int, float]:
    """Largest single harmonic term of the fast-driving sum at time t.

    Near an isolated resonance the dominant term alone, which reaches 1
    exactly on resonance, is the better estimate of the flip probability;
    the raw sum double-counts the wings of neighboring terms. Returns
    (harmonic index, term value).
    """
    t = float(t_ns)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"t_ns must be finite and >= 0, got {t_ns!r}")
    n_max = _check_fast_drive_inputs(params, protocol, n_max)
    best_n, best_val = 0, 0.0
    for n, g, om in _eq_terms(params, protocol, n_max):
        if om == 0.0:
            continue
        val = (g * g) / (2.0 * om * om) * (1.0 - math.cos(TWO_PI * om * t))
        if val > best_val:
            best_n, best_val = n, val
    return best_n, best_val


def gamma_n(params: ModelParams, protocol: DriveProtocol, n: int) -> float:
    """Flip matrix element of harmonic n: Delta * J_n(kappa V_rf / f), GHz."""
    arg = params.kappa_ghz_per_v * protocol.v_rf / protocol.frequency_ghz
    return params.delta0_ghz * bessel_j(n, arg)


def resonance_table(params: ModelParams, protocol: DriveProtocol,
                    n_max: Optional[int] = None) -> list[ResonanceSpec]:
    """Per-harmonic couplings and flip frequencies at a drive operating point."""
    n_max = _check_fast_drive_inputs(params, protocol, n_max)
    omega = TWO_PI * protocol.frequency_ghz
    gamma_v = TWO_PI * params.kappa_ghz_per_v
    return [ResonanceSpec(n=n, omega=omega, gamma_v=gamma_v,
                          v_rf=protocol.v_rf, gamma_n_ghz=g, omega_n_ghz=om)
            for n, g, om in _eq_terms(params, protocol, n_max)]


def resonance_voltages(params: ModelParams, frequency_ghz: float,
                       n_max: int) -> list[float]:
    """DC voltages of the interference resonances n f = kappa V_dc.

    Returns V_n = n f / kappa for n = 1..n_max together with the mirrored
    negatives, in ascending order. Assumes the strictly linear bias of the
    fast-driving analysis (zero static offset).
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    f = float(frequency_ghz)
    if not math.isfinite(f) or f <= 0.0:
        raise DomainError(f"frequency_ghz must be > 0, got {frequency_ghz!r}")
    kappa = params.kappa_ghz_per_v
    if kappa <= 0.0:
        raise DomainError("resonance voltages require kappa > 0")
    positives = [n * f / kappa for n in range(1, n_max + 1)]
    return [-v for v in reversed(positives)] + positives
