"""Static model of the electrically driven surface-spin two-level system.

The two lowest spin states (S_z = +2 and S_z = -2) form an effective
two-level system. A voltage V applied to the tip displaces the atom by
``dz = lever_arm * V`` (nm), which detunes the diabatic levels linearly and,
optionally, modulates the tunneling splitting:

    eps(V)   = kappa * V + quad_bias * dz^2 + epsilon_offset   (GHz)
    Delta(V) = delta0 [+ 2 * alpha_f24 * dz]                    (GHz)

with ``kappa = 2 * alpha_h * lever_arm`` (GHz/V). The Hamiltonian in the
diabatic basis {|+2>, |-2>} is

    H = -Delta/2 * sigma_x - eps/2 * sigma_z                    (GHz)

All energies are linear frequencies in GHz; time is in ns; the Schrodinger
equation used by the propagator carries an explicit 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# Reference parameter set for an Fe atom on a MgO bilayer: splitting 0.05 GHz,
# bias-displacement coefficient 270 GHz/nm, splitting-displacement coefficient
# (as 24*alpha_F) 1 GHz/nm, lever arm calibrated so the first drive resonance
# at f = 0.5 GHz sits at V_dc = 150 mV.
FE_MGO_DELTA0_GHZ = 0.05
FE_MGO_ALPHA_H_GHZ_PER_NM = 270.0
FE_MGO_ALPHA_F24_GHZ_PER_NM = 1.0
FE_MGO_RESONANCE_V = 0.15
FE_MGO_FREQUENCY_GHZ = 0.5

_CONFIG_KEYS = (
    "delta0_ghz",
    "alpha_h_ghz_per_nm",
    "alpha_f24_ghz_per_nm",
    "lever_arm_nm_per_v",
    "epsilon_offset_ghz",
    "quad_bias_ghz_per_nm2",
    "tunneling_modulation",
)


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the spin-displacement model.

    Parameters
    ----------
    delta0_ghz : float
        Equilibrium tunneling splitting Delta, GHz. Must be > 0.
    alpha_h_ghz_per_nm : float
        Bias-displacement coefficient, GHz per nm of atom displacement.
    alpha_f24_ghz_per_nm : float
        Splitting-displacement coefficient stored as 24*alpha_F (GHz/nm);
        the splitting shifts by 2 * alpha_f24 * dz when
        ``tunneling_modulation`` is enabled.
    lever_arm_nm_per_v : float
        Voltage-to-displacement lever arm lambda, nm/V. Must be > 0.
    epsilon_offset_ghz : float
        Static bias offset absorbing the zero-field splitting terms, GHz.
    quad_bias_ghz_per_nm2 : float
        Optional quadratic bias coefficient, GHz/nm^2 (default 0).
    tunneling_modulation : bool
        Enable the linear modulation of the splitting by displacement.
    """

    delta0_ghz: float = FE_MGO_DELTA0_GHZ
    alpha_h_ghz_per_nm: float = FE_MGO_ALPHA_H_GHZ_PER_NM
    alpha_f24_ghz_per_nm: float = FE_MGO_ALPHA_F24_GHZ_PER_NM
    lever_arm_nm_per_v: float = field(default=FE_MGO_FREQUENCY_GHZ
                                      / (2.0 * FE_MGO_ALPHA_H_GHZ_PER_NM
                                         * FE_MGO_RESONANCE_V))
    epsilon_offset_ghz: float = 0.0
    quad_bias_ghz_per_nm2: float = 0.0
    tunneling_modulation: bool = False

    def __post_init__(self):
        for name in _CONFIG_KEYS[:-1]:
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        object.__setattr__(self, "tunneling_modulation", bool(self.tunneling_modulation))
        if self.delta0_ghz <= 0.0:
            raise DomainError(f"delta0_ghz must be > 0, got {self.delta0_ghz}")
        if self.alpha_h_ghz_per_nm <= 0.0:
            raise DomainError(f"alpha_h_ghz_per_nm must be > 0, got {self.alpha_h_ghz_per_nm}")
        if self.lever_arm_nm_per_v <= 0.0:
            raise DomainError(f"lever_arm_nm_per_v must be > 0, got {self.lever_arm_nm_per_v}")

    @property
    def kappa_ghz_per_v(self) -> float:
        """Linear bias-per-voltage coefficient kappa = 2 alpha_h lambda, GHz/V."""
        return 2.0 * self.alpha_h_ghz_per_nm * self.lever_arm_nm_per_v

    @classmethod
    def calibrated(cls, resonance_voltage_v: float, frequency_ghz: float,
                   harmonic: int = 1, **kwargs) -> "ModelParams":
        """Build params with the lever arm fixed by a measured resonance.

        The n-th drive resonance sits at V_n = n * f / kappa, so observing
        harmonic ``n`` at ``resonance_voltage_v`` for drive ``frequency_ghz``
        pins kappa = n * f / V_n and hence the lever arm
        lambda = kappa / (2 * alpha_h). This is the only place a tip-geometry
        length scale enters the model.
        """
        if resonance_voltage_v <= 0.0 or frequency_ghz <= 0.0 or harmonic < 1:
            raise DomainError(
                "calibration requires resonance_voltage_v > 0, frequency_ghz > 0, "
                f"harmonic >= 1; got {resonance_voltage_v}, {frequency_ghz}, {harmonic}")
        alpha_h = float(kwargs.get("alpha_h_ghz_per_nm", FE_MGO_ALPHA_H_GHZ_PER_NM))
        if not math.isfinite(alpha_h) or alpha_h <= 0.0:
            raise DomainError(f"alpha_h_ghz_per_nm must be > 0, got {alpha_h!r}")
        kappa = harmonic * frequency_ghz / resonance_voltage_v
        kwargs["lever_arm_nm_per_v"] = kappa / (2.0 * alpha_h)
        return cls(**kwargs)

    @classmethod
    def fe_mgo(cls, **overrides) -> "ModelParams":
        """Reference Fe/MgO parameter set (splitting 0.05 GHz, resonance at 150 mV)."""
        base = dict(delta0_ghz=FE_MGO_DELTA0_GHZ,
                    alpha_h_ghz_per_nm=FE_MGO_ALPHA_H_GHZ_PER_NM,
                    alpha_f24_ghz_per_nm=FE_MGO_ALPHA_F24_GHZ_PER_NM)
        base.update(overrides)
        if "lever_arm_nm_per_v" in base:
            return cls(**base)
        return cls.calibrated(FE_MGO_RESONANCE_V, FE_MGO_FREQUENCY_GHZ, **base)

    def with_updates(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    # -- flat key=value config ------------------------------------------------

    @classmethod
    def from_config(cls, path) -> "ModelParams":
        """Load params from a flat key=value text file.

        Unknown keys and malformed lines raise DomainError; '#' starts a
        comment; booleans accept true/false/1/0/yes/no.
        """
        values = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DomainError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
                key, _, text = line.partition("=")
                key = key.strip()
                text = text.strip()
                if key not in _CONFIG_KEYS:
                    raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
                if key == "tunneling_modulation":
                    lowered = text.lower()
                    if lowered in ("true", "1", "yes"):
                        values[key] = True
                    elif lowered in ("false", "0", "no"):
                        values[key] = False
                    else:
                        raise DomainError(f"{path}:{lineno}: bad boolean {text!r}")
                else:
                    try:
                        values[key] = float(text)
                    except ValueError as exc:
                        raise DomainError(f"{path}:{lineno}: bad number {text!r}") from exc
        return cls(**values)

    def to_config(self) -> str:
        """Serialize to the flat key=value format accepted by from_config."""
        lines = []
        for key in _CONFIG_KEYS:
            value = getattr(self, key)
            if isinstance(value, bool):
                lines.append(f"{key} = {'true' if value else 'false'}")
            else:
                lines.append(f"{key} = {value!r}")
        return "\n".join(lines) + "\n"


# -- drive protocols ---------------------------------------------------------


@dataclass(frozen=True)
class DriveProtocol:
    """Time dependence of the tip voltage.

    Three kinds:

    * ``cw``    : V(t) = v_dc + v_rf * sin(2 pi f t + phase) for all t
    * ``pulse`` : sinusoid as above for t < t_pump, then V = v_dc
    * ``ramp``  : V(t) = v_start + sweep_rate * t for t in [0, duration]

    Build through the classmethods; the constructor validates whichever
    fields the kind uses.
    """

    kind: str
    v_dc: float = 0.0
    v_rf: float = 0.0
    frequency_ghz: float = 0.0
    phase_rad: float = 0.0
    t_pump_ns: float = math.inf
    v_start: float = 0.0
    sweep_rate_v_per_ns: float = 0.0
    duration_ns: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cw", "pulse", "ramp"):
            raise DomainError(f"unknown drive kind {self.kind!r}")
        if self.kind in ("cw", "pulse"):
            _require_finite("v_dc", self.v_dc)
            _require_finite("v_rf", self.v_rf)
            _require_finite("frequency_ghz", self.frequency_ghz)
            _require_finite("phase_rad", self.phase_rad)
            if self.v_rf < 0.0:
                raise DomainError(f"v_rf must be >= 0, got {self.v_rf}")
            if self.frequency_ghz <= 0.0:
                raise DomainError(f"frequency_ghz must be > 0, got {self.frequency_ghz}")
            if self.kind == "pulse":
                if not (self.t_pump_ns >= 0.0) or math.isinf(self.t_pump_ns):
                    raise DomainError(f"t_pump_ns must be finite and >= 0, got {self.t_pump_ns}")
        else:
            _require_finite("v_start", self.v_start)
            _require_finite("sweep_rate_v_per_ns", self.sweep_rate_v_per_ns)
            _require_finite("duration_ns", self.duration_ns)
            if self.duration_ns <= 0.0:
                raise DomainError(f"duration_ns must be > 0, got {self.duration_ns}")

    @classmethod
    def cw(cls, v_dc: float, v_rf: float, frequency_ghz: float,
           phase_rad: float = 0.0) -> "DriveProtocol":
        return cls(kind="cw", v_dc=v_dc, v_rf=v_rf, frequency_ghz=frequency_ghz,
                   phase_rad=phase_rad)

    @classmethod
    def pulse(cls, v_dc: float, v_rf: float, frequency_ghz: float,
              t_pump_ns: float, phase_rad: float = 0.0) -> "DriveProtocol":
        return cls(kind="pulse", v_dc=v_dc, v_rf=v_rf, frequency_ghz=frequency_ghz,
                   phase_rad=phase_rad, t_pump_ns=t_pump_ns)

    @classmethod
    def linear_ramp(cls, v_start: float, sweep_rate_v_per_ns: float,
                    duration_ns: float) -> "DriveProtocol":
        return cls(kind="ramp", v_start=v_start,
                   sweep_rate_v_per_ns=sweep_rate_v_per_ns, duration_ns=duration_ns)

    def voltage(self, t):
        """Instantaneous tip voltage at time t (ns). Accepts arrays."""
        t = np.asarray(t, dtype=float)
        if self.kind == "ramp":
            v = self.v_start + self.sweep_rate_v_per_ns * t
        else:
            v = self.v_dc + self.v_rf * np.sin(
                TWO_PI * self.frequency_ghz * t + self.phase_rad)
            if self.kind == "pulse":
                v = np.where(t < self.t_pump_ns, v, self.v_dc)
        return float(v) if v.ndim == 0 else v

    def initial_voltage(self) -> float:
        """Voltage at t = 0 with the rf term excluded for cw/pulse drives.

        The preparation step turns on the dc bias first, so the initial
        adiabatic state is evaluated at V = v_dc (at V = v_start for ramps).
        """
        return self.v_start if self.kind == "ramp" else self.v_dc


# -- model operations --------------------------------------------------------


def displacement(params: ModelParams, v):
    """Atom displacement dz (nm) produced by tip voltage v (V)."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("voltage must be finite")
    out = params.lever_arm_nm_per_v * v
    return float(out) if out.ndim == 0 else out


def bias(params: ModelParams, v):
    """Detuning eps(V) (GHz) between the diabatic levels at voltage v (V)."""
    dz = displacement(params, v)
    out = (2.0 * params.alpha_h_ghz_per_nm * np.asarray(dz)
           + params.quad_bias_ghz_per_nm2 * np.square(dz)
           + params.epsilon_offset_ghz)
    return float(out) if out.ndim == 0 else out


def tunneling(params: ModelParams, dz):
    """Tunneling splitting Delta (GHz) at displacement dz (nm)."""
    dz = np.asarray(dz, dtype=float)
    if not np.all(np.isfinite(dz)):
        raise DomainError("displacement must be finite")
    if params.tunneling_modulation:
        out = params.delta0_ghz + 2.0 * params.alpha_f24_ghz_per_nm * dz
    else:
        out = np.broadcast_to(params.delta0_ghz, dz.shape).copy() if dz.ndim else np.asarray(params.delta0_ghz)
    return float(out) if out.ndim == 0 else out


def hamiltonian(params: ModelParams, protocol: DriveProtocol,
                t_ns: float) -> np.ndarray:
    """Instantaneous 2x2 Hamiltonian (GHz), diabatic basis {|+2>, |-2>}.

    Returns the Hermitian traceless matrix -Delta/2 sigma_x - eps/2 sigma_z
    evaluated at the protocol voltage V(t); requires t >= 0.
    """
    t = float(t_ns)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"t_ns must be finite and >= 0, got {t_ns!r}")
    v = protocol.voltage(t)
    eps = bias(params, v)
    delta = tunneling(params, displacement(params, v))
    return np.array([[-0.5 * eps, -0.5 * delta],
                     [-0.5 * delta, 0.5 * eps]], dtype=complex)


def adiabatic_levels(params: ModelParams, v):
    """Adiabatic level energies (GHz) at voltage v: (-Omega/2, +Omega/2).

    Omega = sqrt(Delta^2 + eps^2) is the instantaneous level splitting; the
    two branches form an avoided crossing of gap Delta at eps = 0.
    """
    eps = np.asarray(bias(params, v))
    delta = np.asarray(tunneling(params, displacement(params, v)))
    half = 0.5 * np.hypot(delta, eps)
    if half.ndim == 0:
        return -float(half), float(half)
    return -half, half


def kernel_coefficients(params: ModelParams):
    """Scalars consumed by the propagation kernels.

    Returns (delta0, dmod, kappa, eps0, quadv) such that, as functions of
    voltage, Delta(v) = delta0 + dmod * v and
    eps(v) = kappa * v + quadv * v^2 + eps0.
    """
    lever = params.lever_arm_nm_per_v
    dmod = 2.0 * params.alpha_f24_ghz_per_nm * lever if params.tunneling_modulation else 0.0
    quadv = params.quad_bias_ghz_per_nm2 * lever * lever
    return (params.delta0_ghz, dmod, params.kappa_ghz_per_v,
            params.epsilon_offset_ghz, quadv)
