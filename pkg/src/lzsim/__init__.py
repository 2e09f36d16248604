"""Simulator and analysis toolkit for a voltage-driven two-level spin.

A single surface spin whose two lowest states form a tunneling-split
doublet is steered by the voltage of a scanning tip: the dc bias detunes
the doublet, an rf component drives repeated passages through the avoided
crossing, and the resulting interference (resonance fringes, Bessel-node
suppression) plus linear-ramp survival probabilities let the tunneling
splitting be extracted from purely electric measurements. This package
propagates the driven dynamics with a norm-preserving exponential
integrator, provides the matching closed forms, runs the standard
measurement protocols, and ships a CLI for reproducible file runs.
"""

from .errors import DomainError, ExtractionError, IntegrationError
from .model import (DriveProtocol, ModelParams, TWO_PI, adiabatic_levels,
                    bias, displacement, hamiltonian, kernel_coefficients,
                    tunneling)
from .propagator import (IntegratorOptions, SpinState, Trajectory, evolve,
                         expectation_sz, free_ringing_period)
from .analytic import (LZParams, ResonanceSpec, bessel_j,
                       fast_drive_dominant, fast_drive_probability, gamma_n,
                       lz_probability, resonance_table, resonance_voltages)
from .experiments import (DeltaExtraction, HeatMap, ScanResult, dc_scan,
                          extract_delta, lz_sweep, map2d, pulse_trace,
                          render_heatmap_svg, survival_oracle)
from .kernels import backend_name

__version__ = "0.1.0"

__all__ = [
    "DomainError", "ExtractionError", "IntegrationError",
    "DriveProtocol", "ModelParams", "TWO_PI", "adiabatic_levels", "bias",
    "displacement", "hamiltonian", "kernel_coefficients", "tunneling",
    "IntegratorOptions", "SpinState", "Trajectory", "evolve",
    "expectation_sz", "free_ringing_period",
    "LZParams", "ResonanceSpec", "bessel_j", "fast_drive_dominant",
    "fast_drive_probability", "gamma_n", "lz_probability", "resonance_table",
    "resonance_voltages",
    "DeltaExtraction", "HeatMap", "ScanResult", "dc_scan", "extract_delta",
    "lz_sweep", "map2d", "pulse_trace", "render_heatmap_svg",
    "survival_oracle",
    "backend_name", "__version__",
]
