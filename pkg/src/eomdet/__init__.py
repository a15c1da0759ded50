"""Microwave photodetection through an electro-opto-mechanical converter."""
from .detector import DetectorModel, detected_photons, eta_eff, thermal_counts
from .params import (
    DerivedSystem,
    PhysicalParams,
    coherence_margin,
    derive,
    from_cooperativities,
    from_couplings,
    thermal_occupation,
    with_cooperativities,
)
from .pulse import GaussianPulse, converted_photons, input_spectrum, noise_density, output_spectrum
from .scattering import ScatteringRow, b_coeff_dc, scattering_row, sum_rule_defect
from .sweep import GridSpec, efficiency_surface, find_min_cooperativity, ratio_surface

__version__ = "0.1.0"
