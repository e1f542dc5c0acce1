"""Exact bosonic / fermionic interference statistics for small linear interferometers."""

from .bunching import (
    BunchingReport,
    bunching_probability,
    bunching_report,
    collision_free_mass,
    full_bunching_probability,
    full_bunching_ratio,
    hom_invert,
    predicted_ratio_mixture,
    theoretical_ratio,
)
from .circuit import CircuitSpec, Coupler, PhaseShifter, build_unitary, make_preset, qft_tritter
from .ensemble import EnsembleReport, birthday_formula, haar_ensemble_scan
from .matrix import check_unitary, haar_sample, load_unitary, multiply, save_unitary
from .permanent import determinant, permanent, permanent_glynn, permanent_naive, permanent_ryser
from .photonic import (
    InputSpec,
    Model,
    enumerate_outputs,
    output_distribution,
    scattering_submatrix,
    transition_probability,
)

__version__ = "0.1.0"
