"""Stimulated emission of superradiant atoms in a 1-D waveguide.

Simulates N collectively coupled two-level atoms, initially all excited,
driven by a coherent-state pulse, and reports output photon statistics,
phase-preserving gain and quadrature noise of the amplified pulse.
"""

from .exceptions import ModeMismatch, PhaseLeak, SingularAmplitude, StepTooLarge
from .model import PulseSpec, Shape, SystemConfig, envelope, mean_input_photons, pulse_area_check
from .dicke import CollectiveState, TimeSeries, apply_generator, evolve, expect_Jm, expect_JpJm, expect_Jz
from .regression import CorrelationSlab, TwoTimeGrid, assemble_two_time, evolve_slab, seed_slab
from .metrics import (
    AmplifierReport,
    ModeFunction,
    QuadratureReport,
    emission_probabilities,
    gain_and_snr,
    mode_function,
    output_moments,
    photon_numbers,
    project_mode,
    simulate,
)
from .oracles import (
    long_pulse_reference,
    pacs_coherent_number,
    short_pulse_reference,
    single_atom_regression,
)

__version__ = "0.1.0"

__all__ = [
    "AmplifierReport",
    "CollectiveState",
    "CorrelationSlab",
    "ModeFunction",
    "ModeMismatch",
    "PhaseLeak",
    "PulseSpec",
    "QuadratureReport",
    "Shape",
    "SingularAmplitude",
    "StepTooLarge",
    "SystemConfig",
    "TimeSeries",
    "TwoTimeGrid",
    "apply_generator",
    "assemble_two_time",
    "emission_probabilities",
    "envelope",
    "evolve",
    "evolve_slab",
    "expect_Jm",
    "expect_JpJm",
    "expect_Jz",
    "gain_and_snr",
    "long_pulse_reference",
    "mean_input_photons",
    "mode_function",
    "output_moments",
    "pacs_coherent_number",
    "photon_numbers",
    "project_mode",
    "pulse_area_check",
    "seed_slab",
    "short_pulse_reference",
    "simulate",
    "single_atom_regression",
]
