"""Height-dependent line-of-sight probability for air-to-ground mmWave links.

Modules
-------
scenario
    Built-up environment parameters and the four standard presets.
theoretical
    Product model over the buildings crossed by the link.
parametric
    Closed-form breakpoint/decay model and its published coefficients.
fitting
    Least-squares fit of the parametric model to the product model.
geosim
    Monte Carlo occlusion simulator (compiled kernel with Python fallback).
fresnel
    First Fresnel zone geometry.
curves
    Shared curve type, comparisons and CSV export.
"""
from .curves import ProbabilityCurve, max_abs_gap
from .errors import DomainError, FitError, GridMismatchError
from .kernels import BACKEND
from .parametric import ParametricCoeffs, table2_preset
from .scenario import BuiltUpScenario, ScenarioPreset, preset
from .theoretical import LinkGeometry, los_probability, los_probability_curve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BuiltUpScenario",
    "DomainError",
    "FitError",
    "GridMismatchError",
    "LinkGeometry",
    "ParametricCoeffs",
    "ProbabilityCurve",
    "ScenarioPreset",
    "los_probability",
    "los_probability_curve",
    "max_abs_gap",
    "preset",
    "table2_preset",
]
