"""Convolution, rearrangement and Lorentz norms on finite commutative hypergroups."""
from .hypergroup import (
    AxiomError,
    AxiomReport,
    HaarWeights,
    HypergroupTable,
    StructureError,
    build_family,
    compute_haar,
    conjugacy,
    convolve,
    cyclic,
    family_instance,
    orbit_negation,
    product_of_cyclics,
    translate,
    validate_hypergroup,
)
from .norms import LorentzParams, embedding_gap, lebesgue_norm, lorentz_norm
from .potential import GrowthSpace, RieszParams, riesz_kernel, riesz_potential, synth_growth_space, validate_quasimetric
from .steps import MaximalFunction, StepFunction, decreasing_rearrangement, distribution, maximal, rearrangement, tail_product_integral
from .verify import CheckResult, SuiteConfig, run_suite

__all__ = [name for name in dir() if not name.startswith("_")]
