"""Delocalized eta invariants of model operators on covers, and the
group-theoretic constants (growth, separation) that control their limits."""

__version__ = "0.1.0"

from .conjugacy import ConjClass, conj_class
from .eta import EtaResult, QuadraturePlan, converge_tower, eta_quadrature, eta_spectral_oracle, tail_cutoff
from .groups import FinGenGroup, GroupElement, ball_count, word_length
from .growth import GrowthConstants, estimate_growth_rate, sigma_constants
from .quotients import FiniteQuotient, QuotientTower, is_conjugate_in_quotient
from .separation import GroupAlgebraElement, algebra_trace, injective_radius, pushforward, separation_rate
from .spectral import CoverSpec, GapError, ModelOperator, heat_kernel, spectrum_on_cover

__all__ = [
    "ConjClass",
    "CoverSpec",
    "EtaResult",
    "FinGenGroup",
    "FiniteQuotient",
    "GapError",
    "GroupAlgebraElement",
    "GroupElement",
    "GrowthConstants",
    "ModelOperator",
    "QuadraturePlan",
    "QuotientTower",
    "algebra_trace",
    "ball_count",
    "conj_class",
    "converge_tower",
    "estimate_growth_rate",
    "eta_quadrature",
    "eta_spectral_oracle",
    "heat_kernel",
    "injective_radius",
    "is_conjugate_in_quotient",
    "pushforward",
    "separation_rate",
    "sigma_constants",
    "spectrum_on_cover",
    "tail_cutoff",
    "word_length",
]
