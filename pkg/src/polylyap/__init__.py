"""Polyhedral Lyapunov functions of fixed complexity found by LP-based vertex search."""
from .contraction import (
    ContractionCertificate,
    contraction_gap,
    decay_margins,
    feasible_at_rate,
    sampled_decay_check,
    verify_certificate,
)
from .plants import PlantModel, hull, motor_position_model, motor_speed_model, single, synthesis
from .polytope import VPolytope, check_absorbing, minkowski_dual, minkowski_primal, random_init
from .search import SearchConfig, SearchReport, find_polyhedron, synthesize

__version__ = "0.1.0"

__all__ = [
    "ContractionCertificate",
    "PlantModel",
    "SearchConfig",
    "SearchReport",
    "VPolytope",
    "check_absorbing",
    "contraction_gap",
    "decay_margins",
    "feasible_at_rate",
    "find_polyhedron",
    "hull",
    "minkowski_dual",
    "minkowski_primal",
    "motor_position_model",
    "motor_speed_model",
    "random_init",
    "sampled_decay_check",
    "single",
    "synthesize",
    "synthesis",
    "verify_certificate",
]
