"""Para-fuzzy condition monitoring for electrical-system data-network equipment.

Readings are turned into favourable/unfavourable evidence (mu, lambda), mapped
to certainty and contradiction degrees, classified into one of twelve lattice
states and finally into an operating condition per equipment.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .engine import ParaFuzzyEngine, ParaFuzzyResult, StepSpec, default_engine, evaluate, lattice_sweep
from .evidence import (
    AssociationRule,
    EvidenceOutputSpec,
    NodeSpec,
    VariableSpec,
    categorize,
    combine_reading_pair,
    extract_evidence,
)
from .fuzzy import PiecewiseLinearMembership, defuzzify_centroid, mamdani_infer, membership_at
from .pal2v import (
    CertaintyPoint,
    ControlValues,
    EvidencePair,
    LogicalState,
    compute_degrees,
    negate,
    para_analyser,
)
from .pipeline import (
    NodeResult,
    OperatingCondition,
    SubsystemReport,
    classify_equipment,
    run_node,
    run_subsystem,
    state_to_condition,
)
from .profiles import EquipmentProfile, load_preset, load_profile, preset_names

__all__ = [
    "AssociationRule",
    "CertaintyPoint",
    "ControlValues",
    "EquipmentProfile",
    "EvidenceOutputSpec",
    "EvidencePair",
    "LogicalState",
    "NodeResult",
    "NodeSpec",
    "OperatingCondition",
    "ParaFuzzyEngine",
    "ParaFuzzyResult",
    "PiecewiseLinearMembership",
    "StepSpec",
    "SubsystemReport",
    "VariableSpec",
    "categorize",
    "classify_equipment",
    "combine_reading_pair",
    "compute_degrees",
    "default_engine",
    "defuzzify_centroid",
    "evaluate",
    "extract_evidence",
    "lattice_sweep",
    "load_preset",
    "load_profile",
    "mamdani_infer",
    "membership_at",
    "negate",
    "para_analyser",
    "preset_names",
    "run_node",
    "run_subsystem",
    "state_to_condition",
]
