"""Entanglement distribution with separable carriers: states, measures and verifiers."""

from .correlations import (
    EXACT,
    LOWER,
    UPPER,
    BoundReport,
    Certificate,
    DiscordEstimator,
    MeasurementBasis,
    OptimizerOpts,
    REEEstimator,
    SeparableEnsemble,
    discord,
    discord_sep_bound,
    ree,
    ree_flag_eval,
    ree_lower_bound,
)
from .infotheory import (
    coherent_information,
    conditional_entropy,
    mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from .qstate import (
    CapabilityError,
    CutSpec,
    DensityMatrix,
    PureState,
    StateError,
    UnitaryOp,
    apply_unitary,
    cnot,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    project_subsystem,
    tensor,
)
from .separability import PptVerdict, SchmidtData, example1_admissible, ppt_check, schmidt, vt_threshold

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "LOWER",
    "UPPER",
    "BoundReport",
    "Certificate",
    "DiscordEstimator",
    "MeasurementBasis",
    "OptimizerOpts",
    "REEEstimator",
    "SeparableEnsemble",
    "discord",
    "discord_sep_bound",
    "ree",
    "ree_flag_eval",
    "ree_lower_bound",
    "coherent_information",
    "conditional_entropy",
    "mutual_information",
    "relative_entropy",
    "von_neumann_entropy",
    "CapabilityError",
    "CutSpec",
    "DensityMatrix",
    "PureState",
    "StateError",
    "UnitaryOp",
    "apply_unitary",
    "cnot",
    "partial_trace",
    "partial_transpose",
    "permute_subsystems",
    "project_subsystem",
    "tensor",
    "PptVerdict",
    "SchmidtData",
    "example1_admissible",
    "ppt_check",
    "schmidt",
    "vt_threshold",
]
