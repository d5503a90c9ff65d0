"""Laboratory for supercritical branching Lévy processes."""

from .errors import (
    BlevError,
    ConditionError,
    ConfigError,
    DegenerateInput,
    DomainError,
    Explosion,
    InsufficientSamples,
    ModelError,
    UnsupportedCondition,
)
from .model import (
    BranchingModel,
    Deterministic,
    FixedConfiguration,
    Gaussian,
    Geometric,
    IidDisplaced,
    Local,
    MotionSpec,
    PointMass,
    PointMasses,
    PoissonPlusOne,
    TwoSidedExponential,
    Zeta,
    binary_bbm,
    drift_only,
    load_model,
    model_from_dict,
    model_from_json,
    model_to_dict,
    zeta_bbm,
)

__version__ = "0.1.0"
