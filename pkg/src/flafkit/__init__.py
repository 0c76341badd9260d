"""Functional-link adaptive filters in time and frequency domains,
with a nonlinear acoustic echo cancellation benchmark harness."""

from .errors import (
    ConfigError,
    DivergenceError,
    InvalidInputError,
    UnsupportedOperationError,
)
from .expansions import (
    ExpandedFrame,
    Expander,
    ExpansionConfig,
    ExpansionKind,
    predicted_add_count,
    predicted_func_eval_count,
    predicted_mul_count,
)
from .fdaf import FdFlaf, FeatureBranch, FreqBranch
from .metrics import ErleTrace, erle, misalignment
from .pbfdaf import (
    AnalysisReport,
    PartitionedBranch,
    PbFdFlaf,
    estimate_bin_correlation,
    tridiag_condition,
)
from .scenario import (
    NonlinearityKind,
    RirSpec,
    ScenarioConfig,
    ScenarioStream,
    SourceKind,
    ar1_colorize,
    composite_nl,
    generate_rir,
    run_scenario,
    soft_clip,
)
from .spectral import (
    OverlapSaveBuffer,
    Spectrum,
    filter_spectrum,
    forward,
    gradient_constrain,
    inverse,
    os_convolve,
)
from .timedomain import Nlms, SplitFlaf

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "ConfigError",
    "DivergenceError",
    "ErleTrace",
    "ExpandedFrame",
    "Expander",
    "ExpansionConfig",
    "ExpansionKind",
    "FdFlaf",
    "FeatureBranch",
    "FreqBranch",
    "InvalidInputError",
    "Nlms",
    "NonlinearityKind",
    "OverlapSaveBuffer",
    "PartitionedBranch",
    "PbFdFlaf",
    "RirSpec",
    "ScenarioConfig",
    "ScenarioStream",
    "SourceKind",
    "SplitFlaf",
    "Spectrum",
    "UnsupportedOperationError",
    "ar1_colorize",
    "composite_nl",
    "erle",
    "estimate_bin_correlation",
    "filter_spectrum",
    "forward",
    "generate_rir",
    "gradient_constrain",
    "inverse",
    "misalignment",
    "os_convolve",
    "predicted_add_count",
    "predicted_func_eval_count",
    "predicted_mul_count",
    "run_scenario",
    "soft_clip",
    "tridiag_condition",
]
