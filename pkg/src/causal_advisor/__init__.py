"""Causal discovery and counterfactual recommendation toolkit."""

from .datagen import (
    FeatureParams,
    GeneratedBundle,
    SurrogateConfig,
    SynthConfig,
    generate_chain_synthetic,
    generate_student_surrogate,
    random_dag,
    random_linear_scm,
    sample_from_scm,
)
from .dataio import (
    load_csv,
    load_graph,
    load_knowledge,
    load_normalization,
    load_scm,
    save_csv,
    save_graph,
    save_normalization,
    save_scm,
)
from .discovery import GesConfig, PcConfig, ges_discover, pc_discover
from .effects import AteResult, backdoor_adjustment_set, estimate_ate
from .errors import (
    CausalAdvisorError,
    CycleError,
    DataValidationError,
    DegenerateCorrelationError,
    DuplicateHeaderError,
    EmptyFileError,
    InsufficientSampleError,
    InvalidQueryError,
    IoError,
    KnowledgeConflictError,
    MissingValueError,
    NumericalError,
    OrientationConflictWarning,
    ParseError,
    RankDeficiencyError,
    SingularMatrixError,
    SizeMismatchError,
    UnknownColumnError,
    UnknownNodeError,
    ZeroEffectError,
    ZeroVarianceError,
)
from .graphs import (
    BackgroundKnowledge,
    MixedGraph,
    ancestors,
    d_separated,
    dag_to_cpdag,
    descendants,
    shd,
    topological_sort,
)
from .scm import (
    CounterfactualResult,
    Intervention,
    LinearScm,
    NodeEquation,
    Observation,
    abduct_noise,
    composite_coefficient,
    counterfactual,
    fit_linear_scm,
    intervene,
    recommend_min_change,
    solve_required_intervention,
)
from .stats import (
    CiTestResult,
    Dataset,
    NormalizationRecord,
    OlsFit,
    correlation_matrix,
    fisher_z_ci_test,
    ols_fit,
    partial_correlation,
    zscore_normalize,
)

__version__ = "0.1.0"
