"""SimBA: three-phase benchmark matrix analysis.

stalk censuses pairwise dataset and model relationships, prowl discovers a
representative dataset subset that preserves model ranking, and pounce trains
regressors that predict held-out model scores from the subset alone.
"""

from .benchio import (
    Benchmark,
    ModelSplit,
    RawBenchmark,
    check_complete,
    load_benchmark,
    normalize_scores,
    perturb_with_noise,
    split_models,
)
from .errors import (
    ConfigError,
    DegenerateChanceError,
    DegenerateFitError,
    IncompleteMatrixError,
    InsufficientDataError,
    ParseError,
    SchemaError,
    SimbaError,
    SplitError,
)
from .perfpredict import (
    KFoldStability,
    KNNScorePredictor,
    MLPScorePredictor,
    MseCurve,
    Predictor,
    PredictorSpec,
    RidgeScorePredictor,
    auc_mse,
    kfold_stability,
    mse_curve,
    predict_scores,
    train_predictor,
)
from .relate import (
    FitResult,
    Relationship,
    RelationshipCensus,
    RelationshipVerdict,
    classify_relationship,
    compare_all_datasets,
    compare_all_models,
    fit_pair_regression,
)
from .repset import (
    CoverageCurve,
    RepresentativeSubsetSelector,
    SelectionTrace,
    baseline_order,
    coverage,
    coverage_curve,
    coverage_gain,
    discover_representative,
    mean_win_rate,
    proportion_vs_random,
    proxy_coverage,
    random_baseline_curves,
    sc_auc,
    smallest_covering_prefix,
)
from .simmeasure import (
    Measure,
    SimilarityMatrix,
    column_similarity,
    similarity_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "ConfigError",
    "CoverageCurve",
    "DegenerateChanceError",
    "DegenerateFitError",
    "FitResult",
    "IncompleteMatrixError",
    "InsufficientDataError",
    "KFoldStability",
    "KNNScorePredictor",
    "MLPScorePredictor",
    "Measure",
    "ModelSplit",
    "MseCurve",
    "ParseError",
    "Predictor",
    "PredictorSpec",
    "RawBenchmark",
    "Relationship",
    "RelationshipCensus",
    "RelationshipVerdict",
    "RepresentativeSubsetSelector",
    "RidgeScorePredictor",
    "SchemaError",
    "SelectionTrace",
    "SimbaError",
    "SimilarityMatrix",
    "SplitError",
    "auc_mse",
    "baseline_order",
    "check_complete",
    "classify_relationship",
    "column_similarity",
    "compare_all_datasets",
    "compare_all_models",
    "coverage",
    "coverage_curve",
    "coverage_gain",
    "discover_representative",
    "fit_pair_regression",
    "kfold_stability",
    "load_benchmark",
    "mean_win_rate",
    "mse_curve",
    "normalize_scores",
    "perturb_with_noise",
    "predict_scores",
    "proportion_vs_random",
    "proxy_coverage",
    "random_baseline_curves",
    "sc_auc",
    "similarity_matrix",
    "smallest_covering_prefix",
    "split_models",
    "train_predictor",
]
