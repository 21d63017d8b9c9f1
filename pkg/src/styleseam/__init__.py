"""Paragraph-level multi-author writing style change detection toolkit."""

from .corpus import (
    Difficulty,
    Document,
    ParagraphPair,
    SplitStats,
    TruthRecord,
    build_pairs,
    compute_stats,
    load_documents,
    load_truth,
    split_directory,
)
from .errors import CoverageError, DataError, FormatError, StyleSeamError, UsageError
from .evaluation import ScoreEntry, f1_per_class, macro_f1, read_solutions, write_solutions
from .features import (
    HandcraftedCounts,
    SparseFeatureVector,
    Vocabulary,
    fit_vocabulary,
    handcrafted,
    load_stopwords,
    load_vocabulary,
    pair_features,
    save_vocabulary,
    tfidf_vector,
)
from .model import (
    EnsembleMode,
    LinearModel,
    PredictionRecord,
    TrainConfig,
    ensemble,
    hinge_objective,
    load_external_predictions,
    load_model,
    predict,
    random_baseline,
    save_model,
    save_predictions,
    train_linear_svm,
    warmup_schedule,
)
from .tokenization import (
    PairInput,
    TruncationConfig,
    TruncationStrategy,
    assemble_pair_input,
    tokenize,
    truncate,
    truncate_longest_first,
    truncate_transition,
)

__version__ = "0.1.0"

__all__ = [
    "CoverageError",
    "DataError",
    "Difficulty",
    "Document",
    "EnsembleMode",
    "FormatError",
    "HandcraftedCounts",
    "LinearModel",
    "PairInput",
    "ParagraphPair",
    "PredictionRecord",
    "ScoreEntry",
    "SparseFeatureVector",
    "SplitStats",
    "StyleSeamError",
    "TrainConfig",
    "TruncationConfig",
    "TruncationStrategy",
    "TruthRecord",
    "UsageError",
    "Vocabulary",
    "assemble_pair_input",
    "build_pairs",
    "compute_stats",
    "ensemble",
    "f1_per_class",
    "fit_vocabulary",
    "handcrafted",
    "hinge_objective",
    "load_documents",
    "load_external_predictions",
    "load_model",
    "load_stopwords",
    "load_truth",
    "load_vocabulary",
    "macro_f1",
    "pair_features",
    "predict",
    "random_baseline",
    "read_solutions",
    "save_model",
    "save_predictions",
    "save_vocabulary",
    "split_directory",
    "tfidf_vector",
    "tokenize",
    "train_linear_svm",
    "truncate",
    "truncate_longest_first",
    "truncate_transition",
    "warmup_schedule",
    "write_solutions",
]
