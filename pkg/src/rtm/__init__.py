"""Referential translation machines for text similarity prediction.

A library for casting judgment tasks (emotion intensity of a text, the
discriminative power of an attribute between two words) as translation
performance prediction: select interpretant sentences close to the task data,
derive n-gram/LM/alignment features between source and target token
sequences, learn stacked regression models over them, and score everything
with a family of relative evaluation metrics.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    DataFormatError,
    IntensityInstance,
    Lexicon,
    TokenSeq,
    TripleInstance,
    extract_ngrams,
    lexicon_to_target,
    load_corpus,
    load_intensity_dataset,
    load_lexicon,
    load_triple_dataset,
    tokenize,
)
from .features import (
    FEATURE_NAMES,
    N_FEATURES,
    AlignmentModel,
    FeatureResources,
    alignment_features,
    build_feature_matrix,
    extract_feature_vector,
    feature_manifest,
    length_features,
    lm_features,
    train_aligner,
    weighted_overlap,
)
from .interpretants import (
    FdaConfig,
    InterpretantSet,
    NGramWeightTable,
    WittenBellLM,
    build_ngram_weights,
    select_interpretants,
    train_language_model,
)
from .learners import (
    AveragedModel,
    ModelSpec,
    Scaler,
    TrainedModel,
    average_top_k,
    cross_validate,
    default_grid,
    fit_model,
    fit_pls,
    fold_indices,
    grid_search,
    select_features,
    small_grid,
    train_adaboost_r2,
    train_extra_trees,
    train_knn,
    train_ridge,
)
from .metrics import (
    MetricConfig,
    MetricReport,
    ScoreStats,
    bws_scores,
    epsilon,
    f1_binary,
    ground_predictions,
    ground_threshold,
    iaa_tau,
    mae_rae,
    maer_mraer,
    mean_ranks,
    metric_report,
    optimize_threshold,
    pearson,
    r_maer_r_mraer,
    rank_error,
    riaa_tau,
    spearman,
    spearman_approx,
)
from .pipeline import RunConfig, RunReport, evaluate_files, parse_config, run_pipeline
from .stacking import (
    LinearCombiner,
    PairedInstance,
    StackConfig,
    StackModel,
    combo_features,
    fit_linear_combiner,
    predict_stack,
    train_combined_stack,
    train_separate_stack,
)
