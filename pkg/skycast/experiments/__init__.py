"""
Skycast Experiments Module
Rolling splits, training pipeline, sweeps, importance and reference values.
"""
from .splits import make_splits, fill_counts, in_range, split_windows, select_step
from .pipeline import (
    Dataset,
    TrainedModel,
    CellJob,
    load_table,
    feature_set_specs,
    prepare_dataset,
    dataset_windows,
    train_model,
    forecast_arrays,
    evaluate_windows,
    train_cell,
)
from .sweeps import (
    derive_seed,
    run_cells,
    sweep_representations,
    sweep_sequence_length,
    noise_ablation,
    results_frame,
    representation_grid,
    fss_table,
    ablation_table,
)
from .importance import permutation_importance, importance_histogram
from .analysis import representation_autocorrelation

__all__ = [
    "make_splits",
    "fill_counts",
    "in_range",
    "split_windows",
    "select_step",
    "Dataset",
    "TrainedModel",
    "CellJob",
    "load_table",
    "feature_set_specs",
    "prepare_dataset",
    "dataset_windows",
    "train_model",
    "forecast_arrays",
    "evaluate_windows",
    "train_cell",
    "derive_seed",
    "run_cells",
    "sweep_representations",
    "sweep_sequence_length",
    "noise_ablation",
    "results_frame",
    "representation_grid",
    "fss_table",
    "ablation_table",
    "permutation_importance",
    "importance_histogram",
    "representation_autocorrelation",
]
