"""
Skycast Synth Module
Synthetic sky generator used as the verification oracle.
"""
from .generator import generate, describe_truth, distractor_columns, PHYSICAL_COLUMNS, COVER_COLUMN
from .io import write_dataset, read_truth

__all__ = [
    "generate",
    "describe_truth",
    "distractor_columns",
    "PHYSICAL_COLUMNS",
    "COVER_COLUMN",
    "write_dataset",
    "read_truth",
]
