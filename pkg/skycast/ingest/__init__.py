"""
Skycast Ingest Module
CSV parsing, gap detection, window assembly and the window cache.
"""
from .csv_parser import parse_csv, write_csv, load_column_mapping, load_column_groups
from .gaps import detect_gaps, gap_profile, missing_mask
from .windows import build_windows, DEFAULT_HORIZONS_S
from .cache import save_window_cache, load_window_cache

__all__ = [
    "parse_csv",
    "write_csv",
    "load_column_mapping",
    "load_column_groups",
    "detect_gaps",
    "gap_profile",
    "missing_mask",
    "build_windows",
    "DEFAULT_HORIZONS_S",
    "save_window_cache",
    "load_window_cache",
]
