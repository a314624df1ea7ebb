"""
Skycast Evaluation Module
Metrics, sky-condition strata and report files.
"""
from .metrics import mae, rmse, nmap, forecast_skill, spearman, autocorrelation_profile, score_row
from .strata import classify, forecast_errors, stratify
from .report import (
    RECORD_COLUMNS,
    records_from,
    records_frame,
    to_records,
    per_horizon_table,
    report,
    density_grid,
    day_overlays,
    strata_frame,
    write_workbook,
    write_report,
)

__all__ = [
    "mae",
    "rmse",
    "nmap",
    "forecast_skill",
    "spearman",
    "autocorrelation_profile",
    "score_row",
    "classify",
    "forecast_errors",
    "stratify",
    "RECORD_COLUMNS",
    "records_from",
    "records_frame",
    "to_records",
    "per_horizon_table",
    "report",
    "density_grid",
    "day_overlays",
    "strata_frame",
    "write_workbook",
    "write_report",
]
