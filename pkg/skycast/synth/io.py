"""
Skycast Synth - IO
Writes a generated dataset: ingest CSV, latent truth sidecar and summary.
"""
import json
import logging
import os
from typing import Dict

import pandas as pd

from ..ingest.csv_parser import write_csv
from ..schema.series import TimeSeriesTable
from ..schema.synth import SynthTruth
from .generator import describe_truth

logger = logging.getLogger(__name__)

DATA_FILE = "synth.csv"
TRUTH_FILE = "truth.parquet"
SUMMARY_FILE = "summary.json"


def write_dataset(table: TimeSeriesTable, truth: SynthTruth, out_dir: str) -> Dict[str, str]:
    """
    Args:
        table: generated observables
        truth: latent state from the same run
        out_dir: destination directory (created)

    Returns:
        {"data": csv path, "truth": parquet path, "summary": json path}
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "data": os.path.join(out_dir, DATA_FILE),
        "truth": os.path.join(out_dir, TRUTH_FILE),
        "summary": os.path.join(out_dir, SUMMARY_FILE),
    }
    write_csv(table, paths["data"])
    truth.to_frame().to_parquet(paths["truth"], engine="pyarrow")
    summary = {"config": truth.config.to_dict(), "truth": describe_truth(truth), "columns": table.column_names}
    with open(paths["summary"], "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
    logger.info(f"✅ Synthetic dataset written to {out_dir}")
    return paths


def read_truth(path: str) -> pd.DataFrame:
    return pd.read_parquet(path, engine="pyarrow")
