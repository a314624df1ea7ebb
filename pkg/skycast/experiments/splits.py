"""
Skycast Experiments - Splits
Rolling train/validate date ranges and the window counts inside them.
"""
import logging
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..config import SplitConfig
from ..errors import ConfigError, DataError
from ..schema.experiments import SplitPlan, SplitStep
from ..schema.series import WindowSet

logger = logging.getLogger(__name__)

STEP_DESCRIPTIONS = ("Time and irradiance representations", "Input time horizon", "Feature importance")


def _utc(value) -> pd.Timestamp:
    ts = pd.Timestamp(value)
    return ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")


def _description(i: int) -> str:
    return STEP_DESCRIPTIONS[i] if i < len(STEP_DESCRIPTIONS) else f"Step {i + 1}"


def _explicit_steps(splits: SplitConfig) -> SplitPlan:
    """Steps given as inclusive calendar dates, e.g. {"train": ["2017-09-27", "2019-09-26"], ...}."""
    steps = []
    for i, item in enumerate(splits.steps):
        try:
            train = (_utc(item["train"][0]), _utc(item["train"][1]) + pd.Timedelta(days=1))
            validate = (_utc(item["validate"][0]), _utc(item["validate"][1]) + pd.Timedelta(days=1))
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise ConfigError(f"Split step {i + 1} is malformed: {e}")
        if validate[0] != train[1]:
            raise ConfigError(f"Split step {i + 1}: validation must start the day after training ends")
        if train[1] <= train[0] or validate[1] <= validate[0]:
            raise ConfigError(f"Split step {i + 1} has an empty range")
        steps.append(SplitStep(item.get("name", f"step{i + 1}"), train, validate,
                               item.get("description", _description(i))))
    return SplitPlan(steps)


def _rolling_steps(splits: SplitConfig, span_start: pd.Timestamp) -> SplitPlan:
    start = _utc(splits.start) if splits.start else span_start.normalize()
    steps = []
    for i in range(splits.n_steps):
        train_end = start + pd.Timedelta(days=splits.initial_train_days + i * splits.validate_days)
        validate_end = train_end + pd.Timedelta(days=splits.validate_days)
        steps.append(SplitStep(f"step{i + 1}", (start, train_end), (train_end, validate_end), _description(i)))
    return SplitPlan(steps)


def make_splits(splits: SplitConfig, span: Tuple) -> SplitPlan:
    """
    Builds the rolling plan: every step trains from the common start up to
    where its validation range begins, and each step's validation range
    follows the previous one.

    Args:
        splits: explicit steps, or start / initial_train_days / validate_days / n_steps
        span: (first, last) timestamp of the data

    Raises:
        ConfigError: malformed explicit steps
        DataError: the data does not cover the plan; the shortfall is named
    """
    first, last = _utc(span[0]), _utc(span[1])
    if splits.steps:
        plan = _explicit_steps(splits)
    else:
        if splits.n_steps < 1 or splits.initial_train_days < 1 or splits.validate_days < 1:
            raise ConfigError("splits need n_steps, initial_train_days and validate_days >= 1")
        plan = _rolling_steps(splits, first)

    needed_start = plan[0].train_range[0]
    needed_end = plan[len(plan) - 1].validate_range[1]
    if needed_start < first.normalize():
        raise DataError(f"Data starts {first.date()} but the splits start {needed_start.date()}")
    # Half-open end: the last covered day ends at midnight after `last`.
    covered_end = last.normalize() + pd.Timedelta(days=1)
    if needed_end > covered_end:
        shortfall = (needed_end - covered_end) / pd.Timedelta(days=1)
        raise DataError(f"Splits need data until {needed_end.date()}, data ends {last.date()}: "
                        f"{shortfall:g} days short")
    logger.info(f"📅 {len(plan)} split steps from {needed_start.date()} to {needed_end.date()}")
    return plan


def in_range(ws: WindowSet, bounds: Tuple[pd.Timestamp, pd.Timestamp]) -> np.ndarray:
    """Windows whose whole input and horizon span lies in [start, end)."""
    t0 = ws.t0s.asi8
    lookback = (ws.input_len - 1) * ws.input_spacing_s * 1_000_000_000
    ahead = (max(ws.horizon_offsets) if ws.horizon_offsets else 0) * 1_000_000_000
    start, end = bounds[0].value, bounds[1].value
    return (t0 - lookback >= start) & (t0 + ahead < end)


def split_windows(ws: WindowSet, step: SplitStep) -> Tuple[WindowSet, WindowSet]:
    return ws.subset(in_range(ws, step.train_range)), ws.subset(in_range(ws, step.validate_range))


def fill_counts(plan: SplitPlan, ws: WindowSet) -> SplitPlan:
    """Sets train/validate window counts on every step in place."""
    for step in plan:
        step.train_count = int(in_range(ws, step.train_range).sum())
        step.validate_count = int(in_range(ws, step.validate_range).sum())
    return plan


def select_step(plan: SplitPlan, index: Optional[int]) -> SplitStep:
    """Step by position; negative positions count from the end."""
    if index is None:
        index = len(plan) - 1
    try:
        return plan[index]
    except IndexError:
        raise ConfigError(f"Split step {index} does not exist ({len(plan)} steps)")
