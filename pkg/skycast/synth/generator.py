"""
Skycast Synth - Generator
Synthetic minute-cadence station data with a known latent sky state.

Regimes follow a two-state Markov chain; cloud cover follows a clipped
mean-reverting walk within each regime. CSI responds to the cover
`lead_minutes` earlier, so the observed cover column predicts future
irradiance. A latent disturbance modulates cloudy-sky CSI without
appearing in any observable column.
"""
import logging
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from ..geometry.solar import solar_frame
from ..ingest.csv_parser import load_column_groups
from ..schema.series import TimeSeriesTable
from ..schema.synth import SynthConfig, SynthTruth

logger = logging.getLogger(__name__)

PHYSICAL_COLUMNS = ("ghi", "dni", "dhi", "airmass", "cdoc_total_cloud_cover")
COVER_COLUMN = "cdoc_total_cloud_cover"


def _step_probability(p_per_minute: float, cadence_s: int) -> float:
    return 1.0 - (1.0 - p_per_minute) ** (cadence_s / 60.0)


def _regimes(config: SynthConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """True where the sky is cloudy."""
    p_on = _step_probability(config.p_clear_to_cloudy, config.cadence_s)
    p_off = _step_probability(config.p_cloudy_to_clear, config.cadence_s)
    draws = rng.random(n)
    cloudy = np.empty(n, dtype=bool)
    state = config.initial_regime == "cloudy"
    for i in range(n):
        cloudy[i] = state
        if draws[i] < (p_off if state else p_on):
            state = not state
    return cloudy


def _cover(config: SynthConfig, cloudy: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(cloudy)
    shocks = rng.standard_normal(n)
    cover = np.empty(n)
    level = config.cloudy_cover_mean if cloudy[0] else config.clear_cover_mean
    for i in range(n):
        if cloudy[i]:
            level = min(max(level, 0.0), 100.0)
        else:
            level = min(max(level, 0.0), config.clear_cover_max)
        cover[i] = level
        target = config.cloudy_cover_mean if cloudy[i] else config.clear_cover_mean
        level = level + config.cover_theta * (target - level) + config.cover_sigma * shocks[i]
    return cover


def _disturbance(config: SynthConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance mean-reverting walk scaled by the amplitude."""
    shocks = rng.standard_normal(n)
    theta = config.disturbance_theta
    d = np.empty(n)
    level = 0.0
    scale = np.sqrt(theta * (2.0 - theta))
    for i in range(n):
        d[i] = level
        level = (1.0 - theta) * level + scale * shocks[i]
    return config.disturbance_amplitude * d


def _lagged(values: np.ndarray, steps: int) -> np.ndarray:
    if steps <= 0:
        return values.copy()
    out = np.empty_like(values)
    out[:steps] = values[0]
    out[steps:] = values[:-steps]
    return out


def distractor_columns() -> List[str]:
    groups = load_column_groups()
    names = list(groups.get("bms", [])) + list(groups.get("camera", []))
    return [n for n in names if n not in PHYSICAL_COLUMNS]


def generate(config: SynthConfig = SynthConfig()) -> Tuple[TimeSeriesTable, SynthTruth]:
    """
    Generates a table with every raw station and camera column.

    GHI = CSI x clear-sky GHI; DNI scales the clear-sky beam by the
    CSI above `dni_offset`; DHI closes GHI = DHI + cos(zenith) DNI.
    Columns other than irradiance, airmass and the CDOC cover are
    independent standard-normal distractors.

    Returns:
        (table, truth)
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_days * 86400 // config.cadence_s
    index = pd.date_range(pd.Timestamp(config.start, tz="UTC"), periods=n,
                          freq=pd.Timedelta(seconds=config.cadence_s))

    cloudy = _regimes(config, n, rng)
    cover = _cover(config, cloudy, rng)
    disturbance = _disturbance(config, n, rng)
    lead = int(round(config.lead_minutes * 60 / config.cadence_s))
    effective = config.coupling * _lagged(cover, lead) + (1.0 - config.coupling) * cover

    jitter = np.exp(config.jitter_sigma * rng.standard_normal(n))
    csi = config.attenuation(effective)
    csi = np.where(cloudy, csi * jitter * (1.0 + disturbance), csi)
    csi = np.clip(csi, 0.0, 1.0 + config.enhancement_cap)

    sky = solar_frame(index, config.site)
    ghi_cs = sky["ghi_cs"].to_numpy()
    dni_cs = sky["dni_cs"].to_numpy()
    cos_z = np.clip(np.cos(np.radians(sky["zenith"].to_numpy())), 0.0, None)
    ghi = csi * ghi_cs
    dni = dni_cs * np.clip((csi - config.dni_offset) / (1.0 - config.dni_offset), 0.0, 1.0)
    dhi = np.clip(ghi - cos_z * dni, 0.0, None)

    observed_cover = np.clip(cover + config.cover_noise * rng.standard_normal(n), 0.0, 100.0)
    columns: Dict[str, np.ndarray] = {
        "ghi": ghi,
        "dni": dni,
        "dhi": dhi,
        "airmass": sky["airmass"].to_numpy(),
        COVER_COLUMN: observed_cover,
    }
    for name in distractor_columns():
        columns[name] = rng.standard_normal(n)

    table = TimeSeriesTable.regular(index[0], n, config.cadence_s, columns)
    if config.outage_utc_hour is not None and config.outage_minutes > 0:
        table = _inject_outage(table, config)

    truth = SynthTruth(index, cloudy, cover, effective, disturbance, csi, config)
    logger.info(f"🌤️ Generated {config.n_days} days ({n} rows), cloudy {cloudy.mean():.1%} of the time")
    return table, truth


def _inject_outage(table: TimeSeriesTable, config: SynthConfig) -> TimeSeriesTable:
    """Blanks camera columns for `outage_minutes` from `outage_utc_hour` every day."""
    index = table.timestamps
    minute_of_day = index.hour * 60 + index.minute
    start = config.outage_utc_hour * 60
    blank = np.asarray((minute_of_day >= start) & (minute_of_day < start + config.outage_minutes))
    camera = [c for c in load_column_groups().get("camera", []) if c in table]
    columns = {}
    for name in camera:
        values = table.column(name)
        values[blank] = np.nan
        columns[name] = values
    logger.info(f"⚠️ Injected daily {config.outage_minutes}-minute camera outage at {config.outage_utc_hour:02d}:00 UTC")
    return table.with_columns(columns)


def describe_truth(truth: SynthTruth) -> Dict[str, Any]:
    """
    Regime occupancy, a Gaussian mutual-information proxy between cover
    at t and CSI at t + lead, and the disturbance variance.
    """
    config = truth.config
    cloudy = np.asarray(truth.regime, dtype=bool)
    lead = int(round(config.lead_minutes * 60 / config.cadence_s))
    cover_now = truth.cover[:len(truth.cover) - lead] if lead else truth.cover
    csi_later = truth.csi[lead:]
    r = 0.0
    if len(cover_now) > 1 and np.std(cover_now) > 0 and np.std(csi_later) > 0:
        r = float(np.corrcoef(cover_now, csi_later)[0, 1])
    r2 = min(r * r, 1.0 - 1e-12)
    return {
        "rows": int(len(cloudy)),
        "clear_occupancy": float(1.0 - cloudy.mean()),
        "cloudy_occupancy": float(cloudy.mean()),
        "lead_minutes": config.lead_minutes,
        "cover_csi_correlation": r,
        "mutual_information_proxy": float(-0.5 * np.log(1.0 - r2)),
        "disturbance_variance": float(np.var(truth.disturbance)),
        "csi_mean": float(np.mean(truth.csi)),
    }
