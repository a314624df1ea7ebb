"""
Skycast Schema Module
Data models for tables, sites, features, networks, experiments and reports.
"""
from .targets import TargetRepresentation, DecodeContext
from .series import TimeSeriesTable, GapReport, Window, WindowArrays, WindowSet
from .site import SiteConfig, SolarPosition, SunEvents, ClearSkyIrradiance, GOLDEN
from .features import TransformKind, FeatureSpec, FeatureMatrix, Normalization
from .network import NetworkConfig, NoiseMode, TrainingConfig
from .experiments import SplitStep, SplitPlan, SweepResult, ImportanceEntry, ImportanceReport
from .evaluation import ForecastRecord, MetricsReport, StratumSummary
from .synth import SynthConfig, SynthTruth
from .manifest import RunManifest

__all__ = [
    "TargetRepresentation",
    "DecodeContext",
    "TimeSeriesTable",
    "GapReport",
    "Window",
    "WindowArrays",
    "WindowSet",
    "SiteConfig",
    "SolarPosition",
    "SunEvents",
    "ClearSkyIrradiance",
    "GOLDEN",
    "TransformKind",
    "FeatureSpec",
    "FeatureMatrix",
    "Normalization",
    "NetworkConfig",
    "NoiseMode",
    "TrainingConfig",
    "SplitStep",
    "SplitPlan",
    "SweepResult",
    "ImportanceEntry",
    "ImportanceReport",
    "ForecastRecord",
    "MetricsReport",
    "StratumSummary",
    "SynthConfig",
    "SynthTruth",
    "RunManifest",
]
