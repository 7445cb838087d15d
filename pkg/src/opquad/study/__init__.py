"""Convergence studies and their presets."""
from .harness import StudyConfig, StudyReport, StudyRow, run_study, classify_trend, reference_value
from .presets import PRESETS, preset
