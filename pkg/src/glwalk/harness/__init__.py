"""Config-driven experiment harness and CLI."""

from .config import ConfigError, ExperimentConfig, load_config
from .csvio import emit_csv, format_value, read_csv
from .runs import (
    RUNNERS,
    coeff_samples,
    run_berry_esseen,
    run_bias,
    run_check,
    run_edgeworth,
    run_sandwich,
    run_spectral,
    run_walk,
)
