"""Stochastic Boussinesq simulator with partial diffusion on the periodic torus."""

from ._core import (
    BlowUpError,
    DimensionError,
    Error,
    Grid,
    IoError,
    LinearModeOracle,
    RunConfig,
    ValidationError,
    __version__,
    biot_savart,
    control_cost,
    curl_2d,
    cutoff,
    divergence,
    ensemble,
    gradient_sup,
    initial_state,
    leray_project,
    loglog_slope,
    lp_norm,
    minimize_cost,
    mollify,
    normal,
    parse_config,
    parse_config_string,
    rare_event,
    read_snapshot,
    simulate,
    skeleton,
    small_noise_distance,
    smoothing_gain_bound,
    sobolev_norm,
    varadhan_table,
    write_snapshot,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
