"""Subspace-based user scheduling for heterogeneous multiuser MIMO."""

from ._hetsched import (
    Arrangement,
    ConfigError,
    Experiment,
    InfeasibleError,
    Realization,
    candidate_score,
    capacity_bounds,
    chordal_distance,
    criteria,
    criterion_snr_scale,
    delta_capacity,
    geometrical_angle_cos2,
    group_capacity,
    numerical_rank,
    outage_quantile,
    preset_names,
    principal_angles,
    schedule,
    schedulers,
    subspace_collinearity,
    total_power_for,
    waterfill,
)

__all__ = [
    "Arrangement",
    "ConfigError",
    "Experiment",
    "InfeasibleError",
    "Realization",
    "candidate_score",
    "capacity_bounds",
    "chordal_distance",
    "criteria",
    "criterion_snr_scale",
    "delta_capacity",
    "geometrical_angle_cos2",
    "group_capacity",
    "numerical_rank",
    "outage_quantile",
    "preset_names",
    "principal_angles",
    "schedule",
    "schedulers",
    "subspace_collinearity",
    "total_power_for",
    "waterfill",
]
