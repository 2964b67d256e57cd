"""Deterministic simulator for tri-polarized holographic MIMO surface links
in the near field: channel synthesis, interference-eliminating precoders,
power allocation and performance metrics."""

from .channel import (
    PolarizedChannel,
    assemble_channel,
    channel_block,
    dyadic_green,
    radial_coeffs,
    scalar_green,
)
from .config import load_scenario
from .correlation import CorrelationMatrix, dof, im_green0_xx, im_green_image_xx, tp_dof, transmit_correlation
from .errors import (
    CapacityExceededError,
    ConfigError,
    GeometryError,
    PrecoderDegeneracyError,
    SingularityError,
)
from .experiments import figure_preset, se_sweep
from .geometry import NearFieldReport, Scenario, SurfaceSpec, UserPlacement, patch_centers, validate_near_field
from .metrics import (
    capacity,
    capacity_families,
    channel_dof,
    eigen_spectrum,
    sinr,
    spectral_efficiency,
    total_spectral_efficiency,
)
from .numerics import null_projector, pinv, svd_partition
from .polarization import PhaseConfig, PolarizedExcitation, polarization_descriptors
from .power import PowerAllocation, pa1_select, pa2_equal, pa3_two_layer, water_fill
from .precoding import (
    ClusterAssignment,
    PrecoderSet,
    bd_precoder,
    cluster_subchannels,
    cluster_users,
    effective_channel,
    gaussian_elim_precoder,
    two_layer_precoder,
)

__all__ = [
    "PolarizedChannel",
    "assemble_channel",
    "channel_block",
    "dyadic_green",
    "radial_coeffs",
    "scalar_green",
    "load_scenario",
    "CorrelationMatrix",
    "dof",
    "im_green0_xx",
    "im_green_image_xx",
    "tp_dof",
    "transmit_correlation",
    "CapacityExceededError",
    "ConfigError",
    "GeometryError",
    "PrecoderDegeneracyError",
    "SingularityError",
    "figure_preset",
    "se_sweep",
    "NearFieldReport",
    "Scenario",
    "SurfaceSpec",
    "UserPlacement",
    "patch_centers",
    "validate_near_field",
    "capacity",
    "capacity_families",
    "channel_dof",
    "eigen_spectrum",
    "sinr",
    "spectral_efficiency",
    "total_spectral_efficiency",
    "null_projector",
    "pinv",
    "svd_partition",
    "PhaseConfig",
    "PolarizedExcitation",
    "polarization_descriptors",
    "PowerAllocation",
    "pa1_select",
    "pa2_equal",
    "pa3_two_layer",
    "water_fill",
    "ClusterAssignment",
    "PrecoderSet",
    "bd_precoder",
    "cluster_subchannels",
    "cluster_users",
    "effective_channel",
    "gaussian_elim_precoder",
    "two_layer_precoder",
]
