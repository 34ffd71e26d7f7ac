"""Plane-wave fast Gauss transform."""

from ._core import (
    BoxSolution,
    PeriodicSeries,
    PwQuadrature,
    box_transform,
    direct_transform,
    fgt_points,
    gauss_cutoff,
    gen_charges,
    gen_points,
    nufft_type1,
    nufft_type2,
    periodic_params,
    pw_kernel_eval,
    pw_params,
)

__all__ = [
    "BoxSolution",
    "PeriodicSeries",
    "PwQuadrature",
    "box_transform",
    "direct_transform",
    "fgt_points",
    "gauss_cutoff",
    "gen_charges",
    "gen_points",
    "nufft_type1",
    "nufft_type2",
    "periodic_params",
    "pw_kernel_eval",
    "pw_params",
]
