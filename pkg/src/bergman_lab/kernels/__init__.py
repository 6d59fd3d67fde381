"""Kernel evaluations for the ball and the half-space."""

from ._dispatch import HAVE_COMPILED, backend_name, get_backend, set_backend
from .ball import (
    K_CAP,
    NEAR_BOUNDARY_Q,
    KernelSpec,
    SeriesTruncation,
    SeriesValue,
    ball_kernel,
    halfspace_kernel,
    poisson_ball,
    poisson_ball_rt,
    poisson_partial_sums,
    q_beta_bound,
    q_beta_bound_qt,
    q_beta_series,
    q_beta_values,
    qbeta_pick_k,
    qbeta_tail_bound,
)
from .halfspace import (
    dt_poisson_ut,
    poisson_constant,
    poisson_halfspace,
    poisson_halfspace_ut,
    q_m,
    q_m_bound,
    q_m_bound_values,
    q_m_values,
)
from .zonal import ZonalTable, zonal, zonal_sequence, zonal_table

__all__ = [
    "HAVE_COMPILED",
    "backend_name",
    "get_backend",
    "set_backend",
    "K_CAP",
    "NEAR_BOUNDARY_Q",
    "KernelSpec",
    "SeriesTruncation",
    "SeriesValue",
    "ball_kernel",
    "halfspace_kernel",
    "poisson_ball",
    "poisson_ball_rt",
    "poisson_partial_sums",
    "q_beta_bound",
    "q_beta_bound_qt",
    "q_beta_series",
    "q_beta_values",
    "qbeta_pick_k",
    "qbeta_tail_bound",
    "dt_poisson_ut",
    "poisson_constant",
    "poisson_halfspace",
    "poisson_halfspace_ut",
    "q_m",
    "q_m_bound",
    "q_m_bound_values",
    "q_m_values",
    "ZonalTable",
    "zonal",
    "zonal_sequence",
    "zonal_table",
]
