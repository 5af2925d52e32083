"""Decoherence factor and two-mode photon correlations of a dressed Ising chain."""

from .spectrum import (
    ChainConfig,
    DressedSector,
    PhysicalParams,
    PhysicalReport,
    build_k_grid,
    build_sector,
    build_sector_table,
    dressed_lambda,
    epsilon,
    eta_from_physical,
    theta,
)
from .decoherence import (
    BoundParams,
    CoeffQuad,
    ComplexSeries,
    coeffs,
    cutoff_weight,
    decay_bound,
    r_factor,
    r_series,
    r_squared_fk,
    r_values,
    short_time_cutoff,
)
from .correlations import (
    CorrelationResult,
    FieldState,
    SectorTable,
    correlation_series,
    first_order,
    g2,
    g2_specialized,
    intensity,
    needed_sectors,
    second_order,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "ChainConfig",
    "CoeffQuad",
    "ComplexSeries",
    "CorrelationResult",
    "DressedSector",
    "FieldState",
    "PhysicalParams",
    "PhysicalReport",
    "SectorTable",
    "build_k_grid",
    "build_sector",
    "build_sector_table",
    "coeffs",
    "correlation_series",
    "cutoff_weight",
    "decay_bound",
    "dressed_lambda",
    "epsilon",
    "eta_from_physical",
    "first_order",
    "g2",
    "g2_specialized",
    "intensity",
    "needed_sectors",
    "r_factor",
    "r_series",
    "r_squared_fk",
    "r_values",
    "second_order",
    "short_time_cutoff",
    "theta",
]
