"""Exact negative/positive dependence checks for finitely supported measures."""

from .errors import *  # noqa: F401,F403
from .measure_core import (
    DiscreteMeasure,
    Polynomial,
    Table,
    build_measure,
    covariance,
    cube_grid,
    cube_measure,
    induce_grid,
    marginal,
    mix,
    moment,
    point_mass,
    product_measure,
    translate_scale,
    tv_distance,
    weak_neighborhood_contains,
)
from .monotone_lattice import MonotoneTable, Poset, UpSet, enumerate_upsets, is_upset, layer_cake, random_monotone
from .dependence_checks import DependenceReport, fkg_report, na_interior_margin, na_report, nc_report, pa_report

__version__ = "0.1.0"
