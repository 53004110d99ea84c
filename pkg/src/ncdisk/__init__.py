"""Exact computer algebra for the noncommutative formal disk."""

from .atiyah import BilinearMap, BilinearMapForm, cech_difference, coboundary_solve, omega2_extract
from .autgrp import (
    CommAutomorphism,
    NCAutomorphism,
    aut_abelianize,
    aut_compose,
    aut_invert,
    aut_validate,
)
from .chart import Gauge, GKForm, compose_gauges, de_rham, gauge_gk, random_gauge, tautological_gk
from .dga import BaseForm, BasePoly, DGAElement, dga_format, dga_parse
from .derlie import NCDerivation, der_apply, der_bracket, der_exp, der_graded_dim
from .errors import NCDiskError
from .lcs import (
    DimensionTable,
    GradedSubspace,
    ci_thickening_dims,
    ideal_closure,
    lcs_component,
    lcs_ideal_component,
    lcs_ideal_table,
    lcs_quotient_table,
)
from .ncconn import (
    ConnectionData,
    apply_D,
    connection_from_gk,
    flat_sections,
    flatness_check,
    validate_twisted_shape,
)
from .ncseries import (
    CommSeries,
    NCSeries,
    series_abelianize,
    series_add,
    series_commutator,
    series_format,
    series_mul,
    series_parse,
    series_substitute,
)

__version__ = "0.1.0"
