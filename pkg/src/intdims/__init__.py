"""Interpolated box-to-Hausdorff dimensions of concentric-sphere sets,
polynomial spirals, and attenuated topologist's sine curves.

Closed-form profiles (``formula``), deterministic set sampling (``setlib``),
constructive two-scale cover upper bounds (``covergen``), mass-distribution
lower-bound certificates (``massdist``), and empirical box-counting
estimation (``boxcount``), plus a reproducible CLI (``cli``).
"""

from . import boxcount, covergen, formula, massdist, setlib
from ._kernels import NUMBA_ENABLED
from .boxcount import count_boxes, estimate_dimension, two_scale_estimate
from .covergen import build_theorem_cover, cover_cost, enumerate_grid_cover, sphere_cover_count, upper_dim_estimate
from .formula import (
    DimensionProfile,
    ThetaGrid,
    dim_attenuated,
    dim_concentric,
    dim_elliptical,
    dim_fp,
    dim_isolated_lower_density,
    dim_isolated_upper,
    dim_product_sine,
    dim_spiral,
    formula_value,
    identity_checks,
)
from .massdist import (
    build_lambda_lift,
    build_mu_concentric,
    build_mu_points_example,
    build_mu_sine,
    sphere_area_constant,
    verify_mass_distribution,
)
from .setlib import CountRule, PointCloud, RadiusSequence, SetSpec, gap_count_A, membership_residual, radius_term, sample

__version__ = "0.1.0"
