"""Metric-aware PCA: principal components under a general constraint ``W^T M W = I``."""

from .errors import (
    ConvergenceError,
    DegenerateVariableError,
    InputError,
    MapcaError,
    NotPositiveDefiniteError,
    NumericError,
    SingularMetricError,
)
from .spectra import SpectralDecomposition, assert_spd, decompose, matrix_power
from .metrics import MetricMatrix, MetricSpec, build_metric, correlation_matrix
from .solver import MapcaSolution, beta_sweep, condition_number, project, solve_mapca
from .invariance import (
    InvarianceReport,
    Rescaling,
    Verdict,
    check_metric_condition,
    hierarchy_report,
    rescale_covariance,
    verify_invariance,
    verify_uniform_equivariance,
)
from .ssl import SslMethod, correspondence_table, wmse_metric_derivation_check
from .data import Dataset, apply_rescaling, center_and_covariance, load_csv

__version__ = "0.1.0"
