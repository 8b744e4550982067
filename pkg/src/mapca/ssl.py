"""Self-supervised objectives read as metric choices.

Each method is mapped to the metric it implicitly imposes on the
representation covariance; the table reports the condition number of the
resulting effective operator on a given covariance.  Nothing is trained.
"""

from __future__ import annotations

import enum
from typing import List, NamedTuple, Optional

import numpy as np

from .metrics import MetricSpec, correlation_matrix
from .solver import solve_mapca
from .spectra import assert_spd, decompose, matrix_power, symmetric


class SslMethod(enum.Enum):
    STANDARD_PCA = ("Standard PCA", MetricSpec.identity(), 0.0, "lambda_1/lambda_p")
    IPCA = ("IPCA", MetricSpec.diagonal(), None, "kappa_D; strict invariance")
    VICREG_VARIANCE = ("VICReg (var. term)", MetricSpec.diagonal(), None, "marginal correction only")
    BARLOW_TWINS = ("Barlow Twins", MetricSpec.beta_power(1.0), 1.0, "1 (isotropic)")
    ZCA_WHITENING = ("ZCA Whitening", MetricSpec.beta_power(1.0), 1.0, "1 (isotropic)")
    WMSE = ("W-MSE", MetricSpec.inverse_covariance(), -1.0, "(lambda_1/lambda_p)^2 (amplified)")

    def __init__(self, label, implicit_metric, beta_position, behaviour):
        self.label = label
        self.implicit_metric = implicit_metric
        self.beta_position = beta_position
        self.behaviour = behaviour


class SslRow(NamedTuple):
    method: SslMethod
    metric: MetricSpec
    beta: Optional[float]
    kappa: float
    behaviour: str

    def to_dict(self):
        return {
            "method": self.method.label,
            "metric": str(self.metric),
            "beta": self.beta,
            "kappa": self.kappa,
            "behaviour": self.behaviour,
        }


def correspondence_table(sigma) -> List[SslRow]:
    """One row per method, with kappa computed on ``sigma``."""
    sigma = symmetric(sigma)
    assert_spd(sigma)
    rows = []
    for method in SslMethod:
        sol = solve_mapca(sigma, method.implicit_metric)
        rows.append(
            SslRow(method, method.implicit_metric, method.beta_position,
                   sol.condition_number, method.behaviour)
        )
    return rows


def correlation_kappa(sigma):
    lam = decompose(correlation_matrix(sigma)).eigenvalues
    return float(lam[0] / lam[-1])


def wmse_metric_derivation_check(sigma, n_vectors=20, seed=0, tol=1e-9) -> bool:
    """Check numerically that ``v = Sigma^{1/2} u`` has ``v^T Sigma^{-1} v = 1``.

    Uses ``n_vectors`` random unit vectors ``u``.
    """
    sigma = symmetric(sigma)
    assert_spd(sigma)
    root = matrix_power(sigma, 0.5)
    inv = matrix_power(sigma, -1)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n_vectors, sigma.shape[0]))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = u @ root
    q = np.einsum("ij,jk,ik->i", v, inv, v)
    return bool(np.all(np.abs(q - 1.0) <= tol))
