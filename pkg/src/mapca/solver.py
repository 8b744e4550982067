"""The generalized eigenproblem ``Sigma w = lambda M w``.

It is reduced to a standard symmetric problem on the effective operator
``A = M^{-1/2} Sigma M^{-1/2}``: with ``A u = lambda u`` the loadings are
``w = M^{-1/2} u``, which automatically satisfy ``W^T M W = I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from .errors import DimensionMismatchError
from .metrics import MetricMatrix, MetricSpec, build_metric
from .spectra import DEGENERACY_TOL, SpectralDecomposition, decompose, fix_signs, symmetric


@dataclass(frozen=True)
class EffectiveOperator:
    a: np.ndarray
    decomposition: SpectralDecomposition


@dataclass(frozen=True)
class MapcaSolution:
    eigenvalues: np.ndarray
    loadings: np.ndarray
    metric: MetricMatrix
    condition_number: float
    variance_explained: np.ndarray
    degenerate: np.ndarray
    effective: EffectiveOperator

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def residuals(self, sigma):
        """Max-abs of ``Sigma w_i - lambda_i M w_i`` and of ``W^T M W - I``."""
        sigma = symmetric(sigma)
        w = self.loadings
        m = self.metric.m
        eig = np.max(np.abs(sigma @ w - (m @ w) * self.eigenvalues))
        ortho = np.max(np.abs(w.T @ m @ w - np.eye(self.dim)))
        return float(eig), float(ortho)


def _kappa(eigenvalues, tol=DEGENERACY_TOL):
    lam_max = float(eigenvalues[0])
    lam_min = float(eigenvalues[-1])
    if lam_max > 0 and lam_max - lam_min <= tol * lam_max:
        return 1.0
    if not lam_min > 0:
        return math.inf
    return lam_max / lam_min


def solve_mapca(sigma, metric) -> MapcaSolution:
    """Solve MAPCA for covariance ``sigma`` under ``metric``.

    ``metric`` is a :class:`MetricMatrix`, or a :class:`MetricSpec` / metric
    string which is then built from ``sigma``.  ``sigma`` may be singular;
    only the metric has to be strictly positive definite.
    """
    sigma = symmetric(sigma)
    if not isinstance(metric, MetricMatrix):
        metric = build_metric(sigma, metric)
    if metric.m.shape != sigma.shape:
        raise DimensionMismatchError(
            f"metric shape {metric.m.shape} does not match covariance shape {sigma.shape}"
        )

    s = metric.inverse_sqrt
    a = symmetric(s @ sigma @ s)
    spec = decompose(a)
    lam = spec.eigenvalues
    w = s @ spec.eigenvectors
    signed = fix_signs(w)
    # keep u and w sign-consistent so w = M^{-1/2} u still holds
    flips = np.where(np.sum(signed * w, axis=0) < 0, -1.0, 1.0)
    spec = SpectralDecomposition(lam, spec.eigenvectors * flips, spec.sweeps)

    total = float(np.sum(lam))
    explained = lam / total if total != 0 else np.zeros_like(lam)
    return MapcaSolution(
        eigenvalues=lam,
        loadings=signed,
        metric=metric,
        condition_number=_kappa(lam),
        variance_explained=explained,
        degenerate=spec.degenerate(),
        effective=EffectiveOperator(a=a, decomposition=spec),
    )


def condition_number(solution: MapcaSolution) -> float:
    """``lambda_max / lambda_min`` of the effective spectrum.

    Returns ``math.inf`` when the smallest eigenvalue is not positive, and
    exactly 1.0 when the whole spectrum is one degenerate cluster.
    """
    return _kappa(solution.eigenvalues)


class SweepRow(NamedTuple):
    beta: float
    kappa: float
    eigenvalues: np.ndarray


def beta_sweep(sigma, betas) -> List[SweepRow]:
    """Solve under ``Sigma**beta`` for each beta, in the order given."""
    sigma = symmetric(sigma)
    rows = []
    for beta in betas:
        sol = solve_mapca(sigma, MetricSpec.beta_power(beta))
        rows.append(SweepRow(float(beta), sol.condition_number, sol.eigenvalues))
    return rows


def project(data, solution: MapcaSolution, k=None) -> np.ndarray:
    """Scores ``data @ W[:, :k]``; ``data`` should already be centred."""
    data = np.asarray(data, dtype=np.float64)
    p = solution.dim
    if data.ndim != 2 or data.shape[1] != p:
        raise DimensionMismatchError(f"data has shape {data.shape}, expected (n, {p})")
    if k is None:
        k = p
    if not 0 <= k <= p:
        raise DimensionMismatchError(f"k={k} must lie in [0, {p}]")
    return data @ solution.loadings[:, :k]
