"""Checks of scale invariance under positive diagonal rescaling ``X -> XC``.

Strict invariance means the rescaled problem has the same eigenvalues and
loadings ``C^{-1} w_i``.  That happens exactly when the metric built from
``C Sigma C`` equals ``C M C``; :func:`check_metric_condition` tests that
condition directly and :func:`verify_invariance` tests its consequence by
solving both problems.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np

from .errors import DimensionMismatchError, InputError
from .metrics import MetricSpec, as_spec, build_metric
from .solver import MapcaSolution, solve_mapca
from .spectra import symmetric

STRICT_TOL = 1e-8
CONDITION_TOL = 1e-9
DIRECTION_TOL = 1e-8
UNIFORM_TOL = 1e-12


class Verdict(str, enum.Enum):
    STRICT = "StrictInvariant"
    DIRECTION = "DirectionInvariant"
    NOT = "NotInvariant"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text):
        key = str(text).replace("_", "").replace("-", "").lower()
        for v in cls:
            if key in (v.value.lower(), v.name.lower()):
                return v
        names = ", ".join(v.value for v in cls)
        raise InputError(f"unknown verdict {text!r}; expected one of {names}")


@dataclass(frozen=True)
class Rescaling:
    scales: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.scales, dtype=np.float64).reshape(-1)
        if c.size == 0:
            raise InputError("rescaling needs at least one scale")
        if not np.all(np.isfinite(c)) or not np.all(c > 0):
            raise InputError(f"rescaling factors must be finite and positive, got {c.tolist()}")
        object.__setattr__(self, "scales", c)

    @classmethod
    def uniform(cls, c, p):
        return cls(np.full(p, float(c)))

    @classmethod
    def identity(cls, p):
        return cls(np.ones(p))

    @property
    def dim(self):
        return self.scales.shape[0]

    @property
    def is_uniform(self):
        return float(self.scales.max() / self.scales.min()) - 1.0 <= UNIFORM_TOL

    @property
    def matrix(self):
        return np.diag(self.scales)

    @property
    def inverse(self):
        return 1.0 / self.scales


def as_rescaling(c) -> Rescaling:
    return c if isinstance(c, Rescaling) else Rescaling(c)


def rescale_covariance(sigma, c) -> np.ndarray:
    """Covariance of ``XC``: entry (i, j) becomes ``c_i c_j Sigma_ij``."""
    sigma = symmetric(sigma)
    c = as_rescaling(c)
    if c.dim != sigma.shape[0]:
        raise DimensionMismatchError(
            f"{c.dim} scales given for a {sigma.shape[0]}-variable covariance"
        )
    return np.outer(c.scales, c.scales) * sigma


def _condition(metric, metric_t, c):
    cmc = np.outer(c.scales, c.scales) * metric.m
    scale = float(np.max(np.abs(cmc)))
    residual = float(np.max(np.abs(metric_t.m - cmc))) / scale
    return residual <= CONDITION_TOL, residual


def check_metric_condition(sigma, spec, c) -> Tuple[bool, float]:
    """Test ``M(C Sigma C) == C M(Sigma) C``.

    Returns the verdict and the residual ``||M~ - CMC||_max / ||CMC||_max``.
    """
    sigma = symmetric(sigma)
    spec = as_spec(spec)
    c = as_rescaling(c)
    return _condition(build_metric(sigma, spec), build_metric(rescale_covariance(sigma, c), spec), c)


@dataclass
class InvarianceReport:
    metric_spec: MetricSpec
    rescaling: Rescaling
    eigenvalue_dev: float
    loading_dev: float
    direction_dev: float
    condition_holds: bool
    condition_residual: float
    verdict: Verdict
    skipped_components: List[int]
    eigenvalues: np.ndarray
    rescaled_eigenvalues: np.ndarray
    pc1_ratio: np.ndarray
    original: MapcaSolution = field(repr=False)
    rescaled: MapcaSolution = field(repr=False)

    def to_dict(self):
        return {
            "metric": str(self.metric_spec),
            "scales": self.rescaling.scales.tolist(),
            "uniform_rescaling": self.rescaling.is_uniform,
            "verdict": self.verdict.value,
            "eigenvalue_dev": self.eigenvalue_dev,
            "loading_dev": self.loading_dev,
            "direction_dev": self.direction_dev,
            "condition_holds": self.condition_holds,
            "condition_residual": self.condition_residual,
            "skipped_components": list(self.skipped_components),
            "eigenvalues": self.eigenvalues.tolist(),
            "rescaled_eigenvalues": self.rescaled_eigenvalues.tolist(),
            "pc1_ratio": self.pc1_ratio.tolist(),
            "expected_pc1_ratio": self.rescaling.inverse.tolist(),
            "loadings": self.original.loadings.tolist(),
            "rescaled_loadings": self.rescaled.loadings.tolist(),
        }


def align_sign(vector, reference):
    """Return ``+vector`` or ``-vector``, whichever is closer to ``reference``."""
    return -vector if float(np.dot(vector, reference)) < 0 else vector


def eigenvalue_deviation(reference, other) -> float:
    """``max_i |other_i - ref_i| / max(ref_i, 1e-12 * ref_1)``."""
    ref = np.asarray(reference, dtype=np.float64)
    other = np.asarray(other, dtype=np.float64)
    guard = 1e-12 * abs(float(ref[0]))
    denom = np.maximum(np.abs(ref), guard)
    denom[denom == 0] = 1.0
    return float(np.max(np.abs(other - ref) / denom))


def _compare_loadings(expected, actual, components):
    load_dev = 0.0
    dir_dev = 0.0
    for i in components:
        e = expected[:, i]
        a = align_sign(actual[:, i], e)
        ne = float(np.linalg.norm(e))
        load_dev = max(load_dev, float(np.linalg.norm(a - e)) / ne)
        cos = float(np.dot(a, e)) / (ne * float(np.linalg.norm(a)))
        dir_dev = max(dir_dev, 1.0 - abs(cos))
    return load_dev, dir_dev


def verify_invariance(sigma, spec, c) -> InvarianceReport:
    """Solve on ``Sigma`` and on ``C Sigma C`` and compare the two solutions.

    Components flagged degenerate on either side are left out of the
    loading comparison.  If every component is degenerate the verdict is
    ``Degenerate``, unless the two solutions are bit-for-bit the expected
    transform of each other (as happens for ``C = I``).
    """
    sigma = symmetric(sigma)
    spec = as_spec(spec)
    c = as_rescaling(c)
    sigma_t = rescale_covariance(sigma, c)
    metric = build_metric(sigma, spec)
    metric_t = build_metric(sigma_t, spec)
    holds, residual = _condition(metric, metric_t, c)

    sol = solve_mapca(sigma, metric)
    sol_t = solve_mapca(sigma_t, metric_t)

    eig_dev = eigenvalue_deviation(sol.eigenvalues, sol_t.eigenvalues)
    expected = sol.loadings * c.inverse[:, None]
    skip = sol.degenerate | sol_t.degenerate
    keep = [i for i in range(sol.dim) if not skip[i]]
    skipped = [i for i in range(sol.dim) if skip[i]]
    load_dev, dir_dev = _compare_loadings(expected, sol_t.loadings, keep)

    w1 = sol.loadings[:, 0]
    w1_t = align_sign(sol_t.loadings[:, 0], expected[:, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(w1 != 0, w1_t / w1, np.nan)

    if not keep:
        full_dev, _ = _compare_loadings(expected, sol_t.loadings, range(sol.dim))
        if eig_dev == 0.0 and full_dev == 0.0:
            verdict = Verdict.STRICT
        else:
            verdict = Verdict.DEGENERATE
    elif eig_dev <= STRICT_TOL and load_dev <= STRICT_TOL:
        verdict = Verdict.STRICT
    elif dir_dev <= DIRECTION_TOL:
        verdict = Verdict.DIRECTION
    else:
        verdict = Verdict.NOT

    return InvarianceReport(
        metric_spec=spec,
        rescaling=c,
        eigenvalue_dev=eig_dev,
        loading_dev=load_dev,
        direction_dev=dir_dev,
        condition_holds=holds,
        condition_residual=residual,
        verdict=verdict,
        skipped_components=skipped,
        eigenvalues=sol.eigenvalues,
        rescaled_eigenvalues=sol_t.eigenvalues,
        pc1_ratio=ratio,
        original=sol,
        rescaled=sol_t,
    )


@dataclass(frozen=True)
class UniformEquivarianceReport:
    beta: float
    scale: float
    factor: float
    eigenvalue_dev: float
    min_abs_cos: float
    skipped_components: Tuple[int, ...]
    holds: bool


def verify_uniform_equivariance(sigma, beta, c, tol=1e-8) -> UniformEquivarianceReport:
    """Check the ``Sigma**beta`` solution under ``C = cI``.

    The eigenvalues must scale by ``c**(2(1-beta))`` and each loading must
    stay parallel to its original, so ordering and explained-variance
    proportions survive.  Degenerate components are not direction-checked.
    """
    sigma = symmetric(sigma)
    c = float(c)
    if not (math.isfinite(c) and c > 0):
        raise InputError(f"uniform scale must be positive, got {c}")
    spec = MetricSpec.beta_power(beta)
    sol = solve_mapca(sigma, spec)
    sol_t = solve_mapca(rescale_covariance(sigma, Rescaling.uniform(c, sigma.shape[0])), spec)

    factor = c ** (2.0 * (1.0 - float(beta)))
    eig_dev = eigenvalue_deviation(factor * sol.eigenvalues, sol_t.eigenvalues)
    skip = sol.degenerate | sol_t.degenerate
    min_cos = 1.0
    for i in range(sol.dim):
        if skip[i]:
            continue
        w, wt = sol.loadings[:, i], sol_t.loadings[:, i]
        cos = abs(float(np.dot(w, wt))) / (float(np.linalg.norm(w)) * float(np.linalg.norm(wt)))
        min_cos = min(min_cos, cos)
    return UniformEquivarianceReport(
        beta=float(beta),
        scale=c,
        factor=factor,
        eigenvalue_dev=eig_dev,
        min_abs_cos=min_cos,
        skipped_components=tuple(int(i) for i in np.nonzero(skip)[0]),
        holds=eig_dev <= tol and min_cos >= 1.0 - tol,
    )


class HierarchyRow(NamedTuple):
    method: str
    spec: MetricSpec
    expected: Verdict
    report: InvarianceReport


HIERARCHY = (
    ("Standard PCA", MetricSpec.identity(), Verdict.NOT),
    ("IPCA", MetricSpec.diagonal(), Verdict.STRICT),
    ("beta=0.5", MetricSpec.beta_power(0.5), Verdict.NOT),
    ("Whitening", MetricSpec.beta_power(1.0), Verdict.DEGENERATE),
)


def hierarchy_report(sigma, c) -> List[HierarchyRow]:
    """Run :func:`verify_invariance` for the four reference metrics.

    ``expected`` holds the verdict predicted for a non-uniform rescaling.
    """
    c = as_rescaling(c)
    return [
        HierarchyRow(name, spec, expected, verify_invariance(sigma, spec, c))
        for name, spec, expected in HIERARCHY
    ]
