"""Metric matrices M for the constraint ``W^T M W = I``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateVariableError, DimensionMismatchError, MetricSpecError
from .spectra import assert_spd, matrix_power, symmetric

IDENTITY = "identity"
DIAGONAL = "diagonal"
BETA = "beta"
INVCOV = "invcov"
EXPLICIT = "explicit"

KINDS = (IDENTITY, DIAGONAL, BETA, INVCOV, EXPLICIT)


@dataclass(frozen=True)
class MetricSpec:
    """Which metric to build from a covariance matrix.

    Use the constructors (:meth:`identity`, :meth:`beta_power`, ...) or
    :meth:`parse` rather than filling the fields by hand.
    """

    kind: str
    beta: Optional[float] = None
    matrix: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MetricSpecError(f"unknown metric kind {self.kind!r}")
        if self.kind == BETA:
            if self.beta is None or not math.isfinite(self.beta):
                raise MetricSpecError(f"beta must be a finite number, got {self.beta!r}")
        if self.kind == EXPLICIT and self.matrix is None:
            raise MetricSpecError("explicit metric needs a matrix")

    @classmethod
    def identity(cls):
        return cls(IDENTITY)

    @classmethod
    def diagonal(cls):
        return cls(DIAGONAL)

    @classmethod
    def beta_power(cls, beta):
        return cls(BETA, beta=float(beta))

    @classmethod
    def inverse_covariance(cls):
        return cls(INVCOV)

    @classmethod
    def explicit(cls, matrix, source=None):
        return cls(EXPLICIT, matrix=symmetric(matrix), source=source)

    @classmethod
    def parse(cls, text, delimiter=","):
        """Parse a CLI metric string.

        Accepted forms: ``identity``, ``diagonal``, ``beta:<float>``,
        ``invcov`` and ``explicit:<path>`` (a headerless CSV holding a p x p
        matrix).
        """
        raw = text.strip()
        head, sep, arg = raw.partition(":")
        head = head.strip().lower()
        if head in (IDENTITY, DIAGONAL, INVCOV) and not sep:
            return cls(head)
        if head == BETA and sep:
            try:
                beta = float(arg)
            except ValueError:
                raise MetricSpecError(f"bad beta value in metric {text!r}") from None
            return cls.beta_power(beta)
        if head == EXPLICIT and sep and arg.strip():
            from .data import read_matrix

            path = arg.strip()
            return cls.explicit(read_matrix(path, delimiter=delimiter), source=path)
        raise MetricSpecError(
            f"cannot parse metric {text!r}; expected identity, diagonal, "
            "beta:<float>, invcov or explicit:<path>"
        )

    @property
    def beta_position(self):
        """Position on the ``Sigma**beta`` curve, or None if off the curve."""
        if self.kind == IDENTITY:
            return 0.0
        if self.kind == BETA:
            return self.beta
        if self.kind == INVCOV:
            return -1.0
        return None

    def __str__(self):
        if self.kind == BETA:
            return f"beta:{self.beta:g}"
        if self.kind == EXPLICIT:
            return f"explicit:{self.source}" if self.source else "explicit"
        return self.kind


def as_spec(spec) -> MetricSpec:
    if isinstance(spec, MetricSpec):
        return spec
    if isinstance(spec, str):
        return MetricSpec.parse(spec)
    raise TypeError(f"expected MetricSpec or metric string, got {type(spec).__name__}")


@dataclass(frozen=True)
class MetricMatrix:
    m: np.ndarray
    inverse_sqrt: np.ndarray
    spec: MetricSpec
    warnings: tuple = ()


def marginal_variances(sigma) -> np.ndarray:
    """Diagonal of ``sigma``; raises if any variance is not positive."""
    d = np.diag(symmetric(sigma)).copy()
    bad = np.nonzero(~(d > 0))[0]
    if bad.size:
        j = int(bad[0])
        raise DegenerateVariableError(
            f"variable {j} has non-positive marginal variance {d[j]:.6g}", column=j
        )
    return d


def correlation_matrix(sigma) -> np.ndarray:
    """``D^{-1/2} Sigma D^{-1/2}`` with an exactly unit diagonal."""
    sigma = symmetric(sigma)
    s = np.sqrt(marginal_variances(sigma))
    r = sigma / np.outer(s, s)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r


def build_metric(sigma, spec) -> MetricMatrix:
    """Build the metric described by ``spec`` from covariance ``sigma``."""
    spec = as_spec(spec)
    sigma = symmetric(sigma)
    p = sigma.shape[0]
    notes = []

    if spec.kind == IDENTITY:
        m = np.eye(p)
    elif spec.kind == DIAGONAL:
        m = np.diag(marginal_variances(sigma))
    elif spec.kind == BETA:
        if not 0.0 <= spec.beta <= 1.0:
            notes.append(f"beta={spec.beta:g} lies outside the compression range [0, 1]")
        m = matrix_power(sigma, spec.beta)
    elif spec.kind == INVCOV:
        m = matrix_power(sigma, -1)
    else:
        m = spec.matrix
        if m.shape != sigma.shape:
            raise DimensionMismatchError(
                f"explicit metric has shape {m.shape}, covariance has shape {sigma.shape}"
            )

    assert_spd(m)
    if spec.kind in (IDENTITY, DIAGONAL):
        # diagonal: exact elementwise root, no eigensolver round-off
        inv_sqrt = np.diag(1.0 / np.sqrt(np.diag(m)))
    else:
        inv_sqrt = matrix_power(m, -0.5)
    return MetricMatrix(m=m, inverse_sqrt=inv_sqrt, spec=spec, warnings=tuple(notes))

