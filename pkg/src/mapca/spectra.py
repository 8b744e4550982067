"""Dense symmetric eigen-decomposition and spectral matrix functions.

The eigensolver is a cyclic Jacobi iteration.  It is slow compared to LAPACK
but extremely accurate on small dense problems and entirely deterministic,
which the invariance checks downstream depend on.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    NotPositiveDefiniteError,
    SingularMetricError,
)

JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
DEFAULT_SPD_FLOOR = 1e-12
DEGENERACY_TOL = 1e-10

SPD_FLOOR_ENV = "MAPCA_SPD_FLOOR"

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


def relative_spd_floor():
    """Relative SPD floor, overridable through ``MAPCA_SPD_FLOOR``."""
    raw = os.environ.get(SPD_FLOOR_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_SPD_FLOOR
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{SPD_FLOOR_ENV}={raw!r} is not a number") from None
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{SPD_FLOOR_ENV} must be a finite non-negative number, got {raw!r}")
    return value


def symmetric(a) -> np.ndarray:
    """Return ``(a + a.T) / 2`` as a fresh float64 array.

    Rejects anything that is not a non-empty finite square matrix.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatchError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatchError("matrix contains non-finite entries")
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (descending) and column-orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def degenerate(self, tol=DEGENERACY_TOL):
        return degenerate_mask(self.eigenvalues, tol)


def degenerate_mask(eigenvalues, tol=DEGENERACY_TOL) -> np.ndarray:
    """Flag eigenvalues that sit within ``tol * max|lambda|`` of a neighbour.

    ``eigenvalues`` must be sorted.  An all-zero spectrum is fully degenerate.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    flags = np.zeros(lam.shape[0], dtype=bool)
    if lam.size <= 1:
        return flags
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        flags[:] = True
        return flags
    close = np.abs(np.diff(lam)) < tol * scale
    flags[:-1] |= close
    flags[1:] |= close
    return flags


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Ties go to the lowest row index (``np.argmax`` semantics).
    """
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    if vectors.size == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _off_norm(a):
    # summed directly: ||A||^2 - ||diag A||^2 cancels catastrophically
    upper = a[np.triu_indices(a.shape[0], 1)]
    return math.sqrt(2.0) * float(np.linalg.norm(upper))


def decompose(a, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS) -> SpectralDecomposition:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Each sweep visits every (p, q) pair above the diagonal and annihilates
    the entry with a plane rotation, skipping entries already negligible
    relative to ``sqrt(|a_pp a_qq|)``.  Iteration stops once a sweep has
    nothing left to rotate, which gives small eigenvalues full relative
    accuracy.  The result is accepted if the off-diagonal Frobenius norm
    is at most ``tol * ||A||_F``; otherwise, after ``max_sweeps`` sweeps,
    :class:`ConvergenceError` is raised.
    """
    a = symmetric(a)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    sweeps = 0
    while True:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                app = float(a[p, p])
                aqq = float(a[q, q])
                if abs(apq) <= _EPS * math.sqrt(abs(app * aqq)) or abs(apq) < _TINY:
                    continue
                tau = (aqq - app) / (2.0 * apq)
                if math.isinf(tau):
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
        sweeps += 1
        if sweeps >= max_sweeps:
            break

    off = _off_norm(a)
    if off > target:
        raise ConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps: "
            f"off-diagonal residual {off:.3e} > target {target:.3e}",
            off_diagonal_residual=off,
            sweeps=sweeps,
        )
    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    return SpectralDecomposition(
        eigenvalues=lam[order],
        eigenvectors=fix_signs(v[:, order]),
        sweeps=sweeps,
    )


def spd_floor(eigenvalues, floor=None):
    """Absolute floor used for SPD decisions on a given spectrum."""
    if floor is not None:
        return float(floor)
    lam_max = float(np.max(eigenvalues))
    return relative_spd_floor() * max(lam_max, 0.0)


def assert_spd(a, floor=None) -> float:
    """Return the smallest eigenvalue of ``a``; raise if it is not above ``floor``.

    ``floor`` is absolute.  When omitted it defaults to the relative floor
    (``1e-12`` unless overridden by the environment) times ``lambda_max``.
    """
    spec = a if isinstance(a, SpectralDecomposition) else decompose(a)
    lam_min = float(spec.eigenvalues[-1])
    limit = spd_floor(spec.eigenvalues, floor)
    if not lam_min > limit:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: smallest eigenvalue {lam_min:.6g} <= floor {limit:.6g}",
            min_eigenvalue=lam_min,
            floor=limit,
        )
    return lam_min


def matrix_power(a, exponent, floor=None) -> np.ndarray:
    """Symmetric matrix power ``V diag(lambda**exponent) V^T``.

    Non-negative integer exponents are defined for any symmetric input.
    Fractional or negative exponents require every eigenvalue to exceed the
    SPD floor.  ``exponent == 0`` gives the identity and ``exponent == 1``
    returns the (symmetrized) input unchanged.
    """
    exponent = float(exponent)
    if not math.isfinite(exponent):
        raise ValueError(f"exponent must be finite, got {exponent}")
    a = symmetric(a)
    n = a.shape[0]
    if exponent == 0.0:
        return np.eye(n)
    if exponent == 1.0:
        return a
    spec = decompose(a)
    lam = spec.eigenvalues
    if exponent < 0 or not exponent.is_integer():
        limit = spd_floor(lam, floor)
        bad = np.nonzero(~(lam > limit))[0]
        if bad.size:
            i = int(bad[0])
            raise SingularMetricError(
                f"cannot raise matrix to power {exponent:g}: eigenvalue #{i + 1} = "
                f"{lam[i]:.6g} is not above the SPD floor {limit:.6g}",
                eigenvalue=float(lam[i]),
                index=i,
                floor=limit,
            )
    v = spec.eigenvectors
    out = (v * np.power(lam, exponent)) @ v.T
    return (out + out.T) / 2.0
