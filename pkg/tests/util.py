"""Shared helpers and independent oracles for the test-suite."""

import math

import numpy as np

# acceptance criterion lines, printed by the terminal-summary hook in conftest
ACCEPTANCE_LINES = {}


def record(number, title, passed, detail=""):
    status = "PASS" if passed is True else "FAIL" if passed is False else passed
    ACCEPTANCE_LINES[number] = f"[{status}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")


def random_orthogonal(rng, p):
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    return q * np.sign(np.diag(r))


def random_spd(rng, p, low=0.2, high=5.0):
    """SPD matrix with log-uniform eigenvalues in [low, high] and a random basis."""
    lam = np.exp(rng.uniform(math.log(low), math.log(high), size=p))
    q = random_orthogonal(rng, p)
    a = (q * lam) @ q.T
    return (a + a.T) / 2


def spd_with_spectrum(rng, eigenvalues):
    q = random_orthogonal(rng, len(eigenvalues))
    a = (q * np.asarray(eigenvalues, dtype=float)) @ q.T
    return (a + a.T) / 2


def random_scales(rng, p, low=0.1, high=10.0, min_ratio=None):
    while True:
        c = np.exp(rng.uniform(math.log(low), math.log(high), size=p))
        if min_ratio is None or c.max() / c.min() >= min_ratio:
            return c


def sqrtm_2x2(a):
    """Closed-form principal square root of a 2x2 SPD matrix."""
    a = np.asarray(a, dtype=float)
    s = math.sqrt(np.linalg.det(a))
    t = math.sqrt(np.trace(a) + 2 * s)
    return (a + s * np.eye(2)) / t


def det_pencil(sigma, m, lam):
    """det(Sigma - lam M) by cofactor expansion (p <= 3)."""
    a = np.asarray(sigma, dtype=float) - lam * np.asarray(m, dtype=float)
    p = a.shape[0]
    if p == 1:
        return a[0, 0]
    if p == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))


def pencil_roots_by_bisection(sigma, m, grid=20000):
    """Roots of det(Sigma - lam M) = 0 for SPD Sigma, M (p <= 3).

    Scans a log grid between bounds derived from traces and determinants
    for sign changes, then bisects each bracket.  Returns roots descending.
    """
    sigma = np.asarray(sigma, dtype=float)
    m = np.asarray(m, dtype=float)
    p = sigma.shape[0]
    k = np.linalg.solve(m, sigma)
    upper = float(np.trace(k))
    prod = float(np.linalg.det(sigma) / np.linalg.det(m))
    lower = prod / upper ** (p - 1)
    xs = np.geomspace(lower * 0.5, upper * 2.0, grid)
    vals = np.array([det_pencil(sigma, m, x) for x in xs])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
        lo, hi = xs[i], xs[i + 1]
        flo = det_pencil(sigma, m, lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = det_pencil(sigma, m, mid)
            if fm == 0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        roots.append(0.5 * (lo + hi))
    return np.array(sorted(roots, reverse=True))
