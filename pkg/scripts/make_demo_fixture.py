"""Regenerate fixtures/cadets_demo_2d.csv.

A seeded 2-D Gaussian sample, re-whitened so that its sample covariance
(denominator n - 1) has eigenvalues exactly 15.3 * s and s, rotated by 30
degrees.  The committed file is the source of truth; this script only
documents how it was made.
"""

from pathlib import Path

import numpy as np

SEED = 20260415
N = 200
RATIO = 15.3
MINOR_VARIANCE = 0.25
ANGLE_DEG = 30.0


def make_sample():
    rng = np.random.default_rng(SEED)
    z = rng.standard_normal((N, 2))
    z -= z.mean(axis=0)
    s = z.T @ z / (N - 1)
    lam, v = np.linalg.eigh(s)
    z = z @ v @ np.diag(lam ** -0.5) @ v.T
    a = np.deg2rad(ANGLE_DEG)
    rot = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    scale = np.sqrt(np.array([RATIO * MINOR_VARIANCE, MINOR_VARIANCE]))
    return z @ np.diag(scale) @ rot.T + np.array([5.0, 3.0])


def main():
    x = make_sample()
    out = Path(__file__).resolve().parents[1] / "fixtures" / "cadets_demo_2d.csv"
    lines = ["x,y"] + [f"{a!r},{b!r}" for a, b in x.tolist()]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
