import numpy as np
import pytest

from mapca.errors import DimensionMismatchError, InputError
from mapca.invariance import (
    Rescaling,
    Verdict,
    align_sign,
    check_metric_condition,
    hierarchy_report,
    rescale_covariance,
    verify_invariance,
    verify_uniform_equivariance,
)
from mapca.metrics import MetricSpec
from mapca.solver import project

from util import random_scales, random_spd, sqrtm_2x2

SIGMA = np.array([[4.0, 2.0], [2.0, 4.0]])


def test_rescaling_validation():
    with pytest.raises(InputError):
        Rescaling([1.0, 0.0])
    with pytest.raises(InputError):
        Rescaling([1.0, float("inf")])
    assert Rescaling([2.0, 2.0]).is_uniform
    assert not Rescaling([2.0, 2.0 * (1 + 1e-9)]).is_uniform


def test_rescale_covariance_examples():
    np.testing.assert_array_equal(rescale_covariance(SIGMA, [2.0, 1.0]), [[16.0, 4.0], [4.0, 4.0]])
    np.testing.assert_array_equal(rescale_covariance(SIGMA, [1.0, 1.0]), SIGMA)
    np.testing.assert_array_equal(rescale_covariance(np.eye(2), [3.0, 0.5]), np.diag([9.0, 0.25]))
    with pytest.raises(DimensionMismatchError):
        rescale_covariance(SIGMA, [1.0, 2.0, 3.0])


def test_condition_diagonal_holds(rng):
    for _ in range(20):
        p = int(rng.integers(2, 6))
        holds, residual = check_metric_condition(random_spd(rng, p), "diagonal", random_scales(rng, p))
        assert holds and residual <= 1e-15


def test_condition_beta_half_fails_closed_form():
    c = np.diag([2.0, 1.0])
    oracle_lhs = sqrtm_2x2(c @ SIGMA @ c)
    oracle_rhs = c @ sqrtm_2x2(SIGMA) @ c
    oracle_residual = np.abs(oracle_lhs - oracle_rhs).max() / np.abs(oracle_rhs).max()
    holds, residual = check_metric_condition(SIGMA, MetricSpec.beta_power(0.5), [2.0, 1.0])
    assert not holds
    assert residual == pytest.approx(oracle_residual, rel=1e-10)


def test_condition_beta_one_holds(rng):
    sigma = random_spd(rng, 4)
    holds, _ = check_metric_condition(sigma, "beta:1", random_scales(rng, 4))
    assert holds


def test_verify_ipca_2x2():
    rep = verify_invariance(SIGMA, "diagonal", [2.0, 1.0])
    np.testing.assert_allclose(rep.eigenvalues, [1.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(rep.rescaled_eigenvalues, [1.5, 0.5], atol=1e-15)
    w1 = align_sign(rep.rescaled.loadings[:, 0], [1, 1])
    np.testing.assert_allclose(w1, [0.1767767, 0.35355339], atol=1e-8)
    np.testing.assert_allclose(rep.pc1_ratio, [0.5, 1.0], atol=1e-14)
    assert rep.verdict is Verdict.STRICT
    assert rep.condition_holds


def test_identity_rescaling_is_trivially_strict(rng):
    sigma = random_spd(rng, 4)
    for spec in ("identity", "diagonal", "beta:0.5", "beta:1"):
        rep = verify_invariance(sigma, spec, np.ones(4))
        assert rep.verdict is Verdict.STRICT, spec


def test_hierarchy_pattern_random(rng):
    for _ in range(10):
        p = 4
        rows = hierarchy_report(random_spd(rng, p), random_scales(rng, p, min_ratio=2))
        assert [r.report.verdict for r in rows] == [r.expected for r in rows]
        assert [r.expected for r in rows] == [
            Verdict.NOT, Verdict.STRICT, Verdict.NOT, Verdict.DEGENERATE
        ]


def test_whitening_degenerate(rng):
    rep = verify_invariance(random_spd(rng, 3), "beta:1", [1.0, 5.0, 0.2])
    assert rep.verdict is Verdict.DEGENERATE
    assert rep.skipped_components == [0, 1, 2]
    np.testing.assert_allclose(rep.eigenvalues, 1.0, atol=1e-10)
    np.testing.assert_allclose(rep.rescaled_eigenvalues, 1.0, atol=1e-10)


def test_uniform_rescaling_gives_direction_invariance(rng):
    sigma = random_spd(rng, 3)
    rep = verify_invariance(sigma, "identity", Rescaling.uniform(3.0, 3))
    assert rep.verdict is Verdict.DIRECTION


def test_sign_alignment_only_flips():
    v = np.array([1.0, -2.0])
    assert align_sign(v, -v) is not v
    np.testing.assert_array_equal(align_sign(v, -v), -v)
    np.testing.assert_array_equal(align_sign(v, v), v)


def test_sign_alignment_minimizes_distance(rng):
    for _ in range(50):
        v, ref = rng.standard_normal(4), rng.standard_normal(4)
        best = min(np.linalg.norm(v - ref), np.linalg.norm(-v - ref))
        assert np.linalg.norm(align_sign(v, ref) - ref) == pytest.approx(best)


def test_scores_invariant_under_rescaling(rng):
    x = rng.standard_normal((50, 4)) @ random_spd(rng, 4)
    x -= x.mean(axis=0)
    c = random_scales(rng, 4)
    sigma = x.T @ x / 49
    rep = verify_invariance(sigma, "diagonal", c)
    scores = project(x, rep.original)
    w_t = np.column_stack([align_sign(rep.rescaled.loadings[:, i], rep.original.loadings[:, i] / c)
                           for i in range(4)])
    scores_t = (x * c) @ w_t
    np.testing.assert_allclose(scores_t, scores, atol=1e-10)


# ---- uniform equivariance ----------------------------------------------------------

def test_uniform_beta_zero():
    rep = verify_uniform_equivariance(np.diag([3.0, 1.0]), 0.0, 2.0)
    assert rep.factor == 4.0 and rep.holds


def test_uniform_beta_one(rng):
    rep = verify_uniform_equivariance(random_spd(rng, 3), 1.0, 7.0)
    assert rep.factor == 1.0 and rep.holds
    assert rep.skipped_components == (0, 1, 2)


def test_uniform_beta_half_diag():
    from mapca.solver import solve_mapca

    rep = verify_uniform_equivariance(np.diag([4.0, 1.0]), 0.5, 2.0)
    assert rep.factor == pytest.approx(2.0)
    sol = solve_mapca(np.diag([16.0, 4.0]), "beta:0.5")
    np.testing.assert_allclose(sol.eigenvalues, [4.0, 2.0], atol=1e-14)
    np.testing.assert_allclose(np.abs(sol.loadings / np.linalg.norm(sol.loadings, axis=0)), np.eye(2), atol=1e-15)
    assert rep.holds


def test_uniform_requires_positive_scale():
    with pytest.raises(InputError):
        verify_uniform_equivariance(np.eye(2), 0.5, 0.0)


def test_report_serializes():
    d = verify_invariance(SIGMA, "diagonal", [2.0, 1.0]).to_dict()
    assert d["verdict"] == "StrictInvariant"
    assert d["metric"] == "diagonal"
    assert d["expected_pc1_ratio"] == [0.5, 1.0]


def test_verdict_parse():
    assert Verdict.parse("strictinvariant") is Verdict.STRICT
    assert Verdict.parse("not_invariant") is Verdict.NOT
    assert Verdict.parse("Degenerate") is Verdict.DEGENERATE
    with pytest.raises(InputError):
        Verdict.parse("maybe")
