"""Seeded uniform sampling: CDF inversion, determinism, distribution laws.

The quaternion-chart law is cross-checked against the classic construction
of uniform points on the 3-sphere by normalizing 4D Gaussian draws.
"""

import numpy as np
import pytest

from haarkit.haar import NumericalError
from haarkit.sampling import SamplerConfig, invert_cdf, sample


def test_invert_cdf_square_law():
    cdf = lambda x: x**2
    targets = np.linspace(0.01, 0.99, 23)
    got = invert_cdf(cdf, targets, (0.0, 1.0))
    # convergence contract is in CDF space
    assert np.abs(cdf(got) - targets).max() < 1e-12
    assert np.abs(got - np.sqrt(targets)).max() < 1e-10


def test_invert_cdf_with_derivative():
    cdf = lambda x: (1 - np.cos(x)) / 2
    pdf = lambda x: np.sin(x) / 2
    targets = np.array([0.1, 0.5, 0.9])
    got = invert_cdf(cdf, targets, (0.0, np.pi), derivative=pdf)
    assert np.abs(got - np.arccos(1 - 2 * targets)).max() < 1e-12


def test_invert_cdf_scalar_and_endpoints():
    cdf = lambda x: x
    assert np.isclose(invert_cdf(cdf, 0.0, (0.0, 1.0)), 0.0, atol=1e-12)
    assert np.isclose(invert_cdf(cdf, 1.0, (0.0, 1.0)), 1.0, atol=1e-12)


def test_invert_cdf_out_of_range_target():
    with pytest.raises(ValueError):
        invert_cdf(lambda x: 0.0 * x, 0.5, (0.0, 1.0))


def test_invert_cdf_non_convergence():
    # a jump at 0.5 brackets the target but the residual never closes
    step_cdf = lambda x: np.where(np.asarray(x) < 0.5, 0.0, 1.0)
    with pytest.raises(NumericalError):
        invert_cdf(step_cdf, 0.5, (0.0, 1.0))


def test_config_defaults_and_aliases():
    assert SamplerConfig(group="so3").chart == "so3-euler"
    assert SamplerConfig(group="so3", chart="quaternion").chart == "so3-quat"
    assert SamplerConfig(group="so2", chart="shifted").chart == "so2-shifted"
    assert SamplerConfig(group="o3", chart="builtin:so3-polar").chart == "so3-polar"


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(group="su2")
    with pytest.raises(ValueError):
        SamplerConfig(group="so3", chart="so2-angle")
    with pytest.raises(ValueError):
        SamplerConfig(group="so2", count=0)
    with pytest.raises(ValueError):
        SamplerConfig(group="so2", seed=-1)


def test_determinism_and_prefix_property():
    a = sample(SamplerConfig(group="so3", chart="polar", seed=9, count=8))
    b = sample(SamplerConfig(group="so3", chart="polar", seed=9, count=8))
    assert np.array_equal(a.coordinates, b.coordinates)
    assert np.array_equal(a.matrices, b.matrices)
    longer = sample(SamplerConfig(group="so3", chart="polar", seed=9, count=20))
    assert np.array_equal(longer.coordinates[:8], a.coordinates)
    other_seed = sample(SamplerConfig(group="so3", chart="polar", seed=10, count=8))
    assert not np.allclose(other_seed.coordinates, a.coordinates)


def test_improper_coin_does_not_disturb_rotation_stream():
    proper = sample(SamplerConfig(group="so3", seed=4, count=64))
    full = sample(SamplerConfig(group="o3", seed=4, count=64))
    dets = np.linalg.det(full.matrices)
    assert np.allclose(np.abs(dets), 1.0)
    keep = dets > 0
    assert 0.2 < keep.mean() < 0.8
    assert np.allclose(full.matrices[keep], proper.matrices[keep])
    assert np.allclose(full.matrices[~keep], -proper.matrices[~keep])


def test_o2_improper_coset():
    batch = sample(SamplerConfig(group="o2", seed=1, count=200))
    dets = np.linalg.det(batch.matrices)
    improper = batch.matrices[dets < 0]
    assert improper.shape[0] > 40
    # sigma g leaves the (1,1) slot as cos with flipped sign pattern: trace 0
    assert np.abs(np.trace(improper, axis1=1, axis2=2)).max() < 1e-12


def test_batch_elements_and_quaternions():
    batch = sample(SamplerConfig(group="so3", chart="quaternion", seed=2, count=6))
    assert len(batch) == 6
    g = batch[3]
    assert np.allclose(g.matrix, batch.matrices[3])
    assert batch.quaternions.shape == (6, 4)
    assert np.allclose(np.linalg.norm(batch.quaternions, axis=1), 1.0, atol=1e-12)
    euler = sample(SamplerConfig(group="so3", chart="euler", seed=2, count=6))
    assert euler.quaternions is None


def test_matrices_are_rotations():
    for group, chart in (("so2", ""), ("so3", "euler"), ("so3", "polar"),
                         ("so3", "quaternion")):
        batch = sample(SamplerConfig(group=group, chart=chart, seed=11, count=50))
        m = batch.matrices
        eye = np.eye(m.shape[-1])
        assert np.abs(np.einsum("nij,nkj->nik", m, m) - eye).max() < 1e-12
        assert np.allclose(np.linalg.det(m), 1.0)


def test_euler_beta_law_moments():
    # beta has density sin(b)/2: E[cos b] = 0, E[cos^2 b] = 1/3
    batch = sample(SamplerConfig(group="so3", chart="euler", seed=5, count=40000))
    beta = batch.coordinates[:, 1]
    assert abs(np.cos(beta).mean()) < 0.02
    assert abs((np.cos(beta) ** 2).mean() - 1 / 3) < 0.02


def test_polar_angle_laws():
    batch = sample(SamplerConfig(group="so3", chart="polar", seed=6, count=40000))
    phi, psi, alpha = batch.coordinates.T
    # alpha ~ (1 - cos a)/pi: E[cos a] = -1/2; psi ~ cos(psi)/2: E[sin^2] = 1/3
    assert abs(np.cos(alpha).mean() + 0.5) < 0.02
    assert abs((np.sin(psi) ** 2).mean() - 1 / 3) < 0.02
    assert abs(phi.mean() - np.pi) < 0.05


def test_trace_moments_all_charts():
    # E[Tr] = 0 and E[Tr^2] = 1 on SO(3) regardless of the chart sampled in
    for chart in ("euler", "polar", "quaternion"):
        batch = sample(SamplerConfig(group="so3", chart=chart, seed=7, count=40000))
        tr = np.trace(batch.matrices, axis1=1, axis2=2)
        assert abs(tr.mean()) < 0.03
        assert abs((tr**2).mean() - 1.0) < 0.05


def test_quaternion_chart_matches_gaussian_sphere_law():
    # uniform S^3 via normalized Gaussians gives theta = arccos(w) the
    # CDF (2 theta - sin 2 theta) / (2 pi); compare sampler quantiles to it
    batch = sample(SamplerConfig(group="so3", chart="quaternion", seed=8,
                                 count=50000))
    theta = np.arccos(np.clip(batch.quaternions[:, 0], -1, 1))
    grid = np.linspace(0.05, 0.95, 19)
    empirical = np.quantile(theta, grid)
    cdf_at_quantiles = (2 * empirical - np.sin(2 * empirical)) / (2 * np.pi)
    assert np.abs(cdf_at_quantiles - grid).max() < 0.01

    rng = np.random.default_rng(123)
    gauss = rng.normal(size=(50000, 4))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    theta_ref = np.arccos(np.clip(gauss[:, 0], -1, 1))
    assert abs(np.median(theta) - np.median(theta_ref)) < 0.02
    assert abs(np.cos(theta).mean() - np.cos(theta_ref).mean()) < 0.02


def test_so2_angles_uniform_chi2():
    batch = sample(SamplerConfig(group="so2", seed=12, count=30000))
    counts, _ = np.histogram(batch.coordinates[:, 0], bins=50,
                             range=(0, 2 * np.pi))
    expected = 30000 / 50
    chi2 = ((counts - expected) ** 2 / expected).sum()
    # 49 dof: far tails only
    assert chi2 < 95.0
