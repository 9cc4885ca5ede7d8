import numpy as np
import pytest

from hybridface.errors import DivergenceError, ParameterError, RankError
from hybridface.ica import IcaConfig, fit_ica, learn_unmixing, project_ica, sources, sphere
from hybridface.pca import fit_pca_faces

from ica_oracle import MIXINGS, make_sources, matched_correlations


def cov(x):
    x = x - x.mean(axis=0)
    return x.T @ x / len(x)


def test_white_data_is_a_fixed_point():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(500, 3))
    x = x - x.mean(axis=0)
    x = x @ np.linalg.inv(np.linalg.cholesky(cov(x))).T
    centered, w_z = sphere(x)
    np.testing.assert_allclose(w_z, np.eye(3), atol=1e-6)
    np.testing.assert_allclose(cov(centered @ w_z.T), np.eye(3), atol=1e-6)


def test_axis_scaled_data():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(400, 2))
    x = (x - x.mean(axis=0)) @ np.linalg.inv(np.linalg.cholesky(cov(x))).T * [2.0, 1.0]
    centered, w_z = sphere(x)
    np.testing.assert_allclose(w_z, np.diag([0.5, 1.0]), atol=1e-9)
    np.testing.assert_allclose(np.diag(cov(centered @ w_z.T)), [1, 1], atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_sphering_random(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(50, 4)) @ rng.normal(size=(4, 4)) + rng.normal(size=4)
    centered, w_z = sphere(x)
    np.testing.assert_allclose(cov(centered @ w_z.T), np.eye(4), atol=1e-6)


def test_rank_deficient_rejected():
    x = np.random.default_rng(0).normal(size=(10, 2))
    with pytest.raises(RankError, match="PCA"):
        sphere(np.column_stack([x, x[:, 0] + x[:, 1]]))
    with pytest.raises(RankError):
        fit_ica(np.random.default_rng(0).random((3, 8)))


def test_single_variable():
    x = make_sources("laplace", 300, 1, 2)
    model = fit_ica(x)
    assert model.learned.shape == (1, 1)
    s = sources(model, x)
    assert abs(np.corrcoef(s[:, 0], x[:, 0])[0, 1]) == pytest.approx(1.0)


@pytest.mark.parametrize("kind, extended", [("laplace", False), ("uniform", True)])
def test_two_source_recovery(kind, extended):
    s = make_sources(kind, 2000, 2, 11)
    x = s @ MIXINGS[2].T
    model = fit_ica(x, IcaConfig(extended=extended))
    assert np.all(matched_correlations(sources(model, x), s) > 0.95)


def test_independent_sources_stay_put():
    s = make_sources("laplace", 3000, 3, 4)
    model = fit_ica(s)
    c = np.abs(np.corrcoef(sources(model, s).T, s.T)[:3, 3:])
    off = c[~np.eye(3, dtype=bool)]
    assert np.all(np.diag(c) > 0.95) and np.all(off < 0.1)
    # the basis coefficients are then the inputs up to scale
    c = np.abs(np.corrcoef(model.basis.T, s.T)[:3, 3:])
    assert np.all(np.diag(c) > 0.95)


def test_basis_reconstructs_centered_data():
    rng = np.random.default_rng(6)
    # two centered faces span one direction only, so three is the minimum for 2 dims
    faces = rng.random((3, 30))
    pre = fit_pca_faces(faces, 2)
    model = fit_ica(faces, pre_projection=pre)
    x = (faces - pre.mean) @ pre.eigenfaces
    assert model.basis.shape == (3, 2)
    np.testing.assert_allclose(model.basis @ model.unmixing, x - x.mean(axis=0), atol=1e-6)


def test_projection_consistency():
    rng = np.random.default_rng(5)
    faces = rng.random((8, 40))
    pre = fit_pca_faces(faces, 5)
    model = fit_ica(faces, pre_projection=pre)
    np.testing.assert_allclose(project_ica(model, faces), model.basis, atol=1e-8)
    np.testing.assert_allclose(project_ica(model, faces[3]), model.basis[3], atol=1e-8)
    mean_face = pre.mean + pre.eigenfaces @ model.row_means
    np.testing.assert_allclose(project_ica(model, mean_face), 0, atol=1e-10)
    x, y, a = rng.random(40), rng.random(40), 0.3
    np.testing.assert_allclose(project_ica(model, a * x + (1 - a) * y),
                               a * project_ica(model, x) + (1 - a) * project_ica(model, y),
                               atol=1e-9)


def test_mixing_inverts_unmixing():
    x = make_sources("laplace", 500, 3, 1) @ MIXINGS[3].T
    model = fit_ica(x)
    np.testing.assert_allclose(model.mixing @ model.unmixing, np.eye(3), atol=1e-9)
    np.testing.assert_allclose(model.unmixing, model.learned @ model.whitening, atol=1e-12)


def test_blocks_and_determinism():
    x = make_sources("laplace", 400, 2, 3) @ MIXINGS[2].T
    cfg = IcaConfig(block_size=50, learn_rate=0.02, max_passes=300)
    w1 = learn_unmixing(sphere(x)[0] @ sphere(x)[1].T, cfg)
    w2 = learn_unmixing(sphere(x)[0] @ sphere(x)[1].T, cfg)
    np.testing.assert_array_equal(w1, w2)


def test_divergence():
    x = make_sources("laplace", 200, 2, 3) @ MIXINGS[2].T
    with pytest.raises(DivergenceError):
        fit_ica(x, IcaConfig(learn_rate=50.0))


@pytest.mark.parametrize("kwargs", [dict(learn_rate=0), dict(convergence_cos=1.5),
                                    dict(block_size=0), dict(max_passes=0)])
def test_bad_config(kwargs):
    with pytest.raises(ParameterError):
        IcaConfig(**kwargs)
