import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hybridface.dataset_io import GrayImage
from hybridface.preprocess import (
    PreprocessConfig, equalize_histogram, flatten, gamma_correct, normalize, normalize_all, resize,
)

images = arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))).map(GrayImage)


def test_resize_identity():
    img = GrayImage.from_flat(3, 2, [1, 2, 3, 4, 5, 6])
    assert resize(img, 3, 2) == img


def test_resize_bilinear_midpoint():
    out = resize(GrayImage.from_flat(2, 1, [0, 255]), 3, 1)
    assert out.pixels.ravel().tolist() == [0, 128, 255]


@given(st.integers(0, 255), st.integers(1, 6), st.integers(1, 6), st.integers(1, 9), st.integers(1, 9))
def test_resize_constant(v, w, h, w2, h2):
    out = resize(GrayImage(np.full((h, w), v, np.uint8)), w2, h2)
    assert out.pixels.shape == (h2, w2) and np.all(out.pixels == v)


def test_equalize_constant_unchanged():
    img = GrayImage(np.full((3, 3), 77, np.uint8))
    assert equalize_histogram(img) == img


def test_equalize_two_level():
    # cdf = [2, 4], cdf_min = 2, P = 4: level 0 -> 0, level 255 -> 255
    out = equalize_histogram(GrayImage.from_flat(4, 1, [0, 0, 255, 255]))
    assert out.pixels.ravel().tolist() == [0, 0, 255, 255]


def test_equalize_uniform_histogram_is_fixed_point():
    img = GrayImage(np.repeat(np.arange(256, dtype=np.uint8), 3).reshape(24, 32))
    out = equalize_histogram(img)
    assert np.max(np.abs(out.pixels.astype(int) - img.pixels)) <= 1


@given(images)
def test_equalize_is_monotone(img):
    out = equalize_histogram(img).pixels.ravel().astype(int)
    order = np.argsort(img.pixels.ravel(), kind="stable")
    assert np.all(np.diff(out[order]) >= 0)


def test_gamma():
    img = GrayImage.from_flat(3, 1, [0, 64, 255])
    assert gamma_correct(img, 1.0) == img
    assert gamma_correct(img, 0.5).pixels.ravel().tolist() == [0, 128, 255]


@given(st.floats(0.1, 5.0))
def test_gamma_endpoints(g):
    out = gamma_correct(GrayImage.from_flat(2, 1, [0, 255]), g)
    assert out.pixels.ravel().tolist() == [0, 255]


def test_flatten():
    assert flatten(GrayImage.from_flat(1, 2, [0, 255])).tolist() == [0.0, 1.0]
    np.testing.assert_allclose(flatten(GrayImage.from_flat(2, 2, [51, 102, 153, 204])),
                               [0.2, 0.4, 0.6, 0.8])
    np.testing.assert_array_equal(flatten(GrayImage(np.full((2, 3), 128, np.uint8))),
                                  np.full(6, 128 / 255))


def test_normalize_identity_config():
    img = GrayImage.from_flat(2, 2, [5, 10, 200, 3])
    cfg = PreprocessConfig(2, 2, 1.0, equalize=False)
    np.testing.assert_array_equal(normalize(img, cfg), flatten(img))


def test_normalize_orl_size():
    img = GrayImage(np.random.default_rng(0).integers(0, 256, (112, 92), dtype=np.uint8))
    assert normalize(img, PreprocessConfig()).shape == (2576,)


@given(images, st.integers(1, 12), st.integers(1, 12))
def test_normalize_length_and_range(img, w, h):
    v = normalize(img, PreprocessConfig(w, h, gamma=0.8))
    assert v.shape == (w * h,)
    assert np.all((v >= 0) & (v <= 1))


def test_normalize_all_stacks_rows():
    imgs = [GrayImage.from_flat(2, 1, [0, 255]), GrayImage.from_flat(2, 1, [255, 0])]
    out = normalize_all(imgs, PreprocessConfig(2, 1, equalize=False))
    assert out.tolist() == [[0.0, 1.0], [1.0, 0.0]]


@pytest.mark.parametrize("kwargs", [dict(target_width=0), dict(gamma=0.0), dict(gamma=-1.0)])
def test_bad_config(kwargs):
    with pytest.raises(ValueError):
        PreprocessConfig(**kwargs)
