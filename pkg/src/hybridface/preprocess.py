"""Face normalization: resize, histogram equalization, gamma correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset_io import GrayImage
from .errors import ParameterError


@dataclass(frozen=True)
class PreprocessConfig:
    target_width: int = 46
    target_height: int = 56
    gamma: float = 1.0
    equalize: bool = True

    def __post_init__(self):
        if self.target_width < 1 or self.target_height < 1:
            raise ParameterError(
                f"target size must be positive, got {self.target_width}x{self.target_height}"
            )
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be > 0, got {self.gamma}")

    @property
    def vector_length(self) -> int:
        return self.target_width * self.target_height


def _round_half_up(x):
    return np.floor(x + 0.5)


def _sample_grid(n_out: int, n_in: int) -> np.ndarray:
    # corner-aligned: first and last output samples sit on the source corners
    if n_out == 1:
        return np.array([(n_in - 1) / 2.0])
    return np.arange(n_out) * ((n_in - 1) / (n_out - 1))


def resize(img: GrayImage, w: int, h: int) -> GrayImage:
    """Bilinear resize with corner-aligned sampling."""
    if w < 1 or h < 1:
        raise ParameterError(f"resize target must be positive, got {w}x{h}")
    if (w, h) == (img.width, img.height):
        return img
    src = img.pixels.astype(np.float64)
    ys = _sample_grid(h, img.height)
    xs = _sample_grid(w, img.width)
    y0 = np.clip(np.floor(ys).astype(int), 0, img.height - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, img.width - 1)
    y1 = np.minimum(y0 + 1, img.height - 1)
    x1 = np.minimum(x0 + 1, img.width - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bottom = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy) + bottom * fy
    return GrayImage(np.clip(_round_half_up(out), 0, 255).astype(np.uint8))


def equalize_histogram(img: GrayImage) -> GrayImage:
    """Classic CDF remapping; a constant image is returned unchanged."""
    px = img.pixels
    total = px.size
    cdf = np.cumsum(np.bincount(px.ravel(), minlength=256))
    cdf_min = cdf[cdf > 0][0]
    if cdf_min == total:
        return img
    lut = _round_half_up((cdf - cdf_min) / (total - cdf_min) * 255.0)
    lut = np.clip(lut, 0, 255).astype(np.uint8)
    return GrayImage(lut[px])


def gamma_correct(img: GrayImage, gamma: float) -> GrayImage:
    if not gamma > 0:
        raise ParameterError(f"gamma must be > 0, got {gamma}")
    levels = np.arange(256) / 255.0
    lut = np.clip(_round_half_up(levels ** gamma * 255.0), 0, 255).astype(np.uint8)
    return GrayImage(lut[img.pixels])


def flatten(img: GrayImage) -> np.ndarray:
    """Row-major pixel vector scaled to [0, 1]."""
    return img.pixels.ravel().astype(np.float64) / 255.0


def normalize(img: GrayImage, cfg: PreprocessConfig) -> np.ndarray:
    out = resize(img, cfg.target_width, cfg.target_height)
    if cfg.equalize:
        out = equalize_histogram(out)
    if cfg.gamma != 1.0:
        out = gamma_correct(out, cfg.gamma)
    return flatten(out)


def normalize_all(images, cfg: PreprocessConfig) -> np.ndarray:
    """Stack normalized faces as rows of an (n_images, vector_length) array."""
    return np.array([normalize(im, cfg) for im in images]).reshape(-1, cfg.vector_length)
