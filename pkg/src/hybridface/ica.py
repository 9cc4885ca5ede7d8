"""Infomax ICA with sphering, following Bell & Sejnowski (1995).

Data matrices here hold one observation per row. In column form the
sphered data is X = W_Z (R - mean)^T, the learned matrix W acts as
u = W X, and the full unmixing is W_I = W W_Z. Basis coefficients are
B = (R - mean) W_I^{-1}, one row per training face; B W_I gives back the
centered input exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DivergenceError, ParameterError, RankError, ShapeError
from .pca import EigenModel, project_pca

RANK_TOL = 1e-10
DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class IcaConfig:
    learn_rate: float = 0.1
    max_passes: int = 2000
    convergence_cos: float = 1.0 - 1e-10
    block_size: int | None = None  # None = whole data set per update
    pca_prewhiten_dims: int | None = None  # None = the PCA branch's m_prime
    extended: bool = False

    def __post_init__(self):
        if not self.learn_rate > 0:
            raise ParameterError(f"learn_rate must be > 0, got {self.learn_rate}")
        if not 0 < self.convergence_cos <= 1:
            raise ParameterError(f"convergence_cos must lie in (0, 1], got {self.convergence_cos}")
        if self.block_size is not None and self.block_size < 1:
            raise ParameterError(f"block_size must be >= 1, got {self.block_size}")
        if self.max_passes < 1:
            raise ParameterError(f"max_passes must be >= 1, got {self.max_passes}")


@dataclass(frozen=True, eq=False)
class IcaModel:
    whitening: np.ndarray   # W_Z (d x d)
    learned: np.ndarray     # W (d x d)
    unmixing: np.ndarray    # W_I = W W_Z
    basis: np.ndarray       # B (n_train x d)
    row_means: np.ndarray   # (d,)
    pre_projection: EigenModel | None = None
    passes: int = 0
    mixing: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mixing", linalg.invert(self.unmixing))

    @property
    def n_components(self) -> int:
        return self.unmixing.shape[0]


def sphere(data):
    """Center the rows of `data` and build the whitening matrix.

    Returns (centered, w_z) where centered @ w_z.T has zero mean and
    identity covariance. W_Z = U E^{-1/2} U^T from the covariance
    eigenpairs (U, E); the trailing U^T rotates back to the input axes so
    that already-white data gives W_Z = I.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ShapeError(f"sphering needs at least 2 observations, got shape {data.shape}")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / data.shape[0]
    pairs = linalg.eig_symmetric(cov)
    lam = pairs.values
    if lam[-1] <= RANK_TOL * max(lam[0], 1e-300):
        raise RankError(
            f"covariance is singular (smallest eigenvalue {lam[-1]:.3e}); "
            "reduce dimension with a PCA pre-projection first"
        )
    u = pairs.vectors
    w_z = (u / np.sqrt(lam)) @ u.T
    return centered, w_z


def _logistic(u):
    return 0.5 * (1.0 + np.tanh(0.5 * u))


def learn_unmixing(white, cfg: IcaConfig) -> np.ndarray:
    """Natural-gradient infomax on sphered rows `white` (n x d).

    Per block X (d x b): u = W X and W += lr (I + (1 - 2 g(u)) u^T / b) W
    with logistic g. With `cfg.extended` the kurtosis-switching rule of
    Lee, Girolami & Sejnowski (1999) is used instead, which also separates
    sub-Gaussian sources. Stops once the cosine between W before and after
    a full pass reaches `cfg.convergence_cos`.
    """
    return _learn(white, cfg)[0]


def _learn(white, cfg):
    white = np.asarray(white, dtype=np.float64)
    n, d = white.shape
    x_all = white.T
    block = n if cfg.block_size is None else min(cfg.block_size, n)
    eye = np.eye(d)
    w = np.eye(d)
    for passes in range(1, cfg.max_passes + 1):
        w_old = w
        for start in range(0, n, block):
            x = x_all[:, start:start + block]
            b = x.shape[1]
            u = w @ x
            if cfg.extended:
                th = np.tanh(u)
                k = np.sign(np.mean(1 - th * th, axis=1) * np.mean(u * u, axis=1)
                            - np.mean(th * u, axis=1))
                k[k == 0] = 1.0
                grad = eye - (k[:, None] * th) @ u.T / b - u @ u.T / b
            else:
                grad = eye + (1.0 - 2.0 * _logistic(u)) @ u.T / b
            w = w + cfg.learn_rate * grad @ w
        if not np.all(np.isfinite(w)) or np.max(np.abs(w)) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"unmixing diverged after {passes} passes; use a smaller learn_rate"
            )
        cos = np.sum(w * w_old) / (np.linalg.norm(w) * np.linalg.norm(w_old))
        if cos >= cfg.convergence_cos:
            break
    return w, passes


def fit_ica(r, cfg: IcaConfig = IcaConfig(), pre_projection: EigenModel | None = None) -> IcaModel:
    """Learn W_I and the basis coefficients B from training rows `r`.

    With `pre_projection`, `r` holds raw face vectors that are first mapped
    into its face space.
    """
    r = np.asarray(r, dtype=np.float64)
    x = project_pca(pre_projection, r) if pre_projection is not None else r
    centered, w_z = sphere(x)
    w, passes = _learn(centered @ w_z.T, cfg)
    w_i = w @ w_z
    mixing = linalg.invert(w_i)
    basis = centered @ mixing
    return IcaModel(w_z, w, w_i, basis, x.mean(axis=0), pre_projection,
                    passes=passes)


def project_ica(model: IcaModel, probe) -> np.ndarray:
    """B_test = (probe - mean) W_I^{-1}, after the optional pre-projection."""
    probe = np.asarray(probe, dtype=np.float64)
    if model.pre_projection is not None:
        x = project_pca(model.pre_projection, probe)
    else:
        if probe.shape[-1] != model.n_components:
            raise ShapeError(
                f"probe length {probe.shape[-1]} does not match {model.n_components} components"
            )
        x = probe
    return (x - model.row_means) @ model.mixing


def sources(model: IcaModel, r) -> np.ndarray:
    """Independent components W_I (x - mean) for each row of `r`."""
    r = np.asarray(r, dtype=np.float64)
    x = project_pca(model.pre_projection, r) if model.pre_projection is not None else r
    return (x - model.row_means) @ model.unmixing.T
