"""Eigenfaces via the small M x M eigenproblem.

Faces are vectors of length N^2 (flattened pixels). The centered training
faces form the columns of A (N^2 x M); eigenvectors V of A^T A lift to
eigenfaces A V, which are then scaled to unit length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateDataError, ParameterError, ShapeError

ENERGY_FRACTION = 0.95
NOISE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class EigenModel:
    mean: np.ndarray         # (N^2,)
    eigenfaces: np.ndarray   # (N^2, m_prime), unit-norm columns
    eigenvalues: np.ndarray  # (m_prime,), eigenvalues of A^T A, descending
    n_train: int

    @property
    def m_prime(self) -> int:
        return self.eigenfaces.shape[1]

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def compute_mean(faces) -> np.ndarray:
    faces = np.asarray(faces, dtype=np.float64)
    if faces.ndim != 2 or faces.shape[0] == 0:
        raise ValueError("compute_mean needs a non-empty list of equal-length faces")
    return faces.mean(axis=0)


def center(faces, mean) -> np.ndarray:
    """Return A whose column i is face i minus the mean."""
    faces = np.asarray(faces, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    if faces.ndim != 2 or faces.shape[1] != mean.shape[0]:
        raise ShapeError(f"faces of shape {faces.shape} do not match mean of length {mean.shape[0]}")
    return (faces - mean).T


def default_m_prime(eigenvalues, fraction=ENERGY_FRACTION) -> int:
    """Smallest count whose eigenvalues hold `fraction` of the total."""
    lam = np.clip(np.asarray(eigenvalues, dtype=np.float64), 0.0, None)
    total = lam.sum()
    if total <= 0:
        return 0
    cum = np.cumsum(lam) / total
    return int(np.searchsorted(cum, fraction - 1e-12) + 1)


def fit_pca(a, m_prime: int | None = None, mean=None) -> EigenModel:
    """Fit eigenfaces to a centered data matrix `a` (N^2 x M).

    `m_prime=None` keeps the smallest count covering 95% of the variance.
    Components whose eigenvalue falls below 1e-12 of the largest are always
    dropped, so the model may hold fewer than `m_prime` eigenfaces.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"data matrix must be 2-D, got shape {a.shape}")
    n_pix, m = a.shape
    if m_prime is not None and not 1 <= m_prime <= m - 1:
        raise ParameterError(f"m_prime must lie in [1, {m - 1}], got {m_prime}")
    scale = max(1.0, float(np.max(np.abs(mean)))) if mean is not None else 1.0
    # rounding in the mean leaves ~1e-16 residue on identical faces
    if np.max(np.abs(a), initial=0.0) <= 1e-12 * scale:
        raise DegenerateDataError("training faces have no variation")

    pairs = linalg.eig_symmetric(a.T @ a)
    lam = pairs.values
    keep = lam > NOISE_FLOOR * lam[0]
    # centered data has rank <= M - 1
    n_valid = min(int(np.sum(keep)), m - 1)
    if n_valid == 0:
        raise DegenerateDataError("training faces have no variation")
    if m_prime is None:
        m_prime = default_m_prime(lam[:n_valid])
    k = min(m_prime, n_valid)

    u = a @ pairs.vectors[:, :k]
    u /= np.linalg.norm(u, axis=0)
    u = linalg.sign_normalize(u)
    if mean is None:
        mean = np.zeros(n_pix)
    return EigenModel(np.asarray(mean, dtype=np.float64).copy(), u, lam[:k].copy(), m)


def fit_pca_faces(faces, m_prime: int | None = None) -> EigenModel:
    """Mean, centering and eigenfaces from rows of training faces."""
    mean = compute_mean(faces)
    return fit_pca(center(faces, mean), m_prime, mean=mean)


def project_pca(model: EigenModel, face) -> np.ndarray:
    """Face-space weights of one face (1-D) or of each row of a 2-D array."""
    face = np.asarray(face, dtype=np.float64)
    if face.shape[-1] != model.dim:
        raise ShapeError(f"face length {face.shape[-1]} does not match model length {model.dim}")
    return (face - model.mean) @ model.eigenfaces


def reconstruct_pca(model: EigenModel, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape[-1] != model.m_prime:
        raise ShapeError(f"weight vector length {omega.shape[-1]} does not match m_prime {model.m_prime}")
    return model.mean + omega @ model.eigenfaces.T
