"""Dense symmetric eigensolver, inverse and checked products.

Matrices are plain float64 numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ShapeError, SingularMatrixError, SymmetryError

MAX_SWEEPS = 100
OFF_TOL = 1e-12
SYMMETRY_TOL = 1e-9
COND_LIMIT = 1e12


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray   # descending
    vectors: np.ndarray  # column j pairs with values[j]


def _as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair once (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        rounds.append((np.array([min(p) for p in pairs]), np.array([max(p) for p in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive."""
    vectors = np.array(vectors, dtype=np.float64)
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_symmetric(m, max_sweeps: int = MAX_SWEEPS) -> EigenPairs:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Rotations are scheduled in round-robin rounds of disjoint pairs so each
    round is applied as one vectorized update; within a round the rotations
    commute, so this matches sequential cyclic Jacobi on the same pairs.
    """
    a = _as_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"eig_symmetric needs a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(a)) if n else 0.0
    asym = np.max(np.abs(a - a.T)) if n else 0.0
    if asym > SYMMETRY_TOL * max(scale, 1e-300):
        raise SymmetryError(f"matrix asymmetry {asym:.3e} exceeds tolerance")

    a = (a + a.T) / 2.0
    if n == 0:
        return EigenPairs(np.zeros(0), np.zeros((0, 0)))
    size = n + (n % 2)
    if size != n:
        # pad with an isolated zero so every index has a partner; its
        # row and column stay zero, so it never rotates
        a = np.pad(a, ((0, 1), (0, 1)))
    v = np.eye(size)
    fro = np.linalg.norm(a)
    rounds = _round_robin(size) if size > 1 else []

    def off_norm():
        return np.linalg.norm(a - np.diag(np.diag(a)))

    for _ in range(max_sweeps + 1):
        if off_norm() <= OFF_TOL * fro:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            with np.errstate(over="ignore"):
                # |tau| -> inf gives t -> 0, the correct limit
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c - aq * s
            a[:, q] = ap * s + aq * c
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.diag(a)[:n].copy()
    vectors = v[:n, :n]
    order = np.argsort(-values, kind="stable")
    return EigenPairs(values[order], sign_normalize(vectors[:, order]))


def invert(m) -> np.ndarray:
    """Gauss-Jordan elimination with partial pivoting."""
    a = _as_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"invert needs a square matrix, got {a.shape}")
    aug = np.hstack([a, np.eye(n)])
    norm1 = np.max(np.sum(np.abs(a), axis=0)) if n else 0.0
    floor = np.finfo(float).eps * max(norm1, 1e-300) * n
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[piv, col]
        if abs(pivot) <= floor:
            raise SingularMatrixError(
                f"matrix is singular (pivot {abs(pivot):.3e} in column {col})", abs(pivot)
            )
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= pivot
        factors = aug[:, col].copy()
        factors[col] = 0.0
        aug -= np.outer(factors, aug[col])
    inv = aug[:, n:]
    cond = norm1 * np.max(np.sum(np.abs(inv), axis=0)) if n else 1.0
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(
            f"matrix is ill-conditioned (condition estimate {cond:.3e})",
            float(np.min(np.abs(np.diag(a)))) if n else 0.0,
        )
    return inv


def matmul(a, b) -> np.ndarray:
    a = _as_matrix(a, "left operand")
    b = _as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b
