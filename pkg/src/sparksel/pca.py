"""Principal component analysis with a cyclic Jacobi eigensolver.

The covariance matrix (n - 1 normalization) is diagonalized by plane
rotations swept over all index pairs until the off-diagonal Frobenius
norm drops below 1e-10.  Component count k is the smallest prefix of
the descending eigenvalue sequence whose cumulative explained-variance
ratio reaches the requested threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, InvariantError

OFF_DIAG_TOL = 1e-10
MAX_SWEEPS = 100


def jacobi_eigh(A):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, vectors) with eigenvalues descending and
    vectors[i] the unit eigenvector for eigenvalues[i], sign-fixed so
    each vector's largest-magnitude entry is positive.
    """
    A = np.array(A, dtype=np.float64)
    d = A.shape[0]
    if A.shape != (d, d) or not np.allclose(A, A.T, atol=1e-12):
        raise DataError("jacobi_eigh needs a symmetric square matrix")
    V = np.eye(d)

    off_mask = ~np.eye(d, dtype=bool)

    def off(M):
        # sum only the off-diagonal squares; subtracting diag(M)^2 from
        # the full Frobenius norm cancels catastrophically near zero
        return float(np.sqrt(np.sum(M[off_mask] ** 2)))

    sweeps = 0
    while off(A) >= OFF_DIAG_TOL:
        if sweeps >= MAX_SWEEPS:
            raise InvariantError("jacobi sweep limit hit; off=%g" % off(A))
        sweeps += 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0

                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    vals = np.diag(A).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = V[:, order].T.copy()
    for i in range(d):
        peak = int(np.argmax(np.abs(vecs[i])))
        if vecs[i, peak] < 0.0:
            vecs[i] = -vecs[i]
    return vals, vecs


@dataclass(frozen=True, eq=False)
class PCAModel:
    """Fitted basis: rows of ``components`` are eigenvectors of the
    covariance matrix in descending eigenvalue order; the first ``k``
    are retained for projection."""

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    k: int
    variance_threshold: float

    @property
    def explained_ratio(self):
        """Cumulative explained-variance fractions, one per component."""
        total = float(self.eigenvalues.sum())
        if total == 0.0:
            return np.zeros(self.eigenvalues.size)
        return np.cumsum(self.eigenvalues) / total

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        return (X - self.mean) @ self.components[: self.k].T

    def reconstruct(self, Z):
        Z = np.asarray(Z, dtype=np.float64)
        return Z @ self.components[: self.k] + self.mean


def fit(X, variance_threshold: float = 0.95) -> PCAModel:
    """Fit a PCA basis on rows of X.

    Parameters
    ----------
    X : ndarray, shape (n, d)
        Data matrix, n >= 2.
    variance_threshold : float
        Target cumulative explained-variance ratio in (0, 1]; k is the
        smallest component count reaching it.  Degenerate data with
        zero total variance keeps a single component.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("PCA needs a 2-D matrix with at least 2 rows")
    if not 0.0 < variance_threshold <= 1.0:
        raise DataError("variance_threshold must lie in (0, 1]")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (X.shape[0] - 1)
    vals, vecs = jacobi_eigh(cov)
    vals = np.maximum(vals, 0.0)  # covariance is PSD; clip rotation dust

    total = float(vals.sum())
    if total == 0.0:
        k = 1
    else:
        ratios = np.cumsum(vals) / total
        k = int(np.searchsorted(ratios, variance_threshold - 1e-12) + 1)
        k = min(k, vals.size)
    return PCAModel(
        mean=mean,
        components=vecs,
        eigenvalues=vals,
        k=k,
        variance_threshold=variance_threshold,
    )
