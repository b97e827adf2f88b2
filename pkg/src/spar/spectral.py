"""SVD, minimum-norm least squares and subspace projection."""

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-12


@dataclass(frozen=True)
class RankTolerance:
    """Relative threshold deciding which singular values count as positive.

    A singular value ``s`` of an ``N x D`` matrix is positive iff
    ``s > relative_threshold * s_max * max(N, D)``.
    """

    relative_threshold: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        if not (self.relative_threshold >= 0.0):
            raise ValueError(
                f"relative_threshold must be nonnegative, got {self.relative_threshold!r}"
            )

    def cutoff(self, singular_values, shape):
        if len(singular_values) == 0:
            return 0.0
        return self.relative_threshold * float(np.max(singular_values)) * max(shape)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Thin SVD ``m = left_vectors @ diag(singular_values) @ right_vectors``.

    ``right_vectors`` holds the right singular vectors as rows, so
    ``right_vectors[j]`` is the j-th eigenvector of ``m.T @ m``.
    """

    singular_values: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    numerical_rank: int
    shape: tuple
    cutoff: float

    @property
    def n_features(self):
        return self.shape[1]

    @property
    def positive(self):
        """Mask of singular values above the rank cutoff."""
        return self.singular_values > self.cutoff

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors


def _check_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def decompose(m, tol=None):
    """Thin SVD of ``m`` with deterministic signs.

    Each right singular vector is flipped so that its largest-magnitude
    entry is positive; the matching left vector is flipped with it.
    """
    tol = tol or RankTolerance()
    m = _check_matrix(m)
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"SVD did not converge: {exc}") from exc
    pivot = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), pivot])
    signs[signs == 0] = 1.0
    vt = vt * signs[:, None]
    u = u * signs[None, :]
    cutoff = tol.cutoff(s, m.shape)
    return Spectrum(
        singular_values=s,
        right_vectors=vt,
        left_vectors=u,
        numerical_rank=int(np.count_nonzero(s > cutoff)),
        shape=m.shape,
        cutoff=cutoff,
    )


def pinv_apply(spec, y):
    """Apply the pseudoinverse encoded by ``spec`` to ``y``.

    ``y`` may be a vector of length N or an ``N x T`` batch of target
    columns; the result has shape ``(D,)`` or ``(D, T)`` accordingly.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] != spec.shape[0]:
        raise ValueError(f"targets have {y.shape[0]} rows, matrix has {spec.shape[0]}")
    keep = spec.positive
    inv_s = np.zeros_like(spec.singular_values)
    inv_s[keep] = 1.0 / spec.singular_values[keep]
    coef = spec.left_vectors.T @ y
    if coef.ndim == 1:
        return spec.right_vectors.T @ (inv_s * coef)
    return spec.right_vectors.T @ (inv_s[:, None] * coef)


def pinv_solve(x, y, tol=None):
    """Minimum-norm least-squares weights ``pinv(x) @ y``."""
    x = _check_matrix(x, "x")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise ValueError(f"y must be a vector of length {x.shape[0]}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite entries")
    return pinv_apply(decompose(x, tol), y)


def project_out(w, basis, atol=1e-8):
    """Remove from ``w`` its components along an orthonormal ``basis``.

    ``basis`` is a sequence of unit vectors (or a ``k x D`` array of rows).
    ``w`` may also be a ``D x T`` batch of weight columns.
    """
    w = np.asarray(w, dtype=float)
    b = np.asarray(basis, dtype=float)
    if b.size == 0:
        return w.copy()
    b = np.atleast_2d(b)
    if b.shape[1] != w.shape[0]:
        raise ValueError(f"basis vectors have length {b.shape[1]}, weights {w.shape[0]}")
    gram = b @ b.T
    if not np.allclose(gram, np.eye(b.shape[0]), rtol=0.0, atol=atol):
        raise ValueError("basis is not orthonormal")
    return w - b.T @ (b @ w)
