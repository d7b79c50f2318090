"""Input validation helpers shared by the public functions and estimators."""

import numpy as np

from .exceptions import DimensionMismatchError


def check_real_linear_map(T, name="T"):
    """Return ``T`` as a float array after checking it is square, even and finite.

    Parameters
    ----------
    T : array_like, shape (2n, 2n)
    name : str
        Used in error messages.

    Returns
    -------
    ndarray of float64
    """
    T = np.asarray(T)
    if np.iscomplexobj(T):
        if np.any(T.imag != 0):
            raise DimensionMismatchError(f"{name} must be real")
        T = T.real
    T = np.array(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {T.shape}")
    if T.shape[0] < 2 or T.shape[0] % 2:
        raise DimensionMismatchError(
            f"{name} must have even dimension >= 2, got {T.shape[0]}"
        )
    if not np.all(np.isfinite(T)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    return T


def check_matrix(M, name="M", complex_ok=True):
    M = np.asarray(M)
    if not complex_ok and np.iscomplexobj(M):
        raise DimensionMismatchError(f"{name} must be real")
    if M.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-dimensional, got {M.ndim}")
    if M.size == 0:
        raise DimensionMismatchError(f"{name} is empty")
    if not np.all(np.isfinite(M)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    return M


def check_chart_point(A, n=None, name="A"):
    """Check a chart point, a real ``2n x 2`` matrix."""
    A = np.array(check_matrix(A, name, complex_ok=False), dtype=float)
    if A.shape[1] != 2 or A.shape[0] % 2 or A.shape[0] < 2:
        raise DimensionMismatchError(f"{name} must be 2n x 2, got {A.shape}")
    if n is not None and A.shape[0] != 2 * n:
        raise DimensionMismatchError(f"{name} must be {2 * n} x 2, got {A.shape}")
    return A


def check_vector(x, dim=None, name="x"):
    x = np.array(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionMismatchError(f"{name} must have length {dim}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    return x


def check_points(X, dim=None, name="X"):
    """Check a batch of points stored row-wise, shape ``(m, dim)``."""
    X = np.array(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-dimensional, got {X.ndim}")
    if dim is not None and X.shape[1] != dim:
        raise DimensionMismatchError(f"{name} must have {dim} columns, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    return X


def check_unit_interval(t, name="t"):
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {t}")
    return t
