"""Dense matrix kernels: conjugate eigen-splits, Bezout projectors, rank tests."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_matrix, check_real_linear_map
from .exceptions import IllConditionedError, RankDeficientError, RealEigenvalueError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ConjugateSplit:
    """Orthonormal bases of the two halves of ``C^{2n}`` cut out by a real map.

    ``basis_plus`` spans the sum of the generalized eigenspaces whose
    eigenvalues have positive imaginary part; ``basis_minus`` is its
    entrywise conjugate and spans the other half.
    """

    ambient_dim: int
    basis_plus: np.ndarray
    basis_minus: np.ndarray

    @property
    def n(self):
        return self.ambient_dim // 2

    def projector_plus(self):
        """Oblique projector onto ``V+`` along ``V-``."""
        return _oblique_projectors(self.basis_plus, self.basis_minus)[0]

    def projector_minus(self):
        return _oblique_projectors(self.basis_plus, self.basis_minus)[1]


def _oblique_projectors(Bp, Bm):
    W = np.hstack([Bp, Bm])
    k = Bp.shape[1]
    Winv = np.linalg.inv(W)
    return Bp @ Winv[:k], Bm @ Winv[k:]


def has_real_eigenvalue(T, tol=DEFAULT_TOL):
    """Return True if some eigenvalue of ``T`` has ``|Im| <= tol``."""
    T = check_real_linear_map(T)
    return bool(np.any(np.abs(np.linalg.eigvals(T).imag) <= tol))


def min_abs_imag_eigenvalue(T):
    """Smallest ``|Im lambda|`` over the spectrum of ``T`` (or of a stack of maps)."""
    ev = np.linalg.eigvals(np.asarray(T, dtype=float))
    return np.min(np.abs(ev.imag), axis=-1)


def min_singular_value(M):
    """Smallest singular value of a real or complex matrix."""
    M = check_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False).min())


def orthonormalize(columns, tol=1e-12):
    """Orthonormal basis for the column span, keeping its orientation.

    The basis is the Q factor of a QR decomposition whose R has a positive
    real diagonal, so the change of basis is upper triangular with positive
    determinant.

    Parameters
    ----------
    columns : (m, k) array_like, real or complex
    tol : float
        Relative threshold on the smallest singular value.

    Returns
    -------
    (m, k) ndarray

    Raises
    ------
    RankDeficientError
        If the columns are numerically dependent.
    """
    M = check_matrix(columns, "columns")
    if not np.iscomplexobj(M):
        M = M.astype(float)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size < M.shape[1] or s[-1] <= tol * max(1.0, s[0]):
        raise RankDeficientError(
            f"columns are rank deficient (smallest singular value {s[-1]:.3e})"
        )
    Q, R = np.linalg.qr(M)
    d = np.diag(R)
    phase = d / np.abs(d)
    return Q * phase[np.newaxis, :]


def eigen_split(T, tol=DEFAULT_TOL):
    """Split ``C^{2n}`` into the upper and lower half-plane parts of ``T``.

    A complex Schur form reordered so eigenvalues with positive imaginary
    part come first gives an orthonormal basis of their invariant subspace,
    with no diagonalizability assumption.

    Parameters
    ----------
    T : (2n, 2n) array_like
    tol : float
        Eigenvalues with ``|Im| <= tol`` count as real.

    Returns
    -------
    ConjugateSplit

    Raises
    ------
    RealEigenvalueError
        If ``T`` has a real eigenvalue.
    IllConditionedError
        If the two halves are numerically indistinguishable.
    """
    T = check_real_linear_map(T)
    dim = T.shape[0]
    if has_real_eigenvalue(T, tol):
        raise RealEigenvalueError("map has a real eigenvalue; no conjugate split exists")
    _, Z, sdim = scipy.linalg.schur(
        T.astype(complex), output="complex", sort=lambda z: z.imag > 0
    )
    if sdim != dim // 2:
        raise IllConditionedError(
            f"reordered Schur form isolated {sdim} eigenvalues, expected {dim // 2}"
        )
    Bp = np.ascontiguousarray(Z[:, :sdim])
    Bm = Bp.conj()
    smin = np.linalg.svd(np.hstack([Bp, Bm]), compute_uv=False)[-1]
    if smin <= 1e-9:
        raise IllConditionedError(
            f"conjugate halves nearly coincide (smallest singular value {smin:.3e})"
        )
    return ConjugateSplit(dim, Bp, Bm)


def _sylvester(p, q):
    """Sylvester matrix for ``a p + b q = r`` with ``deg a < deg q``, ``deg b < deg p``."""
    m, n = len(p) - 1, len(q) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for j in range(n):
        S[j:j + m + 1, j] = p
    for j in range(m):
        S[j:j + n + 1, n + j] = q
    return S


def _polyval_matrix(coeffs, T):
    """Horner evaluation of a polynomial (highest degree first) at a matrix."""
    out = np.zeros(T.shape, dtype=complex)
    eye = np.eye(T.shape[0])
    for c in coeffs:
        out = out @ T + c * eye
    return out


def bezout_projectors(T, tol=DEFAULT_TOL, residual_tol=1e-6):
    """Spectral projectors of ``T`` from the Bezout identity ``a+ p+ + a- p- = 1``.

    ``p+`` and ``p-`` are the characteristic polynomials of ``T`` on the
    upper and lower halves of the spectrum. The cofactors come from a
    Sylvester solve, and ``Pi+ = a-(T) p-(T)``, ``Pi- = a+(T) p+(T)``.

    The map is shifted by the mean real part of its spectrum and scaled by the
    spectral radius of the shifted map before evaluation; the projectors are
    unchanged by this affine change of variable, and the polynomial values
    stay near unit size.

    Returns
    -------
    (Pi_plus, Pi_minus) : pair of (2n, 2n) complex ndarrays

    Raises
    ------
    RealEigenvalueError
    IllConditionedError
        If the cofactor solve residual exceeds ``residual_tol``.
    """
    T = check_real_linear_map(T)
    dim = T.shape[0]
    ev = np.linalg.eigvals(T)
    if np.any(np.abs(ev.imag) <= tol):
        raise RealEigenvalueError("map has a real eigenvalue; no Bezout split exists")
    center = ev.real.mean()
    scale = np.max(np.abs(ev - center))
    Ts = (T - center * np.eye(dim)) / scale
    ev = (ev - center) / scale
    upper = ev[ev.imag > 0]
    if upper.size != dim // 2:
        raise IllConditionedError("eigenvalues do not pair into conjugates")
    p_plus = np.poly(upper)
    p_minus = np.poly(upper.conj())
    S = _sylvester(p_plus, p_minus)
    rhs = np.zeros(dim, dtype=complex)
    rhs[-1] = 1.0
    try:
        sol = np.linalg.solve(S, rhs)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("Bezout system is singular") from exc
    residual = np.linalg.norm(S @ sol - rhs)
    if not np.isfinite(residual) or residual > residual_tol:
        raise IllConditionedError(f"Bezout cofactor residual {residual:.3e}")
    n = dim // 2
    a_plus, a_minus = sol[:n], sol[n:]
    pi_plus = _polyval_matrix(a_minus, Ts) @ _polyval_matrix(p_minus, Ts)
    pi_minus = _polyval_matrix(a_plus, Ts) @ _polyval_matrix(p_plus, Ts)
    return pi_plus, pi_minus


def orthogonal_projector(basis):
    """Orthogonal projector onto the span of orthonormal ``basis`` columns."""
    return basis @ basis.conj().T


def span_residual(B1, B2):
    """Mutual projection residual between two spans (0 when they agree).

    Both arguments are column bases; they are orthonormalized internally.
    """
    Q1 = np.linalg.svd(B1, full_matrices=False)[0]
    Q2 = np.linalg.svd(B2, full_matrices=False)[0]
    if Q1.shape[1] != Q2.shape[1]:
        return np.inf
    r1 = np.linalg.norm(Q1 - Q2 @ (Q2.conj().T @ Q1), 2)
    r2 = np.linalg.norm(Q2 - Q1 @ (Q1.conj().T @ Q2), 2)
    return float(max(r1, r2))


def range_basis(M, rank):
    """Leading ``rank`` left singular vectors of ``M``."""
    return np.linalg.svd(M)[0][:, :rank]
