"""Principal angles between subspaces, and isometries that align pairs of them.

Three settings are covered: two real subspaces of ``R^n``, two complex
subspaces of ``C^n``, and a complex subspace of ``C^{2n}`` against its own
conjugate. Angles come from a singular value decomposition of the cross-Gram
matrix; ``principal_angles_greedy`` keeps the slow minimize-then-recurse
definition around as an independent check.
"""

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from ._validation import check_matrix
from .exceptions import (
    DegenerateSplitError,
    DimensionMismatchError,
    MismatchError,
    NotTransverseError,
)
from .numeric import orthonormalize

ORTHONORMAL_TOL = 1e-10


def _check_orthonormal(basis, complex_ok):
    B = check_matrix(basis, "basis", complex_ok=complex_ok)
    B = np.array(B, dtype=complex if complex_ok else float)
    n, k = B.shape
    if not 1 <= k <= n:
        raise DimensionMismatchError(f"basis must be n x k with 1 <= k <= n, got {B.shape}")
    if np.linalg.norm(B.conj().T @ B - np.eye(k)) > ORTHONORMAL_TOL:
        raise ValueError("basis columns are not orthonormal")
    B.setflags(write=False)
    return B


@dataclass(frozen=True, eq=False)
class RealSubspace:
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", _check_orthonormal(self.basis, False))

    @classmethod
    def from_span(cls, columns):
        return cls(orthonormalize(np.asarray(columns, dtype=float)))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def transformed(self, g):
        return RealSubspace.from_span(g @ self.basis)


@dataclass(frozen=True, eq=False)
class ComplexSubspace:
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", _check_orthonormal(self.basis, True))

    @classmethod
    def from_span(cls, columns):
        return cls(orthonormalize(np.asarray(columns, dtype=complex)))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def conjugate(self):
        return ComplexSubspace(self.basis.conj())

    def transformed(self, g):
        return ComplexSubspace.from_span(g @ self.basis)


@dataclass(frozen=True, eq=False)
class AngleProfile:
    """Sorted principal angles with the paired bases that realize them.

    ``basis_first[:, r]`` and ``basis_second[:, r]`` make angle
    ``angles[r]``; columns with different indices are orthogonal.
    """

    angles: np.ndarray
    basis_first: np.ndarray
    basis_second: np.ndarray

    @property
    def k(self):
        return self.angles.size

    def pairing_residual(self):
        """Largest ``|<v_r, w_s>|`` over ``r != s``."""
        G = self.basis_first.conj().T @ self.basis_second
        off = G - np.diag(np.diag(G))
        return float(np.max(np.abs(off))) if off.size else 0.0


def _check_pair(P, Q):
    if P.ambient_dim != Q.ambient_dim or P.dim != Q.dim:
        raise DimensionMismatchError(
            f"subspaces differ in shape: {P.basis.shape} vs {Q.basis.shape}"
        )


def _paired_angles(s, V, W):
    """Angles of phase-aligned pairs ``(v_r, w_r)`` with ``<v_r, w_r> = s_r``.

    ``arccos`` loses half the digits near 0, so near-parallel pairs use the
    chord instead: ``theta = 2 arcsin(|v - w| / 2)``.
    """
    s = np.clip(s, 0.0, 1.0)
    chord = np.linalg.norm(V - W, axis=0)
    small = 2 * np.arcsin(np.clip(chord / 2, 0.0, 1.0))
    return np.where(s > 0.5, small, np.arccos(s))


def _svd_profile(Bp, Bq):
    U, s, Vh = np.linalg.svd(Bp.conj().T @ Bq)
    V = Bp @ U
    W = Bq @ Vh.conj().T
    return AngleProfile(_paired_angles(s, V, W), V, W)


def principal_angles_real(P, Q):
    """Principal angles between two real ``k``-planes of ``R^n``.

    Raises
    ------
    DimensionMismatchError
    """
    _check_pair(P, Q)
    return _svd_profile(P.basis, Q.basis)


def principal_angles_complex(P, Q):
    """Principal angles between two complex ``k``-planes of ``C^n``.

    Each angle stands for a pair of equal real angles (``v`` and ``iv``).
    """
    _check_pair(P, Q)
    return _svd_profile(P.basis, Q.basis)


def _takagi(M, zero_tol=1e-9):
    """Takagi factorization ``M = U diag(s) U^T`` of a complex symmetric matrix.

    The columns of ``U`` with positive ``s`` come from the positive
    eigenvectors ``[x; y]`` of the real symmetric matrix
    ``[[Re M, Im M], [Im M, -Re M]]`` (``u = x + iy``). Columns for ``s = 0``
    are any orthonormal completion. ``s`` is returned in descending order.
    """
    k = M.shape[0]
    A, B = M.real, M.imag
    H = np.block([[A, B], [B, -A]])
    w, X = np.linalg.eigh((H + H.T) / 2)
    order = np.argsort(w)[::-1]
    w, X = w[order], X[:, order]
    npos = int(np.sum(w[:k] > zero_tol))
    U = X[:k, :npos] + 1j * X[k:, :npos]
    s = w[:npos]
    if npos < k:
        if npos:
            full = np.linalg.svd(U, full_matrices=True)[0]
            comp = full[:, npos:]
        else:
            comp = np.eye(k, dtype=complex)
        U = np.hstack([U, comp])
        s = np.concatenate([s, np.zeros(k - npos)])
    # rotate u -> exp(i phi) u so that u^H M conj(u) is real and nonnegative
    d = np.einsum("ij,ij->j", U.conj(), M @ U.conj())
    phase = np.where(np.abs(d) > zero_tol, np.exp(0.5j * np.angle(d)), 1.0)
    return U * phase, s


def principal_angles_conjugate(P, tol=1e-9):
    """Principal angles between a complex subspace of ``C^{2n}`` and its conjugate.

    The first basis ``v_r`` is normalized so that its partner is exactly
    ``conj(v_r)``: each ``v_r`` is the point of its complex line that
    meets its own conjugate at the principal angle.

    Raises
    ------
    NotTransverseError
        If ``P`` meets ``conj(P)`` beyond the origin.
    """
    B = P.basis
    smin = np.linalg.svd(np.hstack([B, B.conj()]), compute_uv=False)[-1]
    if smin <= tol:
        raise NotTransverseError(
            f"subspace meets its conjugate (smallest singular value {smin:.3e})"
        )
    # M = B^H conj(B) is complex symmetric, so its SVD pairing can be
    # realized by conjugate partners
    M = B.conj().T @ B.conj()
    U, s = _takagi((M + M.T) / 2)
    V = B @ U
    return AngleProfile(_paired_angles(s, V, V.conj()), V, V.conj())


def _max_overlap(Bp, Bq, rng, n_starts, complex_):
    """Maximize ``||Bq^H Bp a||`` over unit ``a`` by sampling and local refinement."""
    k = Bp.shape[1]
    G = Bq.conj().T @ Bp

    def unpack(z):
        a = z[:k] + 1j * z[k:] if complex_ else z
        return a / np.linalg.norm(a)

    def objective(z):
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        return -np.linalg.norm(G @ unpack(z))

    dim = 2 * k if complex_ else k
    starts = rng.standard_normal((n_starts, dim))
    values = np.array([objective(z) for z in starts])
    best = None
    for idx in np.argsort(values)[:5]:
        res = scipy.optimize.minimize(
            objective, starts[idx], method="BFGS", options={"gtol": 1e-12}
        )
        if best is None or res.fun < best.fun:
            best = res
    return unpack(best.x)


def principal_angles_greedy(P, Q, n_starts=400, seed=0):
    """Principal angles by the greedy definition (slow oracle).

    Find the smallest angle any unit vector of ``P`` makes with ``Q``, take
    that vector and its nearest neighbour in ``Q``, pass to their orthogonal
    complements inside ``P`` and ``Q``, and repeat. The outer search uses
    random starts on the sphere plus BFGS refinement; the inner nearest
    neighbour is the normalized projection.
    """
    _check_pair(P, Q)
    complex_ = np.iscomplexobj(P.basis) or np.iscomplexobj(Q.basis)
    rng = np.random.default_rng(seed)
    Bp, Bq = P.basis.copy(), Q.basis.copy()
    angles, vs, ws = [], [], []
    for _ in range(P.dim):
        a = _max_overlap(Bp, Bq, rng, n_starts, complex_)
        v = Bp @ a
        proj = Bq @ (Bq.conj().T @ v)
        c = np.linalg.norm(proj)
        w = proj / c if c > 1e-14 else Bq[:, 0]
        angles.append(np.arccos(min(c, 1.0)))
        vs.append(v)
        ws.append(w)
        Bp = _complement_within(Bp, v)
        Bq = _complement_within(Bq, w)
    return AngleProfile(np.array(angles), np.column_stack(vs), np.column_stack(ws))


def _complement_within(B, v):
    """Orthonormal basis of the complement of ``v`` inside ``span(B)``."""
    c = B.conj().T @ v
    if B.shape[1] == 1:
        return B[:, :0]
    full = np.linalg.svd(c[:, np.newaxis], full_matrices=True)[0]
    return B @ full[:, 1:]


def _check_profiles(p1, p2, tol):
    if p1.k != p2.k:
        raise MismatchError("profiles have different lengths")
    gap = float(np.max(np.abs(p1.angles - p2.angles)))
    if gap > tol:
        raise MismatchError(f"principal angles differ by {gap:.3e}")
    return gap


def _pair_frame(profile, degenerate_tol=1e-8):
    """Orthonormal frame adapted to a paired basis.

    For each pair, the first vector and (when the angle is not zero) the
    unit component of the partner orthogonal to it.
    """
    cols = []
    for theta, v, w in zip(profile.angles, profile.basis_first.T, profile.basis_second.T):
        cols.append(v)
        if theta > degenerate_tol:
            f = w - np.cos(theta) * v
            cols.append(f / np.linalg.norm(f))
    return np.column_stack(cols)


def _complete_isometry(S, S2):
    """Orthogonal map sending the orthonormal columns of ``S`` to those of ``S2``."""
    n, m = S.shape
    if m == n:
        return S2 @ S.T
    C = np.linalg.svd(S, full_matrices=True)[0][:, m:]
    C2 = np.linalg.svd(S2, full_matrices=True)[0][:, m:]
    return S2 @ S.T + C2 @ C.T


def subspace_residual(F, src, dst):
    """``||(I - Pi_dst) F src||`` for orthonormal bases ``src`` and ``dst``."""
    img = F @ src
    return float(np.linalg.norm(img - dst @ (dst.conj().T @ img), 2))


def aligning_isometry_real(P, Q, P2, Q2, tol=1e-8):
    """Orthogonal ``F`` with ``F(P) = P2`` and ``F(Q) = Q2``.

    Paired bases of the two pairs are matched vector by vector and the map
    is completed orthonormally on what is left.

    Raises
    ------
    MismatchError
        If the two pairs have different principal angles.
    """
    _check_pair(P, Q)
    _check_pair(P2, Q2)
    _check_pair(P, P2)
    prof = principal_angles_real(P, Q)
    prof2 = principal_angles_real(P2, Q2)
    _check_profiles(prof, prof2, tol)
    # use one degeneracy decision for both pairs
    mean_angles = (prof.angles + prof2.angles) / 2
    prof = AngleProfile(mean_angles, prof.basis_first, prof.basis_second)
    prof2 = AngleProfile(mean_angles, prof2.basis_first, prof2.basis_second)
    return _complete_isometry(_pair_frame(prof), _pair_frame(prof2))


def real_imaginary_frame(profile, tol=1e-10):
    """Split each coincidence-normalized ``v`` as ``cos b * r + i sin b * m``.

    Returns the real unit vectors ``r`` and ``m`` (as columns) and the
    angles ``b``; ``r`` and ``m`` are orthogonal for a normalized ``v``.
    """
    V = profile.basis_first
    re, im = V.real, V.imag
    cr = np.linalg.norm(re, axis=0)
    ci = np.linalg.norm(im, axis=0)
    bad = (cr < tol) | (ci < tol)
    if np.any(bad):
        raise DegenerateSplitError("a conjugate-split vector is purely real or imaginary")
    return re / cr, im / ci, np.arctan2(ci, cr)


def aligning_isometry_conjugate(P, Q, tol=1e-8):
    """Real orthogonal ``F`` of ``R^{2n}`` with ``F(P) = Q`` (hence ``F(conj P) = conj Q``).

    With coincidence-normalized bases ``v = cos b * r + i sin b * m`` the
    real frames ``(r, m)`` of the two subspaces are matched and the map is
    completed by any real orthogonal map between the complements, so ``F``
    commutes with conjugation by construction.

    Raises
    ------
    MismatchError
    NotTransverseError
    """
    _check_pair(P, Q)
    prof = principal_angles_conjugate(P)
    prof2 = principal_angles_conjugate(Q)
    _check_profiles(prof, prof2, tol)
    r, m, _ = real_imaginary_frame(prof)
    r2, m2, _ = real_imaginary_frame(prof2)
    S = np.column_stack([r, m])
    S2 = np.column_stack([r2, m2])
    return _complete_isometry(S, S2)
