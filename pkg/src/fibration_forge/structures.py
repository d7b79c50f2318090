"""Linear complex structures and the two-stage retraction onto orthogonal ones.

Stage one moves a map ``T`` with no real eigenvalues along the straight
segment to the complex structure ``J_T`` that is ``+i`` on the upper half of
its spectrum and ``-i`` on the lower half. Stage two opens the angles between
the ``+i`` and ``-i`` eigenspaces of ``J_T`` until they are orthogonal.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_real_linear_map, check_unit_interval
from .angles import ComplexSubspace, principal_angles_conjugate, real_imaginary_frame
from .exceptions import IllConditionedError, NotOrthogonalError
from .numeric import DEFAULT_TOL, eigen_split

STRUCTURE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """A real map ``J`` with ``J @ J = -I``.

    Parameters
    ----------
    matrix : (2n, 2n) ndarray
    orthogonal : bool
        Set when ``J`` is also orthogonal; checked on construction.
    """

    matrix: np.ndarray
    orthogonal: bool = False

    def __post_init__(self):
        J = check_real_linear_map(self.matrix, "J")
        scale = max(1.0, np.linalg.norm(J, 2) ** 2)
        if np.linalg.norm(J @ J + np.eye(J.shape[0]), 2) > STRUCTURE_TOL * scale:
            raise ValueError("matrix does not square to -I")
        if self.orthogonal and np.linalg.norm(J.T @ J - np.eye(J.shape[0]), 2) > STRUCTURE_TOL:
            raise NotOrthogonalError("matrix flagged orthogonal is not orthogonal")
        J.setflags(write=False)
        object.__setattr__(self, "matrix", J)

    @classmethod
    def standard(cls, dim):
        """Block-diagonal 90 degree rotations, ``J e1 = e2``."""
        if dim % 2:
            raise ValueError("dimension must be even")
        return cls(np.kron(np.eye(dim // 2), [[0.0, -1.0], [1.0, 0.0]]), orthogonal=True)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_structure_matrix(J):
    return check_real_linear_map(getattr(J, "matrix", J), "J")


def _as_structure(J):
    if isinstance(J, ComplexStructure):
        return J
    J = check_real_linear_map(J, "J")
    return ComplexStructure(J, orthogonal=_orthogonality_residual(J) < STRUCTURE_TOL)


def _orthogonality_residual(J):
    return float(np.linalg.norm(J.T @ J - np.eye(J.shape[0]), 2))


def _structure_from_split(Bp):
    """Real matrix that is ``+i`` on ``span(Bp)`` and ``-i`` on its conjugate."""
    W = np.hstack([Bp, Bp.conj()])
    k = Bp.shape[1]
    D = np.concatenate([np.full(k, 1j), np.full(k, -1j)])
    Jc = (W * D) @ np.linalg.inv(W)
    scale = max(1.0, np.linalg.norm(Jc.real, 2))
    if np.linalg.norm(Jc.imag, 2) > 1e-8 * scale:
        raise IllConditionedError(
            f"realification left imaginary part {np.linalg.norm(Jc.imag, 2):.3e}"
        )
    return Jc.real


def make_complex_structure(T, tol=DEFAULT_TOL):
    """The complex structure ``J_T`` sharing the generalized eigenspaces of ``T``.

    ``J_T`` acts as ``+i`` on eigenspaces with positive imaginary part and
    as ``-i`` on the rest.

    Raises
    ------
    RealEigenvalueError
    """
    split = eigen_split(T, tol)
    T = check_real_linear_map(T)
    if np.linalg.norm(T @ T + np.eye(T.shape[0]), 2) <= 1e-13 * max(1.0, np.linalg.norm(T, 2) ** 2):
        # already a complex structure: J_T = T, without rounding
        J = T
    else:
        J = _structure_from_split(split.basis_plus)
    return ComplexStructure(J, orthogonal=_orthogonality_residual(J) < STRUCTURE_TOL)


def mckay_path(T, t, tol=DEFAULT_TOL):
    """Point ``(1 - t) T + t J_T`` of the segment from ``T`` to its complex structure."""
    t = check_unit_interval(t)
    T = check_real_linear_map(T)
    J = make_complex_structure(T, tol).matrix
    return (1 - t) * T + t * J


def is_orthogonal_structure(J, tol=STRUCTURE_TOL, n_probe=64, seed=0):
    """True if ``J`` is orthogonal.

    ``||J^T J - I|| < tol`` is the decision; a probe of random vectors
    checking ``|v . Jv| / |v|^2 < tol`` must agree with it.
    """
    J = as_structure_matrix(J)
    by_matrix = _orthogonality_residual(J) < tol
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((n_probe, J.shape[0]))
    ratio = np.abs(np.einsum("ij,ij->i", V, V @ J.T)) / np.einsum("ij,ij->i", V, V)
    by_probe = bool(np.max(ratio) < tol)
    return by_matrix and by_probe


def split_orthogonality_defect(J):
    """Operator norm of the Hermitian cross-Gram between ``V+`` and ``V-``.

    This is the cosine of the smallest principal angle between the two
    eigenspaces, and vanishes exactly for orthogonal structures.
    """
    Bp = eigen_split(as_structure_matrix(J)).basis_plus
    return float(np.linalg.norm(Bp.conj().T @ Bp.conj(), 2))


def scissors_frame(J):
    """Real frames and half-angles that drive the scissors deformation.

    Returns ``(r, m, beta)``: orthonormal real columns ``r_i`` and ``m_i``
    with ``v_i = cos(beta_i) r_i + i sin(beta_i) m_i`` a coincidence-normalized
    basis of the ``+i`` eigenspace of ``J``. ``beta_i`` is half the
    principal angle between that eigenspace and its conjugate.
    """
    J = as_structure_matrix(J)
    Bp = eigen_split(J).basis_plus
    profile = principal_angles_conjugate(ComplexSubspace(Bp))
    r, m, beta = real_imaginary_frame(profile)
    frame = np.column_stack([r, m])
    if np.linalg.norm(frame.T @ frame - np.eye(frame.shape[1]), 2) > 1e-7:
        raise IllConditionedError("scissors planes are not mutually orthogonal")
    return r, m, beta


def scissors_structure(r, m, beta, t):
    """Complex structure with ``+i`` eigenvectors ``cos b(t) r + i sin b(t) m``.

    ``b(t) = (1 - t) beta + t pi/4``. On the plane ``span{r, m}`` the
    structure sends ``r -> -tan b(t) m`` and ``m -> cot b(t) r``.
    """
    t = check_unit_interval(t)
    b = (1 - t) * np.asarray(beta) + t * np.pi / 4
    c, s = np.cos(b), np.sin(b)
    return (r * (c / s)) @ m.T - (m * (s / c)) @ r.T


def open_scissors(J, t):
    """Deform ``J`` toward an orthogonal complex structure.

    The principal angles between the ``+i`` and ``-i`` eigenspaces open at
    rates proportional to their distance from a right angle, so all reach
    it together at ``t = 1``. Conjugate eigenspaces stay conjugate, so every
    intermediate structure is real.

    Raises
    ------
    DegenerateSplitError
        If a normalized eigenvector is numerically purely real or imaginary.
    """
    J = _as_structure(J)
    r, m, beta = scissors_frame(J.matrix)
    Jt = scissors_structure(r, m, beta, t)
    return ComplexStructure(Jt, orthogonal=_orthogonality_residual(Jt) < STRUCTURE_TOL)


def full_retraction(T, t, tol=DEFAULT_TOL):
    """Two-stage retraction of ``T`` onto an orthogonal complex structure.

    ``t`` in ``[0, 1/2]`` runs the segment to ``J_T``; ``t`` in ``[1/2, 1]``
    opens the scissors on ``J_T``.
    """
    return RetractionPath.of(T, tol)(t)


@dataclass(frozen=True, eq=False)
class RetractionPath:
    """A precomputed retraction path that can be evaluated at any ``t``."""

    T: np.ndarray
    J: ComplexStructure
    r: np.ndarray
    m: np.ndarray
    beta: np.ndarray

    @classmethod
    def of(cls, T, tol=DEFAULT_TOL):
        T = check_real_linear_map(T)
        J = make_complex_structure(T, tol)
        r, m, beta = scissors_frame(J.matrix)
        return cls(T, J, r, m, beta)

    def __call__(self, t):
        t = check_unit_interval(t)
        if t <= 0.5:
            s = 2 * t
            return (1 - s) * self.T + s * self.J.matrix
        return scissors_structure(self.r, self.m, self.beta, 2 * t - 1)

    def sample(self, ts):
        return np.stack([self(t) for t in ts])

    @property
    def junction_residual(self):
        """Gap at ``t = 1/2`` between the two stages."""
        return float(np.linalg.norm(scissors_structure(self.r, self.m, self.beta, 0.0)
                                    - self.J.matrix, 2))

    @property
    def endpoint(self):
        return self(1.0)
