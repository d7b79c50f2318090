"""Oriented 2-planes, the graph chart around a plane, and bad-cone tests.

A plane ``Q`` near ``P`` is written as the graph of a linear map
``P -> P^perp``. With orthonormal frames ``(e1, e2)`` of ``P`` and
``(f1, ..., f2n)`` of ``P^perp`` that map is a real ``2n x 2`` matrix
``A = A1 | A2`` (a *chart point*), and ``Q`` is spanned by
``e1 + A1, e2 + A2``. Chart points are plain ndarrays.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import check_chart_point, check_matrix, check_real_linear_map, check_vector
from .exceptions import (
    DimensionMismatchError,
    NotInChartError,
    NotInvariantError,
    TangencyError,
)
from .numeric import DEFAULT_TOL, has_real_eigenvalue, min_abs_imag_eigenvalue, orthonormalize
from .report import CheckRecord, Report

ROTATE_90 = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class OrientedTwoPlane:
    """An oriented 2-plane in ``R^{2n+2}`` given by an orthonormal frame.

    Parameters
    ----------
    frame : (2n+2, 2) ndarray
        Orthonormal columns; their order fixes the orientation.
    """

    frame: np.ndarray

    def __post_init__(self):
        F = np.array(check_matrix(self.frame, "frame", complex_ok=False), dtype=float)
        if F.shape[1] != 2 or F.shape[0] < 4 or F.shape[0] % 2:
            raise DimensionMismatchError(f"frame must be (2n+2) x 2, got {F.shape}")
        if np.linalg.norm(F.T @ F - np.eye(2)) > 1e-10:
            raise ValueError("frame columns are not orthonormal")
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @classmethod
    def from_vectors(cls, u, v):
        """Orientation-preserving orthonormalization of ``(u, v)``."""
        return cls(orthonormalize(np.column_stack([u, v])))

    @classmethod
    def standard(cls, n):
        """The plane ``span{e1, e2}`` in ``R^{2n+2}``."""
        return cls(np.eye(2 * n + 2)[:, :2])

    @property
    def ambient_dim(self):
        return self.frame.shape[0]

    @property
    def n(self):
        return self.ambient_dim // 2 - 1

    @cached_property
    def complement(self):
        """Orthonormal frame of ``P^perp`` with ``(frame | complement)`` positively oriented.

        Built by pivoted Gram-Schmidt over the standard basis, so for
        ``P = span{e1, e2}`` it is ``(e3, ..., e_{2n+2})``.
        """
        m = self.ambient_dim
        basis = [self.frame[:, 0], self.frame[:, 1]]
        remaining = list(range(m))
        for _ in range(m - 2):
            Q = np.column_stack(basis)
            best, best_norm, best_vec = None, -1.0, None
            for j in remaining:
                r = np.zeros(m)
                r[j] = 1.0
                r -= Q @ (Q.T @ r)
                r -= Q @ (Q.T @ r)
                nr = np.linalg.norm(r)
                if nr > best_norm + 1e-12:
                    best, best_norm, best_vec = j, nr, r
            remaining.remove(best)
            basis.append(best_vec / best_norm)
        C = np.column_stack(basis[2:])
        if np.linalg.det(np.column_stack([self.frame, C])) < 0:
            C[:, -1] = -C[:, -1]
        C.setflags(write=False)
        return C

    def reversed(self):
        """Same plane with the opposite orientation."""
        return OrientedTwoPlane(self.frame[:, ::-1])


@dataclass(frozen=True)
class GreatCircle:
    """Oriented unit circle ``t -> cos t * u1 + sin t * u2`` of a plane."""

    plane: OrientedTwoPlane = field()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u1, u2 = self.plane.frame[:, 0], self.plane.frame[:, 1]
        return np.cos(t)[..., np.newaxis] * u1 + np.sin(t)[..., np.newaxis] * u2

    def sample(self, count=64):
        """``count`` equally spaced points, shape ``(count, ambient_dim)``."""
        return self(2 * np.pi * np.arange(count) / count)


def great_circle_of(plane):
    return GreatCircle(plane)


def chart_to_plane(P, A):
    """Plane whose chart coordinates about ``P`` are ``A``.

    The returned frame is the oriented orthonormalization of
    ``(e1 + A1, e2 + A2)`` in ambient coordinates, so orthogonal projection
    onto ``P`` preserves orientation.
    """
    A = check_chart_point(A, P.n)
    U = P.frame + P.complement @ A
    return OrientedTwoPlane(orthonormalize(U))


def plane_to_chart(P, Q, tol=1e-12):
    """Chart coordinates of ``Q`` about ``P``.

    Raises
    ------
    NotInChartError
        If ``Q`` contains a vector orthogonal to ``P`` or projects onto
        ``P`` with reversed orientation.
    """
    if Q.ambient_dim != P.ambient_dim:
        raise DimensionMismatchError("planes live in different ambient spaces")
    B = P.frame.T @ Q.frame
    C = P.complement.T @ Q.frame
    s = np.linalg.svd(B, compute_uv=False)
    if s[-1] <= tol:
        raise NotInChartError("plane contains a vector orthogonal to the base plane")
    if np.linalg.det(B) < 0:
        raise NotInChartError("projection to the base plane reverses orientation")
    return C @ np.linalg.inv(B)


def in_bad_set(A, tol=DEFAULT_TOL):
    """True if the graph of ``A`` meets the base plane in at least a line (rank <= 1)."""
    A = check_chart_point(A)
    return bool(np.linalg.svd(A, compute_uv=False)[-1] <= tol)


def planes_intersect(A1, A2, tol=1e-8):
    """True if the planes with chart points ``A1`` and ``A2`` share a line.

    Graphs of ``L1`` and ``L2`` meet exactly when ``L1 - L2`` has a kernel.
    The threshold is scaled by ``||A1|| + ||A2|| + 1``.
    """
    A1 = check_chart_point(A1, name="A1")
    A2 = check_chart_point(A2, A1.shape[0] // 2, name="A2")
    return bool(_intersection_margin(A1, A2) <= tol)


def _intersection_margin(A1, A2):
    """Scaled smallest singular value of ``A1 - A2`` (works on stacks)."""
    smin = np.linalg.svd(A1 - A2, compute_uv=False)[..., -1]
    scale = np.linalg.norm(A1, 2, axis=(-2, -1)) + np.linalg.norm(A2, 2, axis=(-2, -1)) + 1
    return smin / scale


def transverse_to_bad_cone(T, tol=DEFAULT_TOL):
    """True if the graph of ``T: P^perp -> P^perp`` avoids the rank-one cone."""
    return not has_real_eigenvalue(T, tol)


def hopf_base_chart(J, P, tol=1e-9):
    """Matrix of ``J`` restricted to ``P^perp`` in the complement frame of ``P``.

    Its graph is the tangent plane at ``P`` to the base of the fibration by
    ``J``-complex lines.

    Raises
    ------
    NotInvariantError
        If ``J`` does not preserve ``P`` (or ``P^perp``).
    """
    J = _structure_matrix(J)
    if J.shape[0] != P.ambient_dim:
        raise DimensionMismatchError("structure and plane dimensions differ")
    F, C = P.frame, P.complement
    JF = J @ F
    if np.linalg.norm(JF - F @ (F.T @ JF)) > tol * max(1.0, np.linalg.norm(J)):
        raise NotInvariantError("J(P) != P: the plane is not a complex line")
    JC = J @ C
    if np.linalg.norm(JC - C @ (C.T @ JC)) > tol * max(1.0, np.linalg.norm(J)):
        raise NotInvariantError("J does not preserve the orthogonal complement of P")
    return C.T @ JC


def _structure_matrix(J):
    matrix = getattr(J, "matrix", J)
    return check_real_linear_map(matrix, "J")


def _central_jacobian(sampler, x, h):
    """Finite-difference Jacobian of ``x -> vec(sampler(x))`` (column-major)."""
    cols = []
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = h
        diff = (np.asarray(sampler(x + dx)) - np.asarray(sampler(x - dx))) / (2 * h)
        cols.append(diff)
    return np.stack(cols, axis=-1)  # (2n, 2, 2n)


def immersion_check(sampler, points, tol=1e-7):
    """Certify that a sampled base map stays transverse to the bad cones.

    ``sampler`` maps a point ``x`` of ``R^{2n}`` to a chart point. At each
    sample the tangent plane of the image is computed by central finite
    differences. It must be the graph of a map from the first column to the
    second with no real eigenvalues; otherwise it contains a rank-one
    direction and grazes the bad cone at that point.

    Returns
    -------
    Report
        One record per point with its margin ``min |Im lambda|``.

    Raises
    ------
    TangencyError
        On the first sample whose tangent plane meets a bad cone.
    """
    report = Report()
    for k, x in enumerate(points):
        x = check_vector(x)
        h = 1e-5 * (1 + np.linalg.norm(x))
        D = _central_jacobian(sampler, x, h)
        D1, D2 = D[:, 0, :], D[:, 1, :]
        s1 = np.linalg.svd(D1, compute_uv=False)[-1]
        if s1 <= tol:
            raise TangencyError(
                f"sample {k}: tangent plane contains a first-column-degenerate direction",
                sample=x, margin=float(s1),
            )
        L = D2 @ np.linalg.inv(D1)
        margin = float(min_abs_imag_eigenvalue(L))
        if margin <= tol:
            raise TangencyError(
                f"sample {k}: tangent map has a real eigenvalue", sample=x, margin=margin
            )
        report.add(CheckRecord(f"immersion[{k}]", True, margin, {"x": x.tolist()}))
    return report
