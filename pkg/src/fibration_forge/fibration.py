"""Great circle fibrations built from a prescribed tangent plane.

Around a fibre ``P`` the base space of a fibration is the graph of a map
``N: P^perp -> P^perp`` (the plane over ``x`` is the graph of
``e1 -> x, e2 -> N(x)``). Starting from a linear map ``A`` with no real
eigenvalues we interpolate

    N(x) = f(|x|) A x + (1 - f(|x|)) J x

between ``A`` near ``P`` and its complex structure ``J`` far away, with a
bump ``f`` flat enough that ``dN`` never acquires a real eigenvalue. Outside
the bump the base space is that of the Hopf fibration of the extended ``J``.
"""

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize
from scipy.special import expit

from ._validation import check_points, check_real_linear_map, check_vector
from .exceptions import (
    DimensionMismatchError,
    ExponentOverflowError,
    ExtensionFailedError,
    GermInvalidError,
    NonPositiveMarginError,
    NotOrthogonalError,
    NotUnitError,
    RealEigenvalueError,
)
from .grassmann import ROTATE_90, GreatCircle, OrientedTwoPlane
from .numeric import DEFAULT_TOL, has_real_eigenvalue
from .report import CheckRecord, Report
from .structures import ComplexStructure, as_structure_matrix, make_complex_structure

THREADS_ENV = "FIBRATION_FORGE_THREADS"
DEFAULT_SCHEDULE = tuple(2.0 ** -k for k in range(11))


# -- bump profiles ---------------------------------------------------------


@dataclass(frozen=True)
class BumpProfile:
    """Smooth cutoff ``f_n(s) = f(s^(1/n))``.

    The base profile ``f`` is 1 on ``[0, r0]``, 0 on ``[r1, inf)`` and the
    ``exp(-1/x)`` partition of unity in between.
    """

    r0: float = 0.25
    r1: float = 1.0
    n_exp: int = 1

    def __post_init__(self):
        if not 0 < self.r0 < self.r1:
            raise ValueError(f"need 0 < r0 < r1, got r0={self.r0}, r1={self.r1}")
        if int(self.n_exp) != self.n_exp or self.n_exp < 1:
            raise ValueError(f"n_exp must be a positive integer, got {self.n_exp}")
        object.__setattr__(self, "n_exp", int(self.n_exp))

    @property
    def inner(self):
        """Radius below which ``f_n`` is identically 1."""
        return self.r0 ** self.n_exp

    @property
    def outer(self):
        """Radius beyond which ``f_n`` is identically 0."""
        return self.r1 ** self.n_exp

    def _exponent(self, u):
        a = np.clip(self.r1 - u, 1e-300, None)
        b = np.clip(u - self.r0, 1e-300, None)
        return 1.0 / a - 1.0 / b, 1.0 / a ** 2 + 1.0 / b ** 2

    def base(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u > self.r0) & (u < self.r1)
        g, _ = self._exponent(np.where(inside, u, (self.r0 + self.r1) / 2))
        return np.where(u <= self.r0, 1.0, np.where(u >= self.r1, 0.0, expit(-g)))

    def base_slope(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u > self.r0) & (u < self.r1)
        g, dg = self._exponent(np.where(inside, u, (self.r0 + self.r1) / 2))
        slope = -expit(g) * expit(-g) * dg
        return np.where(inside, slope, 0.0)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.base(np.power(np.maximum(s, 0.0), 1.0 / self.n_exp))

    def slope(self, s):
        """Derivative of ``f_n`` at ``s``."""
        s = np.asarray(s, dtype=float)
        pos = s > 0
        safe = np.where(pos, s, 1.0)
        u = np.power(safe, 1.0 / self.n_exp)
        d = self.base_slope(u) * u / (self.n_exp * safe)
        return np.where(pos, d, 0.0)


def bump_eval(bump, s):
    return bump(s)


def bump_slope(bump, s):
    return bump.slope(s)


def _log_scaled_slope(bump, logs):
    """``s |f_n'(s)|`` at ``s = exp(logs)``, evaluated without forming ``s``."""
    u = np.exp(np.asarray(logs, dtype=float) / bump.n_exp)
    return np.abs(bump.base_slope(u)) * u / bump.n_exp


def slope_sup(bump, grid=4001):
    """``sup_s s |f_n'(s)|`` by a geometric grid over the transition and Brent refinement.

    Works in ``log s`` so the transition ``[r0^n, r1^n]`` stays representable
    for large exponents.
    """
    lo = bump.n_exp * math.log(bump.r0)
    hi = bump.n_exp * math.log(bump.r1)
    logs = np.linspace(lo, hi, grid)
    vals = _log_scaled_slope(bump, logs)
    i = int(np.argmax(vals))
    a, b = logs[max(i - 1, 0)], logs[min(i + 1, grid - 1)]
    res = scipy.optimize.minimize_scalar(
        lambda z: -float(_log_scaled_slope(bump, z)),
        bounds=(a, b), method="bounded", options={"xatol": 1e-12},
    )
    return float(max(vals[i], -res.fun))


# -- transversality margin -------------------------------------------------


@dataclass(frozen=True)
class MarginResult:
    epsilon: float
    t: float
    v: np.ndarray
    lam: float
    grid_params: dict


def _segment_margin(A, J, t, lambdas):
    """``min over lambda`` of ``sigma_min(M - lambda I)`` with ``M = tA + (1-t)J``."""
    M = t * A + (1 - t) * J
    eye = np.eye(M.shape[0])
    stack = M[np.newaxis] - lambdas[:, np.newaxis, np.newaxis] * eye
    return np.linalg.svd(stack, compute_uv=False)[:, -1]


def _smin_at(A, J, t, lam):
    M = t * A + (1 - t) * J - lam * np.eye(A.shape[0])
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def _golden_min(fn, center, half_width, tol=1e-15):
    """Golden-section minimum of ``fn`` near ``center``; falls back to the best probe."""
    probes = [center - half_width, center, center + half_width]
    vals = [fn(x) for x in probes]
    if not vals[1] < min(vals[0], vals[2]):
        k = int(np.argmin(vals))
        return vals[k], probes[k]
    res = scipy.optimize.minimize_scalar(fn, bracket=tuple(probes), method="golden",
                                         options={"xtol": tol})
    return (float(res.fun), float(res.x)) if res.fun < vals[1] else (vals[1], center)


def _polish_near_zero(A, J, t, lam, dt, step):
    """Drive a small margin toward its true value.

    Near a real eigenvalue the margin is V-shaped in ``(t, lambda)``, and
    bounded Brent stops about ``sqrt(eps)`` away from the kink. Golden
    section has no such floor, so an inconsistent ``(A, J)`` pair gets
    pushed below the rejection threshold.
    """
    def inner(tt):
        return _golden_min(lambda x: _smin_at(A, J, tt, x), lam, step)

    def outer(tt):
        return inner(min(1.0, max(0.0, tt)))[0]

    eps, t_new = _golden_min(outer, t, max(dt, 1e-6))
    t_new = min(1.0, max(0.0, t_new))
    eps, lam_new = inner(t_new)
    return eps, t_new, lam_new


def transversality_margin(A, J, t_grid=101, lambda_grid=401):
    """Lower bound ``epsilon`` on ``|lambda v - (tA + (1-t)J) v|`` over unit ``v``, real ``lambda``.

    For fixed ``t`` the minimum over unit ``v`` and real ``lambda`` equals
    ``min over lambda`` of the smallest singular value of ``M - lambda I``,
    a one-dimensional search. ``lambda`` only needs to range over
    ``[-2||M||, 2||M||]``. Grid minima are polished with bounded Brent
    steps in ``lambda`` and then in ``t``.

    Returns
    -------
    MarginResult
        ``epsilon`` with the minimizing ``(t, v, lambda)`` as witness.

    Raises
    ------
    NonPositiveMarginError
        If the minimum is ``<= 1e-12``.
    """
    A = check_real_linear_map(A, "A")
    J = as_structure_matrix(J)
    if J.shape != A.shape:
        raise DimensionMismatchError("A and J have different shapes")
    bound = 2 * max(np.linalg.norm(A, 2), np.linalg.norm(J, 2))
    lambdas = np.linspace(-bound, bound, lambda_grid)
    step = lambdas[1] - lambdas[0]

    def inner(t):
        vals = _segment_margin(A, J, t, lambdas)
        best_val, best_lam = np.inf, 0.0
        for i in np.argsort(vals)[:3]:
            res = scipy.optimize.minimize_scalar(
                lambda lam: _smin_at(A, J, t, lam),
                bounds=(lambdas[i] - step, lambdas[i] + step),
                method="bounded", options={"xatol": 1e-12},
            )
            val, lam = (res.fun, res.x) if res.fun < vals[i] else (vals[i], lambdas[i])
            if val < best_val:
                best_val, best_lam = val, lam
        return float(best_val), float(best_lam)

    ts = np.linspace(0.0, 1.0, t_grid)
    per_t = [inner(t) for t in ts]
    k = int(np.argmin([v for v, _ in per_t]))
    eps, lam = per_t[k]
    t_best = float(ts[k])
    dt = 1.0 / (t_grid - 1) if t_grid > 1 else 0.0
    if dt:
        res = scipy.optimize.minimize_scalar(
            lambda t: inner(t)[0],
            bounds=(max(0.0, t_best - dt), min(1.0, t_best + dt)),
            method="bounded", options={"xatol": 1e-10},
        )
        if res.fun < eps:
            t_best = float(res.x)
            eps, lam = inner(t_best)
    if eps < 1e-6:
        eps, t_best, lam = _polish_near_zero(A, J, t_best, lam, dt, step)
    if eps <= 1e-12:
        raise NonPositiveMarginError(
            f"transversality margin {eps:.3e} at t={t_best:.6f} is not positive"
        )
    M = t_best * A + (1 - t_best) * J - lam * np.eye(A.shape[0])
    v = np.linalg.svd(M)[2][-1]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    grid = {"t_grid": int(t_grid), "lambda_grid": int(lambda_grid), "lambda_bound": float(bound)}
    return MarginResult(float(eps), t_best, v, lam, grid)


# -- fibration bases -------------------------------------------------------


def _regime_radii(intervals, count, rng):
    """``count`` radii split evenly over nonempty intervals.

    Intervals starting at a positive radius are sampled log-uniformly, so a
    transition spanning many decades is covered throughout.
    """
    intervals = [(a, b) for a, b in intervals if b > a]
    parts = np.array_split(np.arange(count), len(intervals))
    radii = np.empty(count)
    for (a, b), idx in zip(intervals, parts):
        if a > 0:
            radii[idx] = np.exp(rng.uniform(np.log(a), np.log(b), idx.size))
        else:
            radii[idx] = rng.uniform(a, b, idx.size)
    return radii


class _BaseMap:
    """Shared evaluation helpers; subclasses provide ``N`` and ``dN``."""

    def chart(self, X):
        """Chart points ``(x | N(x))``, shape ``(m, 2n, 2)``."""
        X = check_points(X, 2 * self.n)
        return np.stack([X, self.N(X)], axis=-1)

    def sample_points(self, count, rng):
        radii = _regime_radii(self.regimes(), count, rng)
        dirs = rng.standard_normal((count, 2 * self.n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return dirs * radii[:, np.newaxis]


@dataclass(frozen=True, eq=False)
class FibrationBase(_BaseMap):
    """Data defining ``N(x) = f(|x|) A x + (1 - f(|x|)) J x`` around a fibre ``P``."""

    n: int
    A: np.ndarray
    J: ComplexStructure
    bump: BumpProfile
    epsilon: float
    P: OrientedTwoPlane
    epsilon_witness: dict = field(default_factory=dict)
    grid_params: dict = field(default_factory=dict)

    @property
    def gap_norm(self):
        """Spectral norm ``||A - J||``."""
        return float(np.linalg.norm(self.A - self.J.matrix, 2))

    @property
    def exterior_radius(self):
        return self.bump.outer

    @property
    def tangent(self):
        return self.A

    def regimes(self):
        return [(0.0, self.bump.inner), (self.bump.inner, self.bump.outer),
                (self.bump.outer, 2.0 * self.bump.outer)]

    def N(self, X):
        X = check_points(X, 2 * self.n)
        f = self.bump(np.linalg.norm(X, axis=1))[:, np.newaxis]
        return f * (X @ self.A.T) + (1 - f) * (X @ self.J.matrix.T)

    def dN(self, X):
        """Jacobians of ``N`` at each row of ``X``, shape ``(m, 2n, 2n)``."""
        X = check_points(X, 2 * self.n)
        r = np.linalg.norm(X, axis=1)
        f = self.bump(r)[:, np.newaxis, np.newaxis]
        fp = self.bump.slope(r)
        A, J = self.A, self.J.matrix
        out = f * A + (1 - f) * J
        unit = np.divide(X, r[:, np.newaxis], out=np.zeros_like(X), where=r[:, np.newaxis] > 0)
        gap = X @ (A - J).T
        return out + fp[:, np.newaxis, np.newaxis] * gap[:, :, np.newaxis] * unit[:, np.newaxis, :]

    def certificate(self):
        """``(S(f_n) * ||A - J||, epsilon)``; certified when the first is smaller."""
        return slope_sup(self.bump) * self.gap_norm, self.epsilon


def _resolve_plane(P, n):
    if P is None:
        return OrientedTwoPlane.standard(n)
    if P.n != n:
        raise DimensionMismatchError(f"plane lives in R^{P.ambient_dim}, expected R^{2 * n + 2}")
    return P


def build_fibration(A, P=None, base_bump=None, max_exponent=10_000,
                    t_grid=101, lambda_grid=401, tol=DEFAULT_TOL):
    """Fibration base tangent at ``P`` to the graph of ``A``.

    Picks the smallest exponent ``n_exp`` for which
    ``S(f_n) * ||A - J|| < epsilon``, with ``epsilon`` the sampled
    transversality margin of the segment from ``A`` to ``J = J_A``.

    Parameters
    ----------
    A : (2n, 2n) array_like
        Linear map ``P^perp -> P^perp`` with no real eigenvalues.
    P : OrientedTwoPlane, optional
        Defaults to ``span{e1, e2}`` in ``R^{2n+2}``.
    base_bump : BumpProfile, optional
        Supplies ``r0`` and ``r1``; its exponent is ignored.

    Raises
    ------
    RealEigenvalueError
    ExponentOverflowError
    """
    A = check_real_linear_map(A, "A")
    n = A.shape[0] // 2
    P = _resolve_plane(P, n)
    if has_real_eigenvalue(A, tol):
        raise RealEigenvalueError("A has a real eigenvalue; its graph meets the bad cone")
    J = make_complex_structure(A, tol)
    margin = transversality_margin(A, J, t_grid, lambda_grid)
    base = replace(base_bump or BumpProfile(), n_exp=1)
    gap = float(np.linalg.norm(A - J.matrix, 2))
    n_exp = 1
    if gap > 0:
        n_exp = max(1, int(math.floor(slope_sup(base) * gap / margin.epsilon)) + 1)
        while slope_sup(replace(base, n_exp=n_exp)) * gap >= margin.epsilon:
            n_exp += 1
            if n_exp > max_exponent:
                break
    if n_exp > max_exponent:
        raise ExponentOverflowError(f"bump exponent {n_exp} exceeds cap {max_exponent}")
    witness = {"t": margin.t, "v": margin.v.tolist()}
    return FibrationBase(n, A, J, replace(base, n_exp=n_exp), margin.epsilon, P,
                         witness, margin.grid_params)


def eval_base(F, x):
    """Chart point ``(x | N(x))`` of the plane over ``x``."""
    x = check_vector(x, 2 * F.n)
    return F.chart(x[np.newaxis])[0]


def eval_dN(F, x):
    x = check_vector(x, 2 * F.n)
    return F.dN(x[np.newaxis])[0]


def _thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _chunked(fn, X, chunks):
    parts = np.array_split(X, chunks) if len(X) else [X]
    if chunks == 1:
        return np.concatenate([fn(p) for p in parts])
    with ThreadPoolExecutor(max_workers=chunks) as pool:
        return np.concatenate(list(pool.map(fn, parts)))


def _witness_points(points, idx, limit=10):
    return [points[i].tolist() for i in idx[:limit]]


def _rank_margin(D):
    """``sigma_min / sigma_max`` of each chart difference (0 for rank <= 1)."""
    s = np.linalg.svd(D, compute_uv=False)
    return np.divide(s[..., -1], s[..., 0], out=np.zeros(s.shape[:-1]), where=s[..., 0] > 0)


def verify_fibration(F, samples=None, n_samples=10_000, n_pairs=500, seed=0, tol=1e-9,
                     pair_tol=1e-8):
    """Sampled certificate that ``F`` defines a fibration near ``P``.

    Checks, each recorded with its worst margin and failing witnesses:

    * ``tangent_at_P``: ``dN(0)`` equals the prescribed tangent map.
    * ``no_real_eigenvalues``: ``min |Im lambda(dN_x)| > tol`` at every sample.
    * ``disjoint_fibres``: planes over random pairs of samples share no line,
      i.e. the difference of their chart points has rank 2. The margin is
      the scale-free ratio ``sigma_min / sigma_max`` of that difference,
      since planes over nearby points differ by arbitrarily small charts.
    * ``exterior_hopf``: ``N(x) = J x`` exactly outside the bump.

    Failures are report entries, never exceptions.
    """
    rng = np.random.default_rng(seed)
    X = F.sample_points(n_samples, rng) if samples is None else check_points(samples, 2 * F.n)
    report = Report()
    threads = _thread_count()

    d0 = F.dN(np.zeros((1, 2 * F.n)))[0]
    gap0 = float(np.max(np.abs(d0 - F.tangent)))
    report.add(CheckRecord("tangent_at_P", gap0 == 0.0, gap0, None))

    if len(X):
        margins = _chunked(
            lambda part: np.min(np.abs(np.linalg.eigvals(F.dN(part)).imag), axis=1), X, threads
        )
        bad = np.flatnonzero(margins <= tol)
        worst = int(np.argmin(margins))
        report.add(CheckRecord(
            "no_real_eigenvalues", bad.size == 0, float(margins[worst]),
            {"worst_x": X[worst].tolist(), "failures": int(bad.size),
             "failing_x": _witness_points(X, bad)},
        ))

    if len(X) >= 2 and n_pairs:
        i = rng.integers(0, len(X), n_pairs)
        j = rng.integers(0, len(X) - 1, n_pairs)
        j = np.where(j >= i, j + 1, j)
        C = F.chart(X)
        pm = _rank_margin(C[i] - C[j])
        bad = np.flatnonzero(pm <= pair_tol)
        worst = int(np.argmin(pm))
        report.add(CheckRecord(
            "disjoint_fibres", bad.size == 0, float(pm[worst]),
            {"worst_pair": [X[i[worst]].tolist(), X[j[worst]].tolist()],
             "failures": int(bad.size),
             "failing_pairs": [[X[i[b]].tolist(), X[j[b]].tolist()] for b in bad[:10]]},
        ))

    outside = np.flatnonzero(np.linalg.norm(X, axis=1) > F.exterior_radius) if len(X) else []
    if len(outside):
        Xo = X[outside]
        diff = np.max(np.abs(F.N(Xo) - Xo @ F.J.matrix.T), axis=1)
        bad = np.flatnonzero(diff != 0.0)
        report.add(CheckRecord(
            "exterior_hopf", bad.size == 0, float(np.max(diff)),
            {"checked": int(len(outside)), "failing_x": _witness_points(Xo, bad)},
        ))
    return report


# -- Hopf fibrations -------------------------------------------------------


def extend_structure(J_perp, P):
    """Ambient complex structure: 90 degree rotation on ``P`` and ``J_perp`` on ``P^perp``."""
    Jp = as_structure_matrix(J_perp)
    if Jp.shape[0] != P.ambient_dim - 2:
        raise DimensionMismatchError("J_perp does not match the complement of P")
    F, C = P.frame, P.complement
    J = F @ ROTATE_90 @ F.T + C @ Jp @ C.T
    orth = float(np.linalg.norm(J.T @ J - np.eye(J.shape[0]), 2)) < 1e-8
    return ComplexStructure(J, orthogonal=orth)


def hopf_fibre_through(J, v):
    """Oriented great circle ``t -> cos t v + sin t Jv`` through ``v``.

    Raises
    ------
    NotUnitError
    NotOrthogonalError
        If ``v, Jv`` fail to be orthonormal.
    """
    Jm = as_structure_matrix(J)
    v = check_vector(v, Jm.shape[0], "v")
    if abs(np.linalg.norm(v) - 1) > 1e-9:
        raise NotUnitError(f"|v| = {np.linalg.norm(v)!r}, expected 1")
    if np.linalg.norm(Jm.T @ Jm - np.eye(Jm.shape[0]), 2) > 1e-8:
        raise NotOrthogonalError("Hopf fibres need an orthogonal complex structure")
    return GreatCircle(OrientedTwoPlane(np.column_stack([v, Jm @ v])))


def hopf_map(x):
    """Classical Hopf map ``S^3 -> S^2``; rows of a 2-d input are mapped independently.

    Raises
    ------
    NotUnitError
    """
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    if pts.shape[-1] != 4:
        raise DimensionMismatchError(f"points must lie in R^4, got shape {x.shape}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(norms - 1) > 1e-9):
        raise NotUnitError("Hopf map needs unit vectors")
    x1, x2, x3, x4 = pts.T
    y = np.column_stack([
        2 * (x1 * x3 + x2 * x4),
        2 * (x2 * x3 - x1 * x4),
        x1 ** 2 + x2 ** 2 - x3 ** 2 - x4 ** 2,
    ])
    return y[0] if x.ndim == 1 else y


# -- germs -----------------------------------------------------------------


def _symmetrize(T):
    d = T.ndim - 1
    if d <= 1:
        return T
    perms = list(itertools.permutations(range(1, d + 1)))
    return sum(np.transpose(T, (0,) + p) for p in perms) / len(perms)


def _contract(T, X, times):
    """Contract the last ``times`` slots of ``T`` with each row of ``X``."""
    R = np.broadcast_to(T, (len(X),) + T.shape)
    for _ in range(times):
        R = np.einsum("n...j,nj->n...", R, X)
    return R


@dataclass(frozen=True, eq=False)
class GermSpec:
    """Polynomial germ ``h(x) = sum_d T_d[x, ..., x]`` of degree 1 to 4.

    ``coeffs[d - 1]`` has shape ``(2n,) * (d + 1)``; the first axis is the
    output. Tensors are symmetrized in their input slots on construction.
    """

    n: int
    coeffs: tuple
    valid_radius: float = 1.0

    MAX_DEGREE = 4

    def __post_init__(self):
        m = 2 * self.n
        coeffs = []
        if not 1 <= len(self.coeffs) <= self.MAX_DEGREE:
            raise DimensionMismatchError(
                f"germ degree must be between 1 and {self.MAX_DEGREE}, got {len(self.coeffs)}"
            )
        for d, T in enumerate(self.coeffs, start=1):
            T = np.array(T, dtype=float)
            if T.shape != (m,) * (d + 1):
                raise DimensionMismatchError(
                    f"degree-{d} coefficients must have shape {(m,) * (d + 1)}, got {T.shape}"
                )
            if not np.all(np.isfinite(T)):
                raise DimensionMismatchError("germ coefficients must be finite")
            coeffs.append(_symmetrize(T))
        object.__setattr__(self, "coeffs", tuple(coeffs))
        if self.valid_radius <= 0:
            raise ValueError("valid_radius must be positive")

    @property
    def degree(self):
        return len(self.coeffs)

    @property
    def linear_part(self):
        return self.coeffs[0]

    def h(self, X):
        X = check_points(X, 2 * self.n)
        return sum(_contract(T, X, T.ndim - 1) for T in self.coeffs)

    def dh(self, X):
        X = check_points(X, 2 * self.n)
        return sum((T.ndim - 1) * _contract(T, X, T.ndim - 2) for T in self.coeffs)


@dataclass(frozen=True, eq=False)
class GermComposite(_BaseMap):
    """``N''(x) = g(|x|) h(x) + (1 - g(|x|)) N'(x)`` gluing a germ into a global base."""

    germ: GermSpec
    base: FibrationBase
    cutoff: BumpProfile
    attempts: tuple = ()

    @property
    def n(self):
        return self.germ.n

    @property
    def radius(self):
        return self.cutoff.r1

    @property
    def J(self):
        return self.base.J

    @property
    def P(self):
        return self.base.P

    @property
    def tangent(self):
        return self.germ.linear_part

    @property
    def exterior_radius(self):
        return max(self.cutoff.outer, self.base.exterior_radius)

    def regimes(self):
        edges = sorted({0.0, self.cutoff.inner, self.cutoff.outer, self.base.bump.inner,
                        self.base.bump.outer})
        edges.append(2.0 * edges[-1])
        return list(zip(edges[:-1], edges[1:]))

    def N(self, X):
        X = check_points(X, 2 * self.n)
        g = self.cutoff(np.linalg.norm(X, axis=1))[:, np.newaxis]
        return g * self.germ.h(X) + (1 - g) * self.base.N(X)

    def dN(self, X):
        X = check_points(X, 2 * self.n)
        r = np.linalg.norm(X, axis=1)
        g = self.cutoff(r)[:, np.newaxis, np.newaxis]
        gp = self.cutoff.slope(r)
        unit = np.divide(X, r[:, np.newaxis], out=np.zeros_like(X), where=r[:, np.newaxis] > 0)
        gap = self.germ.h(X) - self.base.N(X)
        out = g * self.germ.dh(X) + (1 - g) * self.base.dN(X)
        return out + gp[:, np.newaxis, np.newaxis] * gap[:, :, np.newaxis] * unit[:, np.newaxis, :]


def check_germ(germ, n_probe=2000, seed=0, tol=DEFAULT_TOL):
    """Reject a germ whose differential has a real eigenvalue at 0 or inside its valid radius.

    Raises
    ------
    GermInvalidError
    """
    if has_real_eigenvalue(germ.linear_part, tol):
        raise GermInvalidError("germ differential at the fibre has a real eigenvalue")
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_probe, 2 * germ.n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    X = dirs * (germ.valid_radius * rng.uniform(0, 1, n_probe) ** (1 / (2 * germ.n)))[:, None]
    margins = np.min(np.abs(np.linalg.eigvals(germ.dh(X)).imag), axis=1)
    k = int(np.argmin(margins))
    if margins[k] <= tol:
        raise GermInvalidError(
            f"germ differential has a real eigenvalue at x = {X[k].tolist()}"
        )


def extend_germ(germ, P=None, schedule=DEFAULT_SCHEDULE, base_bump=None,
                n_samples=10_000, n_pairs=500, seed=0, max_exponent=10_000):
    """Extend a polynomial germ to a global fibration base.

    A global base ``N'`` tangent to the germ at ``P`` comes from
    ``build_fibration(dh_0)``. For each radius ``rho`` of the schedule the
    germ is glued in with a cutoff that is 1 on ``[0, rho/2]`` and 0 on
    ``[rho, inf)``; the first composite with a clean verification report
    is returned. Radii with ``rho / 2`` beyond the germ's valid radius are
    skipped.

    Returns
    -------
    (GermComposite, Report)

    Raises
    ------
    GermInvalidError
    ExtensionFailedError
        With the best failing report attached.
    """
    check_germ(germ, seed=seed)
    P = _resolve_plane(P, germ.n)
    base = build_fibration(germ.linear_part, P, base_bump, max_exponent=max_exponent)
    attempts = []
    best = None
    for rho in schedule:
        rho = float(rho)
        if rho / 2 > germ.valid_radius:
            attempts.append({"radius": rho, "status": "skipped", "failures": None})
            continue
        composite = GermComposite(germ, base, BumpProfile(rho / 2, rho, 1))
        report = verify_fibration(composite, n_samples=n_samples, n_pairs=n_pairs, seed=seed)
        nfail = len(report.failures)
        attempts.append({"radius": rho, "status": "pass" if report.passed else "fail",
                         "failures": nfail})
        if report.passed:
            return replace(composite, attempts=tuple(attempts)), report
        if best is None or nfail < len(best.failures):
            best = report
    err = ExtensionFailedError("no radius in the schedule produced a clean report", best)
    err.attempts = attempts
    raise err
