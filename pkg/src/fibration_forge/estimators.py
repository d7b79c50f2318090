"""scikit-learn style wrappers over the functional API.

The estimators hold hyperparameters in ``__init__`` and learned state in
trailing-underscore attributes, so ``get_params``/``set_params``/``clone``
work as usual. They are thin: every computation is delegated to the
functions in :mod:`fibration_forge.structures` and
:mod:`fibration_forge.fibration`.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_real_linear_map
from .fibration import (
    DEFAULT_SCHEDULE,
    BumpProfile,
    build_fibration,
    extend_germ,
    verify_fibration,
)
from .numeric import DEFAULT_TOL
from .structures import RetractionPath


def _matrix_stack(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[np.newaxis]
    if X.ndim != 3:
        raise ValueError(f"expected a matrix or a stack of matrices, got shape {X.shape}")
    return np.stack([check_real_linear_map(T) for T in X])


class ComplexStructureRetraction(TransformerMixin, BaseEstimator):
    """Map each linear map ``T`` to the point at time ``t`` of its retraction path.

    ``t = 1`` (the default) yields an orthogonal complex structure. The
    transform is stateless; ``fit`` only records the matrix size.
    """

    def __init__(self, t=1.0, tol=DEFAULT_TOL):
        self.t = t
        self.tol = tol

    def fit(self, X, y=None):
        self.n_features_in_ = _matrix_stack(X).shape[-1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _matrix_stack(X)
        if X.shape[-1] != self.n_features_in_:
            raise ValueError(f"fitted on {self.n_features_in_}x{self.n_features_in_} maps, "
                             f"got {X.shape[-1]}x{X.shape[-1]}")
        return np.stack([RetractionPath.of(T, self.tol)(self.t) for T in X])


class GreatCircleFibration(TransformerMixin, BaseEstimator):
    """Fibration base tangent to a prescribed map ``A`` at the standard fibre.

    ``fit(A)`` certifies the bump exponent; ``transform(X)`` evaluates
    ``N`` at the rows of ``X``.
    """

    def __init__(self, r0=0.25, r1=1.0, max_exponent=10_000, t_grid=101, lambda_grid=401):
        self.r0 = r0
        self.r1 = r1
        self.max_exponent = max_exponent
        self.t_grid = t_grid
        self.lambda_grid = lambda_grid

    def fit(self, A, y=None):
        self.base_ = build_fibration(
            A, base_bump=BumpProfile(self.r0, self.r1, 1), max_exponent=self.max_exponent,
            t_grid=self.t_grid, lambda_grid=self.lambda_grid,
        )
        self.J_ = self.base_.J.matrix
        self.epsilon_ = self.base_.epsilon
        self.n_exp_ = self.base_.bump.n_exp
        self.n_features_in_ = self.base_.A.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "base_")
        return self.base_.N(check_points(X, self.n_features_in_))

    def jacobian(self, X):
        check_is_fitted(self, "base_")
        return self.base_.dN(check_points(X, self.n_features_in_))

    def verify(self, n_samples=10_000, n_pairs=500, seed=0):
        check_is_fitted(self, "base_")
        return verify_fibration(self.base_, n_samples=n_samples, n_pairs=n_pairs, seed=seed)


class GermExtender(TransformerMixin, BaseEstimator):
    """Extend a :class:`~fibration_forge.fibration.GermSpec` to a global fibration base."""

    def __init__(self, schedule=DEFAULT_SCHEDULE, r0=0.25, r1=1.0, n_samples=10_000,
                 n_pairs=500, seed=0):
        self.schedule = schedule
        self.r0 = r0
        self.r1 = r1
        self.n_samples = n_samples
        self.n_pairs = n_pairs
        self.seed = seed

    def fit(self, germ, y=None):
        self.composite_, self.report_ = extend_germ(
            germ, schedule=self.schedule, base_bump=BumpProfile(self.r0, self.r1, 1),
            n_samples=self.n_samples, n_pairs=self.n_pairs, seed=self.seed,
        )
        self.radius_ = self.composite_.radius
        self.n_features_in_ = 2 * germ.n
        return self

    def transform(self, X):
        check_is_fitted(self, "composite_")
        return self.composite_.N(check_points(X, self.n_features_in_))
