import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fibration_forge.estimators import (
    ComplexStructureRetraction,
    GermExtender,
    GreatCircleFibration,
)
from fibration_forge.fibration import GermSpec, build_fibration
from fibration_forge.structures import full_retraction, is_orthogonal_structure

from conftest import random_no_real_map

T_EX = np.array([[1.0, 2.0], [-1.0, 1.0]])


def test_params_and_clone():
    est = GreatCircleFibration(r0=0.3, t_grid=51)
    assert est.get_params()["r0"] == 0.3
    est.set_params(r1=0.9)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert "ComplexStructureRetraction(t=0.5)" in repr(ComplexStructureRetraction(t=0.5))


def test_retraction_transform(rng):
    maps = np.stack([random_no_real_map(4, rng) for _ in range(3)])
    out = ComplexStructureRetraction().fit_transform(maps)
    assert out.shape == (3, 4, 4)
    for T, E in zip(maps, out):
        assert is_orthogonal_structure(E, tol=1e-7)
        np.testing.assert_allclose(E, full_retraction(T, 1.0))


def test_retraction_checks_fit_and_shape(rng):
    with pytest.raises(NotFittedError):
        ComplexStructureRetraction().transform(T_EX)
    est = ComplexStructureRetraction().fit(T_EX)
    with pytest.raises(ValueError):
        est.transform(random_no_real_map(4, rng))


def test_fibration_estimator_matches_function(rng):
    est = GreatCircleFibration().fit(T_EX)
    F = build_fibration(T_EX)
    assert est.n_exp_ == F.bump.n_exp and est.epsilon_ == F.epsilon
    X = rng.standard_normal((10, 2))
    np.testing.assert_array_equal(est.transform(X), F.N(X))
    np.testing.assert_array_equal(est.jacobian(X), F.dN(X))
    assert est.verify(n_samples=500, n_pairs=50).passed
    with pytest.raises(NotFittedError):
        GreatCircleFibration().transform(X)


def test_germ_extender():
    J4 = np.kron(np.eye(2), [[0.0, -1.0], [1.0, 0.0]])
    est = GermExtender(n_samples=500, n_pairs=50).fit(GermSpec(2, (J4,)))
    assert est.radius_ == 1.0 and est.report_.passed
    X = np.random.default_rng(0).standard_normal((5, 4))
    np.testing.assert_allclose(est.transform(X), X @ J4.T, atol=1e-15)
