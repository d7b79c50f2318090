import json
import os

import numpy as np
import pytest

from fibration_forge import io as ffio
from fibration_forge.angles import ComplexSubspace, RealSubspace
from fibration_forge.exceptions import DimensionMismatchError
from fibration_forge.fibration import GermComposite, GermSpec, build_fibration, extend_germ

T_EX = np.array([[1.0, 2.0], [-1.0, 1.0]])


def test_matrix_formats(tmp_path):
    for payload in ([[1, 2], [-1, 1]], {"matrix": [[1, 2], [-1, 1]]}):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(payload))
        np.testing.assert_array_equal(ffio.load_matrix(path), T_EX)
    with pytest.raises(KeyError):
        ffio.parse_matrix({"rows": [[1, 2], [3, 4]]})
    with pytest.raises(DimensionMismatchError):
        ffio.parse_matrix([[1, 2, 3]])


def proj(B):
    return B @ B.conj().T


def test_subspace_round_trip(rng):
    B = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    S = ComplexSubspace.from_span(B)
    back = ffio.parse_subspace(json.loads(ffio.dumps(ffio.subspace_to_json(S))))
    assert isinstance(back, ComplexSubspace)
    np.testing.assert_allclose(proj(back.basis), proj(S.basis), atol=1e-14)
    R = RealSubspace.from_span(rng.standard_normal((5, 3)))
    back = ffio.parse_subspace(json.loads(ffio.dumps(ffio.subspace_to_json(R))))
    assert isinstance(back, RealSubspace)
    np.testing.assert_allclose(proj(back.basis), proj(R.basis), atol=1e-14)


def test_subspace_ambient_checked():
    with pytest.raises(DimensionMismatchError):
        ffio.parse_subspace({"ambient": 3, "complex": False, "basis": [[1.0], [0.0]]})


def test_artifact_round_trip_is_exact():
    F = build_fibration(T_EX)
    text = ffio.dumps(ffio.fibration_to_json(F))
    G = ffio.parse_fibration(json.loads(text))
    np.testing.assert_array_equal(G.A, F.A)
    np.testing.assert_array_equal(G.J.matrix, F.J.matrix)
    assert G.epsilon == F.epsilon and G.bump == F.bump
    assert ffio.dumps(ffio.fibration_to_json(G)) == text


def test_artifact_without_plane_uses_standard():
    data = ffio.fibration_to_json(build_fibration(T_EX))
    del data["P"]
    G = ffio.parse_fibration(data)
    np.testing.assert_array_equal(G.P.frame, np.eye(4)[:, :2])


def test_artifact_dimension_checked():
    data = ffio.fibration_to_json(build_fibration(T_EX))
    data["n"] = 2
    with pytest.raises(DimensionMismatchError):
        ffio.parse_fibration(data)


def test_germ_artifact_round_trip():
    J4 = np.kron(np.eye(2), [[0.0, -1.0], [1.0, 0.0]])
    germ = GermSpec(2, (J4, 1e-2 * np.ones((4, 4, 4))))
    comp, _ = extend_germ(germ, n_samples=500, n_pairs=50)
    back = ffio.parse_fibration(json.loads(ffio.dumps(ffio.fibration_to_json(comp))))
    assert isinstance(back, GermComposite)
    X = np.random.default_rng(0).standard_normal((20, 4))
    np.testing.assert_array_equal(back.N(X), comp.N(X))


def test_germ_degree_checked():
    with pytest.raises(DimensionMismatchError):
        ffio.parse_germ({"n": 1, "degree": 2, "coeffs": [[[0, -1], [1, 0]]]})


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "out.json"
    ffio.write_json(target, {"a": 1.5})
    ffio.write_json(target, {"a": 2.5})
    assert json.loads(target.read_text()) == {"a": 2.5}
    assert os.listdir(tmp_path) == ["out.json"]


def test_floats_round_trip_exactly():
    x = [0.1, 1 / 3, np.pi, 2.0 ** -1074, 1.7976931348623157e308]
    assert json.loads(ffio.dumps(x)) == x


def test_csv_layout():
    text = ffio.fibres_to_csv([0, 0], [0.0, 0.5], np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]]))
    lines = text.splitlines()
    assert lines[0] == "fibre_id,t,x1,x2,x3,x4"
    assert lines[2] == "0,0.5,0.0,1.0,0.0,0.0"
