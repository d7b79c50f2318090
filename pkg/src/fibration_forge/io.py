"""JSON and CSV formats used by the command line.

Floats are written with ``repr`` (shortest string that round-trips), so
reading an artifact back gives bit-identical numbers.
"""

import csv
import io
import json
import os
import tempfile

import numpy as np

from ._validation import check_real_linear_map
from .angles import ComplexSubspace, RealSubspace
from .exceptions import DimensionMismatchError
from .fibration import BumpProfile, FibrationBase, GermComposite, GermSpec
from .grassmann import OrientedTwoPlane
from .report import _plain
from .structures import make_complex_structure

ARTIFACT_KIND = "great-circle-fibration"
GERM_ARTIFACT_KIND = "germ-extension"


def dumps(obj):
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def write_text_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename.

    Existing non-regular files (``/dev/null``, pipes) are written directly.
    """
    if os.path.exists(path) and not os.path.isfile(path):
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    write_text_atomic(path, dumps(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _complex_array(data):
    if isinstance(data, dict):
        return np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
    return np.array(data, dtype=complex)


def complex_to_json(M):
    M = np.asarray(M)
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


def parse_matrix(data):
    """A real ``2n x 2n`` matrix from a bare nested list or ``{"matrix": ...}``."""
    if isinstance(data, dict):
        for key in ("matrix", "A", "T"):
            if key in data:
                data = data[key]
                break
        else:
            raise KeyError("matrix object needs a 'matrix' field")
    return check_real_linear_map(np.array(data, dtype=float))


def load_matrix(path):
    return parse_matrix(read_json(path))


def parse_subspace(data):
    """``{"ambient", "complex", "basis"}``; the basis columns are orthonormalized."""
    is_complex = bool(data.get("complex", False))
    basis = _complex_array(data["basis"]) if is_complex else np.array(data["basis"], dtype=float)
    if basis.ndim == 1:
        basis = basis[:, np.newaxis]
    ambient = data.get("ambient", basis.shape[0])
    if basis.shape[0] != ambient:
        raise DimensionMismatchError(
            f"basis has {basis.shape[0]} rows but ambient dimension is {ambient}"
        )
    cls = ComplexSubspace if is_complex else RealSubspace
    return cls.from_span(basis)


def subspace_to_json(S):
    is_complex = isinstance(S, ComplexSubspace)
    basis = complex_to_json(S.basis) if is_complex else S.basis.tolist()
    return {"ambient": S.ambient_dim, "complex": is_complex, "basis": basis}


def load_subspace(path):
    return parse_subspace(read_json(path))


def parse_germ(data):
    n = int(data["n"])
    coeffs = [np.array(c, dtype=float) for c in data["coeffs"]]
    degree = int(data.get("degree", len(coeffs)))
    if degree != len(coeffs):
        raise DimensionMismatchError(f"degree {degree} but {len(coeffs)} coefficient tensors")
    return GermSpec(n, tuple(coeffs), float(data.get("valid_radius", 1.0)))


def germ_to_json(germ):
    return {
        "n": germ.n,
        "degree": germ.degree,
        "coeffs": [c.tolist() for c in germ.coeffs],
        "valid_radius": germ.valid_radius,
    }


def load_germ(path):
    return parse_germ(read_json(path))


def fibration_to_json(F):
    """Serialize a fibration base (or a germ composite) as an artifact."""
    if isinstance(F, GermComposite):
        out = fibration_to_json(F.base)
        out["kind"] = GERM_ARTIFACT_KIND
        out["germ"] = germ_to_json(F.germ)
        out["radius"] = F.radius
        return out
    return {
        "kind": ARTIFACT_KIND,
        "n": F.n,
        "A": F.A.tolist(),
        "bump": {"r0": F.bump.r0, "r1": F.bump.r1, "n_exp": F.bump.n_exp},
        "epsilon": F.epsilon,
        "epsilon_witness": F.epsilon_witness,
        "grid_params": F.grid_params,
        "P": F.P.frame.tolist(),
    }


def parse_fibration(data):
    """Rebuild a fibration from an artifact; ``J`` is recomputed from ``A``."""
    n = int(data["n"])
    A = check_real_linear_map(np.array(data["A"], dtype=float), "A")
    if A.shape[0] != 2 * n:
        raise DimensionMismatchError(f"A is {A.shape[0]}x{A.shape[0]} but n = {n}")
    b = data["bump"]
    bump = BumpProfile(float(b["r0"]), float(b["r1"]), int(b["n_exp"]))
    P = (OrientedTwoPlane(np.array(data["P"], dtype=float)) if "P" in data
         else OrientedTwoPlane.standard(n))
    F = FibrationBase(
        n, A, make_complex_structure(A), bump, float(data["epsilon"]), P,
        dict(data.get("epsilon_witness", {})), dict(data.get("grid_params", {})),
    )
    if data.get("kind") == GERM_ARTIFACT_KIND:
        rho = float(data["radius"])
        return GermComposite(parse_germ(data["germ"]), F, BumpProfile(rho / 2, rho, 1))
    return F


def load_fibration(path):
    return parse_fibration(read_json(path))


def fibres_to_csv(fibre_ids, ts, points):
    """CSV with columns ``fibre_id, t, x1, ..., x_m``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    m = points.shape[-1]
    writer.writerow(["fibre_id", "t"] + [f"x{i + 1}" for i in range(m)])
    for fid, t, p in zip(fibre_ids, ts, points):
        writer.writerow([int(fid), repr(float(t))] + [repr(float(v)) for v in p])
    return buf.getvalue()
