"""Acceptance criteria, one test per criterion, each with its runtime budget.

Run with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``;
a PASS/FAIL line per criterion is printed at the end of the session.
"""

import contextlib
import io
import sys
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.optimize

from fibration_forge.angles import (
    ComplexSubspace,
    RealSubspace,
    principal_angles_complex,
    principal_angles_conjugate,
    principal_angles_greedy,
    principal_angles_real,
)
from fibration_forge.cli import main
from fibration_forge.exceptions import GermInvalidError
from fibration_forge.fibration import (
    BumpProfile,
    GermSpec,
    build_fibration,
    extend_germ,
    hopf_fibre_through,
    hopf_map,
    slope_sup,
    verify_fibration,
)
from fibration_forge.io import load_germ
from fibration_forge.numeric import (
    bezout_projectors,
    eigen_split,
    min_abs_imag_eigenvalue,
    range_basis,
    span_residual,
)
from fibration_forge.structures import (
    ComplexStructure,
    make_complex_structure,
    mckay_path,
    open_scissors,
    scissors_frame,
    scissors_structure,
)

sys.path.insert(0, str(Path(__file__).parent))
from cli_cases import CASES, DATA, read_golden, run_case  # noqa: E402
from conftest import (  # noqa: E402
    random_complex_structure,
    random_conjugator,
    random_no_real_map,
    random_orthogonal,
    random_unitary,
)


@contextlib.contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    print(f"runtime {elapsed:.2f} s (limit {seconds} s)")
    assert elapsed < seconds, f"took {elapsed:.1f} s, limit {seconds} s"


def unit_rows(rng, count, dim):
    X = rng.standard_normal((count, dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def test_criterion_1_hopf_formulas():
    rng = np.random.default_rng(1)
    with budget(1.0):
        np.testing.assert_array_equal(hopf_map([1.0, 0.0, 0.0, 0.0]), [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(hopf_map([0.0, 0.0, 1.0, 0.0]), [0.0, 0.0, -1.0])
        Y = hopf_map(unit_rows(rng, 1000, 4))
        assert np.max(np.abs(np.linalg.norm(Y, axis=1) - 1.0)) < 1e-12
        J = ComplexStructure.standard(4)
        for v in unit_rows(rng, 100, 4):
            images = hopf_map(hopf_fibre_through(J, v).sample(64))
            assert np.max(np.ptp(images, axis=0)) < 1e-12


def test_criterion_2_complex_structure_of_a_map():
    rng = np.random.default_rng(2)
    dims = np.repeat([4, 6, 8, 12], 250)
    ts = np.linspace(0.0, 1.0, 101)
    with budget(60.0):
        for k, dim in enumerate(dims):
            T = random_no_real_map(dim, rng)
            J = make_complex_structure(T).matrix
            assert np.linalg.norm(J @ J + np.eye(dim), 2) < 1e-7
            g = random_conjugator(dim, rng)
            gi = np.linalg.inv(g)
            resid = np.linalg.norm(make_complex_structure(g @ T @ gi).matrix - g @ J @ gi, 2)
            assert resid < 1e-6 * np.linalg.cond(g)
            Pp, _ = bezout_projectors(T)
            assert span_residual(eigen_split(T).basis_plus, range_basis(Pp, dim // 2)) < 1e-6
            if k % 5 == 0:
                path = np.stack([mckay_path(T, t) for t in ts])
                assert np.min(min_abs_imag_eigenvalue(path)) > 0


def test_criterion_3_scissors_retraction():
    rng = np.random.default_rng(3)
    dims = rng.choice([4, 6, 8], 200)
    ts = np.linspace(0.0, 1.0, 11)
    with budget(60.0):
        for k, dim in enumerate(dims):
            J = random_complex_structure(dim, rng)
            end = open_scissors(J, 1.0).matrix
            assert np.linalg.norm(end.T @ end - np.eye(dim), 2) < 1e-7
            for t in ts:
                Jt = open_scissors(J, t).matrix
                assert np.linalg.norm(Jt @ Jt + np.eye(dim), 2) < 1e-7
            g = random_orthogonal(dim, rng)
            for t in (0.5, 1.0):
                lhs = open_scissors(g @ J @ g.T, t).matrix
                assert np.linalg.norm(lhs - g @ open_scissors(J, t).matrix @ g.T, 2) < 1e-6
            if k % 10 == 0:
                # a repeated angle: two copies of one block, rotated at random
                block = random_complex_structure(2, rng)
                h = random_orthogonal(4, rng)
                Jr = h @ np.kron(np.eye(2), block) @ h.T
                r, m, beta = scissors_frame(Jr)
                ref = scissors_structure(r, m, beta, 0.5)
                U = random_orthogonal(2, rng)
                assert np.linalg.norm(scissors_structure(r @ U, m @ U, beta, 0.5) - ref, 2) < 1e-7
        closed = open_scissors(np.array([[0.0, 2.0], [-0.5, 0.0]]), 1.0).matrix
        np.testing.assert_allclose(closed, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-8)


def random_complex(n, k, rng):
    return ComplexSubspace.from_span(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)))


def test_criterion_4_principal_angles():
    rng = np.random.default_rng(4)
    with budget(30.0):
        for _ in range(100):
            P = RealSubspace.from_span(rng.standard_normal((4, 2)))
            Q = RealSubspace.from_span(rng.standard_normal((4, 2)))
            np.testing.assert_allclose(principal_angles_real(P, Q).angles,
                                       principal_angles_greedy(P, Q).angles, atol=1e-4)
            g = random_orthogonal(4, rng)
            np.testing.assert_allclose(
                principal_angles_real(P.transformed(g), Q.transformed(g)).angles,
                principal_angles_real(P, Q).angles, atol=1e-8)

            P, Q = random_complex(3, 2, rng), random_complex(3, 2, rng)
            np.testing.assert_allclose(principal_angles_complex(P, Q).angles,
                                       principal_angles_greedy(P, Q).angles, atol=1e-4)
            u = random_unitary(3, rng)
            np.testing.assert_allclose(
                principal_angles_complex(P.transformed(u), Q.transformed(u)).angles,
                principal_angles_complex(P, Q).angles, atol=1e-8)

            P = random_complex(4, 2, rng)
            conj = principal_angles_conjugate(P).angles
            np.testing.assert_allclose(conj, principal_angles_greedy(P, P.conjugate()).angles,
                                       atol=1e-4)
            np.testing.assert_allclose(conj, principal_angles_complex(P, P.conjugate()).angles,
                                       atol=1e-8)
            h = random_orthogonal(4, rng)
            np.testing.assert_allclose(principal_angles_conjugate(P.transformed(h)).angles,
                                       conj, atol=1e-8)

        b2 = principal_angles_conjugate(ComplexSubspace.from_span(np.array([[2.0], [1j]])))
        assert abs(np.cos(b2.angles[0]) - 3 / 5) < 1e-10
        b1 = principal_angles_conjugate(ComplexSubspace.from_span(np.array([[1.0], [1j]])))
        assert abs(b1.angles[0] - np.pi / 2) < 1e-10


# -- independent certificate check -----------------------------------------


def slope_sup_oracle(r0, r1, count=2_000_001):
    """``max u |f'(u)|`` of the exp(-1/x) partition, derivative written out by hand."""
    u = np.linspace(r0, r1, count)[1:-1]
    a = np.exp(-1.0 / (r1 - u))
    b = np.exp(-1.0 / (u - r0))
    f = a / (a + b)
    df = -f * (1 - f) * (1.0 / (r1 - u) ** 2 + 1.0 / (u - r0) ** 2)
    return float(np.max(u * np.abs(df)))


def margin_oracle(A, J, rng, n_coarse=4000, n_starts=12):
    """Multi-start minimum over ``t`` and unit ``v`` of ``|Mv - (v.Mv) v|``."""
    dim = A.shape[0]

    def objective(z):
        t = np.sin(z[0]) ** 2
        v = z[1:] / np.linalg.norm(z[1:])
        Mv = (t * A + (1 - t) * J) @ v
        return float(np.linalg.norm(Mv - (v @ Mv) * v))

    coarse = np.column_stack([rng.uniform(0, np.pi / 2, n_coarse),
                              rng.standard_normal((n_coarse, dim))])
    coarse = np.vstack([coarse, np.column_stack([np.zeros(200), rng.standard_normal((200, dim))]),
                        np.column_stack([np.full(200, np.pi / 2),
                                         rng.standard_normal((200, dim))])])
    vals = np.array([objective(z) for z in coarse])
    best = float(vals.min())
    for z in coarse[np.argsort(vals)[:n_starts]]:
        res = scipy.optimize.minimize(objective, z, method="Nelder-Mead",
                                      options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        best = min(best, float(res.fun))
    return best


def test_criterion_5_fibration_builder():
    rng = np.random.default_rng(5)
    base_S = slope_sup_oracle(0.25, 1.0)
    with budget(300.0):
        for n_exp in range(1, 7):
            S = slope_sup(BumpProfile(0.25, 1.0, n_exp))
            assert abs(S - base_S / n_exp) <= 1e-6 * base_S / n_exp
        for n in (1, 2):
            for _ in range(20):
                A = random_no_real_map(2 * n, rng)
                F = build_fibration(A)
                J = make_complex_structure(A).matrix
                gap = np.linalg.norm(A - J, 2)
                eps = margin_oracle(A, J, rng)
                # the stored margin may be conservative, never optimistic
                assert F.epsilon <= eps + 1e-9
                assert abs(F.epsilon - eps) <= 1e-6 * max(1.0, eps)
                S = slope_sup_oracle(F.bump.r0, F.bump.r1) / F.bump.n_exp
                assert S * gap < F.epsilon
                report = verify_fibration(F, n_samples=10_000, n_pairs=500)
                assert report.passed, [r.to_dict() for r in report.failures]
                np.testing.assert_array_equal(F.dN(np.zeros((1, 2 * n)))[0], A)
                X = unit_rows(rng, 500, 2 * n) * (F.bump.outer * rng.uniform(1, 4, (500, 1)))
                np.testing.assert_array_equal(F.N(X), X @ F.J.matrix.T)


def test_criterion_6_germ_extension():
    with budget(120.0):
        J4 = ComplexStructure.standard(4).matrix
        Q = np.random.default_rng(6).standard_normal((4, 4, 4))
        Q /= np.abs(Q).max()
        for germ in (GermSpec(2, (J4,)), GermSpec(2, (J4, 1e-2 * Q))):
            _, report = extend_germ(germ, n_samples=10_000, n_pairs=500)
            assert report.passed, [r.to_dict() for r in report.failures]
        with pytest.raises(GermInvalidError):
            extend_germ(load_germ(DATA / "germ_real_eigenvalue.json"))


def test_criterion_7_cli_contract(tmp_path):
    codes = set()
    for name, (_, _, expected) in sorted(CASES.items()):
        first = run_case(name, tmp_path / name / "a")
        second = run_case(name, tmp_path / name / "b")
        assert first == second, f"{name} is not deterministic"
        code, outputs = first
        assert code == expected, name
        assert outputs == read_golden(name), f"{name} differs from its golden output"
        codes.add(code)
    with contextlib.redirect_stderr(io.StringIO()):
        codes.add(main(["retract", str(DATA / "broken.json")]))
    assert codes == {0, 2, 3, 4}


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
