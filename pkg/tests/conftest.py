import numpy as np
import pytest

ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance = {}


def random_conjugator(dim, rng, max_cond=1e3):
    while True:
        g = rng.standard_normal((dim, dim))
        if np.linalg.cond(g) < max_cond:
            return g


def random_orthogonal(dim, rng):
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    return Q * np.sign(np.diag(R))


def random_unitary(dim, rng):
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_no_real_map(dim, rng, min_gap=0.05, max_cond=1e3):
    """Rejection sample a map with no real eigenvalues.

    A conjugated block rotation-scaling matrix plus Gaussian noise, kept
    only if every eigenvalue stays ``min_gap`` away from the real axis.
    """
    while True:
        g = random_conjugator(dim, rng, max_cond)
        blocks = np.zeros((dim, dim))
        for k in range(dim // 2):
            a = rng.standard_normal()
            b = rng.choice([-1, 1]) * rng.uniform(0.2, 2.0)
            blocks[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [[a, -b], [b, a]]
        T = g @ blocks @ np.linalg.inv(g) + 0.1 * rng.standard_normal((dim, dim))
        ev = np.linalg.eigvals(T)
        if np.min(np.abs(ev.imag)) > min_gap and np.linalg.cond(T) < 1e6:
            return T


def random_complex_structure(dim, rng, max_cond=30.0):
    g = random_conjugator(dim, rng, max_cond)
    J0 = np.kron(np.eye(dim // 2), [[0.0, -1.0], [1.0, 0.0]])
    return g @ J0 @ np.linalg.inv(g)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance.items():
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
