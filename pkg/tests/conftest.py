import numpy as np
import pytest

from thetaplanes.tensor import CurvatureTensor, HermitianPoint, flat_point, standard_structure


def kulkarni_nomizu(h, k):
    return (
        np.einsum("ad,bc->abcd", h, k)
        + np.einsum("bc,ad->abcd", h, k)
        - np.einsum("ac,bd->abcd", h, k)
        - np.einsum("bd,ac->abcd", h, k)
    )


def random_curvature(rng, dim, terms=3):
    """Generic algebraic curvature tensor: sum of Kulkarni-Nomizu products of symmetric forms."""
    total = np.zeros((dim,) * 4)
    for _ in range(terms):
        a = rng.normal(size=(dim, dim))
        b = rng.normal(size=(dim, dim))
        total += kulkarni_nomizu(a + a.T, b + b.T)
    return CurvatureTensor(total)


def random_hermitian_pair(rng, m):
    """Non-standard compatible (g, J) obtained by a random change of basis."""
    n = 2 * m
    P = rng.normal(size=(n, n)) + 3 * np.eye(n)
    g = P.T @ P
    J = np.linalg.solve(P, standard_structure(m) @ P)
    return g, J


@pytest.fixture
def flat4():
    return flat_point(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def skewed_point(rng):
    g, J = random_hermitian_pair(rng, 2)
    return HermitianPoint(g, J)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(rep, "when", "call") == "call":
                lines.append((nodeid.split("::")[-1], "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
