import numpy as np
import pytest

from thetaplanes.curvature import constancy_scan, holomorphic_curvature, sectional_curvature
from thetaplanes.planes import TwoPlane
from thetaplanes.tensor import (
    HermitianPoint,
    complex_space_form_tensor,
    pi1,
    real_space_form_tensor,
    standard_structure,
)

from conftest import random_curvature, random_hermitian_pair

I4 = np.eye(4)
J4 = standard_structure(2)


def test_sectional_real_space_form(rng):
    p = HermitianPoint(I4, J4, real_space_form_tensor(-1.5, I4))
    for _ in range(20):
        B = rng.normal(size=(4, 2))
        assert sectional_curvature(p, TwoPlane(B[:, 0], B[:, 1], p)) == pytest.approx(-1.5, abs=1e-12)


def test_sectional_flat(flat4, rng):
    B = rng.normal(size=(4, 2))
    assert sectional_curvature(flat4, TwoPlane(B[:, 0], B[:, 1], flat4)) == 0.0


def test_sectional_complex_space_form_holomorphic_plane():
    p = HermitianPoint(I4, J4, complex_space_form_tensor(4.0, I4, J4))
    x = np.array([0.6, 0.0, 0.0, 0.8])
    assert sectional_curvature(p, TwoPlane(x, J4 @ x, p)) == pytest.approx(4.0, abs=1e-12)


def test_holomorphic_curvature_values(rng):
    csf = HermitianPoint(I4, J4, complex_space_form_tensor(4.0, I4, J4))
    rsf = HermitianPoint(I4, J4, real_space_form_tensor(2.0, I4))
    for _ in range(10):
        x = rng.normal(size=4)
        x /= np.linalg.norm(x)
        assert holomorphic_curvature(csf, x) == pytest.approx(4.0, abs=1e-12)
        assert holomorphic_curvature(rsf, x) == pytest.approx(2.0, abs=1e-12)
        assert holomorphic_curvature(HermitianPoint(I4, J4), x) == 0.0


def test_holomorphic_curvature_rejects_non_unit(flat4):
    with pytest.raises(ValueError):
        holomorphic_curvature(flat4, np.array([1.0, 1.0, 0.0, 0.0]))


def test_holomorphic_equals_sectional_on_x_Jx(rng):
    g, J = random_hermitian_pair(rng, 2)
    p = HermitianPoint(g, J, random_curvature(rng, 4))
    for _ in range(50):
        x = rng.normal(size=4)
        x /= p.norm(x)
        diff = holomorphic_curvature(p, x) - sectional_curvature(p, TwoPlane(x, J @ x, p))
        assert abs(diff) <= 1e-14 * max(1.0, abs(holomorphic_curvature(p, x)))


def test_sectional_basis_invariance(rng):
    g, J = random_hermitian_pair(rng, 2)
    p = HermitianPoint(g, J, random_curvature(rng, 4))
    worst = 0.0
    for _ in range(1000):
        B = rng.normal(size=(4, 2))
        ref = sectional_curvature(p, TwoPlane(B[:, 0], B[:, 1], p))
        M = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        C = B @ M
        worst = max(worst, abs(sectional_curvature(p, TwoPlane(C[:, 0], C[:, 1], p)) - ref))
    assert worst <= 1e-10


@pytest.mark.parametrize("kind", ["holomorphic", "antiholomorphic"])
def test_scan_real_space_form(kind):
    g, J = random_hermitian_pair(np.random.default_rng(5), 3)
    p = HermitianPoint(g, J, 3.0 * pi1(g))
    mean, dev = constancy_scan(p, kind, 500, seed=1)
    assert mean == pytest.approx(3.0, abs=1e-12)
    assert dev <= 1e-12


def test_scan_complex_space_form():
    p = HermitianPoint(I4, J4, complex_space_form_tensor(4.0, I4, J4))
    hol = constancy_scan(p, "holomorphic", 300, seed=2)
    anti = constancy_scan(p, "antiholomorphic", 300, seed=2)
    assert hol.mean == pytest.approx(4.0, abs=1e-12) and hol.max_deviation <= 1e-12
    assert anti.mean == pytest.approx(1.0, abs=1e-12) and anti.max_deviation <= 1e-12


def test_scan_zero(flat4):
    assert tuple(constancy_scan(flat4, "holomorphic", 10)) == (0.0, 0.0)


def test_scan_deterministic_and_validated(rng):
    p = HermitianPoint(I4, J4, random_curvature(rng, 4))
    assert constancy_scan(p, "antiholomorphic", 50, seed=7) == constancy_scan(p, "antiholomorphic", 50, seed=7)
    with pytest.raises(ValueError):
        constancy_scan(p, "holomorphic", 1)
    with pytest.raises(ValueError):
        constancy_scan(p, "bogus", 10)
