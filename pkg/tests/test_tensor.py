import numpy as np
import pytest

from thetaplanes.tensor import (
    CurvatureTensor,
    HermitianPoint,
    HypothesisError,
    IncompatibleStructureError,
    complex_space_form_tensor,
    evaluate,
    flat_point,
    is_rk,
    pi1,
    pi2,
    real_space_form_tensor,
    standard_structure,
    symmetry_residuals,
    validate_point,
    zero_tensor,
)

from conftest import random_hermitian_pair

I4 = np.eye(4)
J4 = standard_structure(2)
e = np.eye(4)


def brute_pi1(g, x, y, z, u):
    gi = lambda a, b: sum(a[i] * g[i, j] * b[j] for i in range(len(a)) for j in range(len(b)))
    return gi(x, u) * gi(y, z) - gi(x, z) * gi(y, u)


class TestValidatePoint:
    def test_flat_is_valid(self, flat4):
        rep = validate_point(flat4)
        assert rep.valid
        assert all(v == 0 for k, v in rep.residuals.items() if k != "metric_min_eigenvalue")

    def test_scaled_J_reports_residual_three(self):
        rep = validate_point(HermitianPoint(I4, 2 * J4))
        assert rep.residuals["J_squared"] == pytest.approx(3.0)
        assert not rep.valid
        assert "J_squared" in rep.failures()

    def test_pi1_point_is_valid(self):
        assert validate_point(HermitianPoint(I4, J4, pi1(I4))).valid

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_rejects_bad_dimension(self, dim):
        with pytest.raises(HypothesisError):
            validate_point(HermitianPoint(np.eye(dim), np.zeros((dim, dim))))

    def test_indefinite_metric_is_invalid(self):
        g = np.diag([1.0, 1.0, -1.0, -1.0])
        assert "metric_min_eigenvalue" in validate_point(HermitianPoint(g, J4)).failures()


class TestPi1:
    def test_orthonormal_pair(self):
        assert evaluate(pi1(I4), e[0], e[1], e[1], e[0]) == 1.0

    def test_repeated_slot_vanishes(self):
        assert np.all(pi1(I4).components[0, 0] == 0)

    def test_scaled_gram_unit_vectors(self):
        g = 2 * I4
        x, y = e[0] / np.sqrt(2), e[1] / np.sqrt(2)
        assert evaluate(pi1(g), x, y, y, x) == pytest.approx(1.0, abs=1e-15)

    def test_matches_brute_force(self, rng):
        g, _ = random_hermitian_pair(rng, 2)
        P = pi1(g)
        for _ in range(10):
            x, y, z, u = rng.normal(size=(4, 4))
            assert evaluate(P, x, y, z, u) == pytest.approx(brute_pi1(g, x, y, z, u), rel=1e-12, abs=1e-12)


class TestPi2:
    def test_holomorphic_value_three(self, rng):
        x = rng.normal(size=4)
        x /= np.linalg.norm(x)
        assert evaluate(pi2(I4, J4), x, J4 @ x, J4 @ x, x) == pytest.approx(3.0, abs=1e-14)

    def test_antiholomorphic_pair_zero(self):
        # e0 and e2 are orthogonal to each other's J-images
        assert evaluate(pi2(I4, J4), e[0], e[2], e[2], e[0]) == 0.0

    def test_repeated_slot_vanishes(self):
        assert np.all(pi2(I4, J4).components[1, 1] == 0)

    def test_rejects_incompatible(self):
        with pytest.raises(IncompatibleStructureError):
            pi2(np.diag([1.0, 2.0, 1.0, 1.0]), J4)


class TestModels:
    def test_real_space_form_zero(self):
        assert real_space_form_tensor(0.0, I4).max_abs() == 0.0

    def test_real_space_form_unit(self):
        assert evaluate(real_space_form_tensor(1.0, I4), e[0], e[3], e[3], e[0]) == 1.0

    def test_complex_space_form_values(self):
        R = complex_space_form_tensor(4.0, I4, J4)
        assert evaluate(R, e[0], e[1], e[1], e[0]) == pytest.approx(4.0)
        assert evaluate(R, e[0], e[2], e[2], e[0]) == pytest.approx(1.0)
        assert complex_space_form_tensor(0.0, I4, J4).max_abs() == 0.0

    def test_constructor_symmetries(self, rng):
        g, J = random_hermitian_pair(rng, 3)
        for T in (pi1(g), pi2(g, J), real_space_form_tensor(2.5, g),
                  complex_space_form_tensor(-3.0, g, J)):
            assert max(symmetry_residuals(T).values()) <= 1e-12 * max(1.0, T.max_abs())

    def test_unitary_invariance(self, rng):
        m = 2
        models = [pi1(I4), pi2(I4, J4), real_space_form_tensor(1.7, I4),
                  complex_space_form_tensor(4.0, I4, J4)]
        worst = 0.0
        for _ in range(100):
            Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
            Q, _ = np.linalg.qr(Z)
            # realify Q in the adapted basis {e1, Je1, e2, Je2}
            U = np.zeros((4, 4))
            for a in range(m):
                for b in range(m):
                    re, im = Q[a, b].real, Q[a, b].imag
                    U[2 * a:2 * a + 2, 2 * b:2 * b + 2] = [[re, -im], [im, re]]
            assert np.allclose(U.T @ U, I4) and np.allclose(U @ J4, J4 @ U)
            x, y, z, u = rng.normal(size=(4, 4))
            for R in models:
                worst = max(worst, abs(evaluate(R, U @ x, U @ y, U @ z, U @ u) - evaluate(R, x, y, z, u)))
        assert worst <= 1e-10

    def test_complex_space_form_is_rk_and_bianchi(self):
        R = complex_space_form_tensor(4.0, I4, J4)
        ok, res = is_rk(R, J4)
        assert ok and res <= 1e-12
        assert symmetry_residuals(R)["bianchi"] == 0.0


class TestEvaluate:
    def test_pi1_basis(self):
        assert evaluate(pi1(I4), e[0], e[1], e[1], e[0]) == 1.0

    def test_repeated_first_slots(self, rng):
        R = complex_space_form_tensor(4.0, I4, J4)
        x, z, u = rng.normal(size=(3, 4))
        assert evaluate(R, x, x, z, u) == pytest.approx(0.0, abs=1e-13)

    def test_linearity(self):
        c = 1.3
        assert evaluate(c * pi1(I4), 2 * e[0], e[1], e[1], e[0]) == pytest.approx(2 * c)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(pi1(I4), np.ones(3), e[0], e[0], e[0])


class TestIsRK:
    def test_real_space_form(self):
        ok, res = is_rk(real_space_form_tensor(2.0, I4), J4)
        assert ok and res == 0.0

    def test_complex_space_form(self):
        assert is_rk(complex_space_form_tensor(4.0, I4, J4), J4)[0]

    def test_degenerate_pi1_is_not_rk(self):
        a = np.diag([1.0, 0.0, 1.0, 0.0])  # adapted basis {e1, Je1, e3, Je3}
        delta = pi1(a)
        assert evaluate(delta, e[0], e[2], e[2], e[0]) == 1.0
        assert evaluate(delta, J4 @ e[0], J4 @ e[2], J4 @ e[2], J4 @ e[0]) == 0.0
        ok, res = is_rk(delta, J4)
        assert not ok and res == pytest.approx(1.0)


class TestSymmetryResiduals:
    def test_pi1_and_zero(self):
        assert max(symmetry_residuals(pi1(I4)).values()) == 0.0
        assert max(symmetry_residuals(zero_tensor(4)).values()) == 0.0

    def test_single_component(self):
        T = np.zeros((4,) * 4)
        T[0, 1, 2, 3] = 1.0
        res = symmetry_residuals(CurvatureTensor(T))
        assert res["antisym_12"] == 1.0 and res["antisym_34"] == 1.0


def test_point_is_immutable(flat4):
    with pytest.raises(ValueError):
        flat4.g[0, 0] = 5.0
    with pytest.raises(ValueError):
        flat4.R.components[0, 0, 0, 0] = 1.0
