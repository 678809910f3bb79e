"""Pointwise almost-Hermitian data and algebraic curvature tensors.

Curvature sign convention: ``R(X, Y, Z, U) = g(R(X, Y)Z, U)`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``, so that ``R(x, y, y, x)`` is the
sectional curvature of an orthonormal pair (``+1`` on the unit sphere).

Components are stored densely as ``(n, n, n, n)`` arrays with respect to the
basis in which ``g`` and ``J`` are given.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-12


class HypothesisError(ValueError):
    """Raised when data violates a standing hypothesis (e.g. dimension ``2m`` with ``m >= 2``)."""


class IncompatibleStructureError(ValueError):
    """Raised when ``(g, J)`` is not an almost-Hermitian pair."""


@dataclass(frozen=True)
class CurvatureTensor:
    """Rank-4 covariant tensor with dense components."""

    components: np.ndarray

    def __post_init__(self):
        comps = np.array(self.components, dtype=float)
        if comps.ndim != 4 or len(set(comps.shape)) != 1:
            raise ValueError(f"curvature components must be (n, n, n, n), got {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def __add__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        return CurvatureTensor(self.components + other.components)

    def __sub__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        return CurvatureTensor(self.components - other.components)

    def __mul__(self, scalar: float) -> "CurvatureTensor":
        return CurvatureTensor(float(scalar) * self.components)

    __rmul__ = __mul__

    def __call__(self, x, y, z, u) -> float:
        return evaluate(self, x, y, z, u)

    def in_frame(self, frame: np.ndarray) -> "CurvatureTensor":
        """Components ``R(e_a, e_b, e_c, e_d)`` for the frame whose columns are ``e_a``."""
        E = np.asarray(frame, dtype=float)
        return CurvatureTensor(
            np.einsum("ijkl,ia,jb,kc,ld->abcd", self.components, E, E, E, E, optimize=True)
        )

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


def zero_tensor(dim: int) -> CurvatureTensor:
    return CurvatureTensor(np.zeros((dim,) * 4))


@dataclass(frozen=True)
class HermitianPoint:
    """Metric ``g``, almost complex structure ``J`` and curvature ``R`` on one tangent space.

    ``J`` acts on column vectors, ``(J v)^a = J[a, b] v^b``. Construction only checks
    shapes; use :func:`validate_point` for the algebraic hypotheses.
    """

    g: np.ndarray
    J: np.ndarray
    R: CurvatureTensor = field(default=None)

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        J = np.array(self.J, dtype=float)
        n = g.shape[0]
        if g.shape != (n, n) or J.shape != (n, n):
            raise ValueError(f"g and J must be square of equal size, got {g.shape} and {J.shape}")
        R = self.R if self.R is not None else zero_tensor(n)
        if not isinstance(R, CurvatureTensor):
            R = CurvatureTensor(R)
        if R.dim != n:
            raise ValueError(f"curvature dimension {R.dim} does not match metric dimension {n}")
        g.setflags(write=False)
        J.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "R", R)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def m(self) -> int:
        return self.dim // 2

    def inner(self, x, y) -> float:
        return float(np.asarray(x) @ self.g @ np.asarray(y))

    def norm(self, x) -> float:
        return float(np.sqrt(self.inner(x, x)))

    def apply_J(self, x) -> np.ndarray:
        return self.J @ np.asarray(x, dtype=float)

    def with_curvature(self, R: CurvatureTensor) -> "HermitianPoint":
        return HermitianPoint(self.g, self.J, R)

    def scaled(self, factor: float) -> "HermitianPoint":
        return HermitianPoint(self.g, self.J, factor * self.R)


def standard_structure(m: int) -> np.ndarray:
    """``J`` in the adapted basis ``{e1, Je1, ..., em, Jem}``: ``J e_{2k} = e_{2k+1}``."""
    J = np.zeros((2 * m, 2 * m))
    for k in range(m):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def flat_point(m: int = 2) -> HermitianPoint:
    return HermitianPoint(np.eye(2 * m), standard_structure(m))


def require_even_dim(dim: int) -> None:
    if dim % 2 or dim < 4:
        raise HypothesisError(
            f"dimension {dim} is not 2m with m >= 2; the theorem needs an almost Hermitian "
            "manifold of dimension 2m, m >= 2"
        )


def structure_residuals(g, J) -> dict[str, float]:
    g = np.asarray(g, dtype=float)
    J = np.asarray(J, dtype=float)
    n = g.shape[0]
    eig_min = float(np.linalg.eigvalsh((g + g.T) / 2).min())
    return {
        "metric_symmetry": float(np.max(np.abs(g - g.T))),
        "metric_min_eigenvalue": eig_min,
        # max-abs entry of J.J + I
        "J_squared": float(np.max(np.abs(J @ J + np.eye(n)))),
        # max-abs entry of J^T g J - g
        "compatibility": float(np.max(np.abs(J.T @ g @ J - g))),
    }


def check_compatible(g, J, tol: float = 1e-10) -> None:
    res = structure_residuals(g, J)
    if res["metric_min_eigenvalue"] <= 0 or res["metric_symmetry"] > tol:
        raise IncompatibleStructureError(f"metric is not symmetric positive definite: {res}")
    if res["J_squared"] > tol or res["compatibility"] > tol:
        raise IncompatibleStructureError(f"(g, J) is not almost Hermitian: {res}")


def symmetry_residuals(R: CurvatureTensor) -> dict[str, float]:
    """Max-abs residuals of the four algebraic curvature identities."""
    T = R.components if isinstance(R, CurvatureTensor) else np.asarray(R, dtype=float)
    if T.size == 0:
        return dict.fromkeys(("antisym_12", "antisym_34", "pair_symmetry", "bianchi"), 0.0)
    return {
        "antisym_12": float(np.max(np.abs(T + T.transpose(1, 0, 2, 3)))),
        "antisym_34": float(np.max(np.abs(T + T.transpose(0, 1, 3, 2)))),
        "pair_symmetry": float(np.max(np.abs(T - T.transpose(2, 3, 0, 1)))),
        # R(x,y,z,u) + R(y,z,x,u) + R(z,x,y,u)
        "bianchi": float(np.max(np.abs(T + T.transpose(2, 0, 1, 3) + T.transpose(1, 2, 0, 3)))),
    }


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict[str, float]
    tol: float

    @property
    def valid(self) -> bool:
        return not self.failures()

    def failures(self) -> list[str]:
        bad = []
        for name, value in self.residuals.items():
            if name == "metric_min_eigenvalue":
                if value <= 0:
                    bad.append(name)
            elif value > self.tol:
                bad.append(name)
        return bad


def validate_point(p: HermitianPoint, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the almost-Hermitian hypotheses and curvature identities at ``p``.

    Raises
    ------
    HypothesisError
        If the dimension is odd or smaller than 4.
    """
    require_even_dim(p.dim)
    residuals = structure_residuals(p.g, p.J)
    residuals.update(symmetry_residuals(p.R))
    return ValidationReport(residuals, tol)


def evaluate(R: CurvatureTensor, x, y, z, u) -> float:
    """Multilinear contraction ``R(x, y, z, u)``."""
    vecs = [np.asarray(v, dtype=float) for v in (x, y, z, u)]
    for v in vecs:
        if v.shape != (R.dim,):
            raise ValueError(f"vector of shape {v.shape} does not match tensor dimension {R.dim}")
    return float(np.einsum("abcd,a,b,c,d->", R.components, *vecs, optimize=True))


def pi1(g) -> CurvatureTensor:
    """``pi1(x, y, z, u) = g(x, u) g(y, z) - g(x, z) g(y, u)``."""
    g = np.asarray(g, dtype=float)
    return CurvatureTensor(np.einsum("ad,bc->abcd", g, g) - np.einsum("ac,bd->abcd", g, g))


def kahler_form(g, J) -> np.ndarray:
    """Matrix of ``(x, y) -> g(x, J y)``."""
    return np.asarray(g, dtype=float) @ np.asarray(J, dtype=float)


def pi2(g, J) -> CurvatureTensor:
    """``pi2(x,y,z,u) = g(x,Ju) g(y,Jz) - g(x,Jz) g(y,Ju) - 2 g(x,Jy) g(z,Ju)``."""
    check_compatible(g, J)
    W = kahler_form(g, J)
    return CurvatureTensor(
        np.einsum("ad,bc->abcd", W, W)
        - np.einsum("ac,bd->abcd", W, W)
        - 2.0 * np.einsum("ab,cd->abcd", W, W)
    )


def real_space_form_tensor(c: float, g) -> CurvatureTensor:
    return float(c) * pi1(g)


def complex_space_form_tensor(c: float, g, J) -> CurvatureTensor:
    """``(c/4)(pi1 + pi2)``: constant holomorphic sectional curvature ``c``."""
    return (float(c) / 4.0) * (pi1(g) + pi2(g, J))


def is_rk(R: CurvatureTensor, J, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Test ``R(x, y, z, u) = R(Jx, Jy, Jz, Ju)`` on all basis 4-tuples."""
    J = np.asarray(J, dtype=float)
    rotated = np.einsum("ijkl,ia,jb,kc,ld->abcd", R.components, J, J, J, J, optimize=True)
    residual = float(np.max(np.abs(R.components - rotated)))
    return residual <= tol, residual
