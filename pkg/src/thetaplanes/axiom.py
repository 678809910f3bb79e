"""Pointwise necessary conditions of the theta-holomorphic plane axiom.

For a unit pair ``(x, y)`` with ``x`` orthogonal to ``y`` and ``Jy`` the plane
``alpha = span{x, Jx cos t + y sin t}`` has Kahler angle ``t``. A totally geodesic
(or totally umbilical with parallel mean curvature) submanifold tangent to
``alpha`` forces the normal part of ``R(X, Y)Z`` to vanish on ``alpha``. Using
``Jy`` and ``Jx sin t - y cos t`` as normal directions gives the first two
residuals below; the remaining three are their consequences:

    eq1 = R(Jx cos t + y sin t, x, x, Jy)
    eq2 = R(Jx cos t + y sin t, x, x, Jx sin t - y cos t)
    eq3 = R(Jx, x, x, Jy)
    eq4 = H(x) - K(x, y)
    eq5 = H(x) - H(y)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .planes import admissible_pairs, check_admissible, orthonormal_frame
from .tensor import DEFAULT_TOL, HermitianPoint, evaluate, pi1

DEFAULT_SAMPLES = 1000
NORMALITY_TOL = 1e-10


class ThetaRangeError(ValueError):
    """Raised when theta is not strictly inside ``(0, pi/2)``."""


class NotASpaceFormError(ValueError):
    pass


def check_theta(theta: float) -> None:
    if not 0.0 < theta < np.pi / 2:
        raise ThetaRangeError(
            f"theta={theta!r} must lie strictly inside (0, pi/2); the axiom is stated for a "
            "fixed theta in the open interval"
        )


@dataclass(frozen=True)
class ResidualRecord:
    theta: float
    eq1: float
    eq2: float
    eq3: float
    eq4: float
    eq5: float
    x: np.ndarray = field(repr=False, compare=False)
    y: np.ndarray = field(repr=False, compare=False)

    @property
    def axiom_residual(self) -> float:
        return max(abs(self.eq1), abs(self.eq2))

    def residuals(self) -> dict[str, float]:
        return {f"eq{i}": getattr(self, f"eq{i}") for i in range(1, 6)}


def _normals(p: HermitianPoint, x, y, theta):
    Jx = p.apply_J(x)
    tangent = Jx * np.cos(theta) + y * np.sin(theta)
    n1 = p.apply_J(y)
    n2 = Jx * np.sin(theta) - y * np.cos(theta)
    return Jx, tangent, n1, n2


def necessary_residuals(p: HermitianPoint, theta: float, x, y) -> ResidualRecord:
    check_theta(theta)
    check_admissible(p, x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Jx, w, n1, n2 = _normals(p, x, y, theta)
    for label, n in (("Jy", n1), ("Jx sin t - y cos t", n2)):
        off = max(abs(p.inner(n, x)), abs(p.inner(n, w)))
        if off > NORMALITY_TOL:
            raise ValueError(f"normal direction {label} is not orthogonal to the plane ({off:.3g})")
    R = p.R
    Jy = n1
    H_x = evaluate(R, x, Jx, Jx, x)
    H_y = evaluate(R, y, Jy, Jy, y)
    K_xy = evaluate(R, x, y, y, x)
    return ResidualRecord(
        theta=float(theta),
        eq1=evaluate(R, w, x, x, n1),
        eq2=evaluate(R, w, x, x, n2),
        eq3=evaluate(R, Jx, x, x, Jy),
        eq4=H_x - K_xy,
        eq5=H_x - H_y,
        x=x,
        y=y,
    )


@dataclass(frozen=True)
class AxiomScan:
    holds: bool
    worst: ResidualRecord
    max_residual: float
    samples: int

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"


def scan_records(p: HermitianPoint, theta: float, samples: int, seed: int) -> list[ResidualRecord]:
    check_theta(theta)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    xs, ys = admissible_pairs(p, np.random.default_rng(seed), samples)
    return [necessary_residuals(p, theta, x, y) for x, y in zip(xs, ys)]


def axiom_scan(
    p: HermitianPoint,
    theta: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> AxiomScan:
    """Check ``eq1 = eq2 = 0`` over seeded admissible pairs; returns the worst record."""
    records = scan_records(p, theta, samples, seed)
    worst = max(records, key=lambda r: r.axiom_residual)
    return AxiomScan(worst.axiom_residual <= tol, worst, worst.axiom_residual, samples)


@dataclass(frozen=True)
class SpaceFormDefect:
    c_star: float
    defect_norm: float


def space_form_defect(p: HermitianPoint) -> SpaceFormDefect:
    """Least-squares fit ``R ~ c pi1`` in a J-adapted orthonormal frame.

    ``defect_norm`` is the max-abs component of ``R - c_star pi1`` in that frame.
    """
    E = orthonormal_frame(p.g, p.J)
    R = p.R.in_frame(E).components
    P = pi1(np.eye(p.dim)).components
    c_star = float(np.sum(R * P) / np.sum(P * P))
    T = R - c_star * P
    return SpaceFormDefect(c_star, float(np.max(np.abs(T))))


@dataclass(frozen=True)
class TheoremReport:
    theta: float
    scan: AxiomScan
    defect: SpaceFormDefect
    tol: float
    kahler: bool | None = None

    @property
    def axiom_holds(self) -> bool:
        return self.scan.holds

    @property
    def space_form(self) -> bool:
        return self.defect.defect_norm <= self.tol

    @property
    def theorem(self) -> str:
        """``confirmed``, ``violated`` (axiom holds but not a space form) or ``contrapositive``."""
        if not self.scan.holds:
            return "contrapositive"
        return "confirmed" if self.space_form else "violated"

    @property
    def corollary(self) -> str:
        """Flatness verdict for the Kahler case; ``n/a`` when it does not apply."""
        if not self.kahler or not self.scan.holds:
            return "n/a"
        return "confirmed" if abs(self.defect.c_star) <= self.tol else "violated"

    @property
    def witness(self) -> ResidualRecord | None:
        return None if self.scan.holds else self.scan.worst

    @property
    def ok(self) -> bool:
        return self.theorem != "violated" and self.corollary != "violated"


def theorem_check(
    p: HermitianPoint,
    theta: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    kahler: bool | None = None,
) -> TheoremReport:
    """Run the axiom scan and test the conclusion it should imply.

    ``kahler`` states whether the Kahler hypothesis (``nabla J = 0``) is known to
    hold; when it does and the axiom holds, flatness is checked as well.
    """
    scan = axiom_scan(p, theta, samples, seed, tol)
    return TheoremReport(float(theta), scan, space_form_defect(p), tol, kahler)


@dataclass(frozen=True)
class SchurResult:
    c_values: list[float]
    spread: float
    tol: float

    @property
    def constant(self) -> bool:
        return self.spread <= self.tol


def schur_scan(points: list[HermitianPoint], tol: float = DEFAULT_TOL) -> SchurResult:
    """Compare the fitted constant ``c`` across points that are each pointwise space forms."""
    if len(points) < 2:
        raise ValueError("schur_scan needs at least 2 points")
    cs = []
    for i, p in enumerate(points):
        d = space_form_defect(p)
        if d.defect_norm > tol:
            raise NotASpaceFormError(
                f"point {i} is not a pointwise space form (defect {d.defect_norm:.3g} > {tol:.3g})"
            )
        cs.append(d.c_star)
    return SchurResult(cs, float(max(cs) - min(cs)), tol)
