"""Two-planes in a tangent space, their Kahler angle, and theta-holomorphic constructions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, subspace_angles

from .tensor import HermitianPoint

DEGENERATE_TOL = 1e-10
ADMISSIBLE_TOL = 1e-10
HOLOMORPHIC_SIN_TOL = 1e-8


class DegeneratePlaneError(ValueError):
    pass


class AdmissibilityError(ValueError):
    """Raised when ``(x, y)`` is not a unit pair with ``x`` orthogonal to ``y`` and ``Jy``."""


@dataclass(frozen=True)
class TwoPlane:
    """Span of two vectors in the tangent space of ``point``."""

    b1: np.ndarray
    b2: np.ndarray
    point: HermitianPoint

    def __post_init__(self):
        for name in ("b1", "b2"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (self.point.dim,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({self.point.dim},)")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def basis(self) -> np.ndarray:
        return np.stack([self.b1, self.b2], axis=1)


def gram_schmidt(vectors, g, tol: float = DEGENERATE_TOL) -> np.ndarray:
    """Orthonormalize the columns of ``vectors`` with respect to ``g`` (modified, two passes)."""
    g = np.asarray(g, dtype=float)
    V = np.array(vectors, dtype=float)
    out = []
    for v in V.T:
        w = v.copy()
        for _ in range(2):
            for e in out:
                w -= (e @ g @ w) * e
        nrm2 = w @ g @ w
        scale = v @ g @ v
        if scale <= 0 or nrm2 <= tol * scale:
            raise DegeneratePlaneError("vectors are (numerically) linearly dependent")
        out.append(w / np.sqrt(nrm2))
    return np.stack(out, axis=1)


def orthonormal_frame(g, J=None, seed: int | None = None) -> np.ndarray:
    """g-orthonormal frame as matrix columns.

    Gram-Schmidt runs over the coordinate basis, or over seeded random vectors when
    ``seed`` is given. With ``J`` the frame is adapted: ``{e1, Je1, e2, Je2, ...}``.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if seed is None:
        candidates = np.eye(n)
    else:
        candidates = np.random.default_rng(seed).standard_normal((n, n))
    frame: list[np.ndarray] = []
    for v in candidates.T:
        if len(frame) == n:
            break
        w = v.copy()
        for _ in range(2):
            for e in frame:
                w -= (e @ g @ w) * e
        nrm2 = w @ g @ w
        if nrm2 <= 1e-12 * max(v @ g @ v, 1e-300):
            continue
        e = w / np.sqrt(nrm2)
        frame.append(e)
        if J is not None:
            Je = np.asarray(J, dtype=float) @ e
            # Je is orthogonal to the J-invariant span built so far; re-project for rounding.
            for f in frame:
                Je -= (f @ g @ Je) * f
            frame.append(Je / np.sqrt(Je @ g @ Je))
    if len(frame) != n:
        raise DegeneratePlaneError("could not complete an orthonormal frame")
    return np.stack(frame, axis=1)


def orthonormalize(plane: TwoPlane) -> TwoPlane:
    """Gram-Schmidt on the plane basis with respect to ``g``.

    Raises :class:`DegeneratePlaneError` when the scale-free Gram determinant
    ``det G / (G11 G22)`` is at most ``1e-10``.
    """
    g = plane.point.g
    G = plane.basis.T @ g @ plane.basis
    if G[0, 0] <= 0 or G[1, 1] <= 0 or np.linalg.det(G) / (G[0, 0] * G[1, 1]) <= DEGENERATE_TOL:
        raise DegeneratePlaneError(f"degenerate plane basis, Gram matrix {G.tolist()}")
    E = gram_schmidt(plane.basis, g, tol=0.0)
    return TwoPlane(E[:, 0], E[:, 1], plane.point)


def kahler_angle(plane: TwoPlane) -> float:
    """Angle between the plane and its image under ``J``, in ``[0, pi/2]``."""
    on = orthonormalize(plane)
    p = plane.point
    Jb2 = p.apply_J(on.b2)
    cos = p.inner(on.b1, Jb2)
    # Jb2 is a unit vector g-orthogonal to b2, so its part off span{b1} has length
    # sin(angle); atan2 keeps full accuracy near 0 where arccos(cos) loses half the digits.
    sin = p.norm(Jb2 - cos * on.b1)
    return float(np.arctan2(sin, abs(cos)))


def check_admissible(p: HermitianPoint, x, y, tol: float = ADMISSIBLE_TOL) -> None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    checks = {
        "|x| = 1": abs(p.norm(x) - 1.0),
        "|y| = 1": abs(p.norm(y) - 1.0),
        "x orthogonal to y": abs(p.inner(x, y)),
        "x orthogonal to Jy": abs(p.inner(x, p.apply_J(y))),
    }
    bad = {k: v for k, v in checks.items() if v > tol}
    if bad:
        detail = ", ".join(f"{k} (off by {v:.3g})" for k, v in bad.items())
        raise AdmissibilityError(f"inadmissible pair: {detail}")


def make_theta_plane(p: HermitianPoint, x, y, theta: float) -> TwoPlane:
    """The plane with orthonormal basis ``{x, Jx cos(theta) + y sin(theta)}``."""
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta={theta} outside [0, pi/2]")
    check_admissible(p, x, y)
    x = np.asarray(x, dtype=float)
    second = p.apply_J(x) * np.cos(theta) + np.asarray(y, dtype=float) * np.sin(theta)
    return TwoPlane(x, second, p)


@dataclass(frozen=True)
class CanonicalBasis:
    x: np.ndarray
    y: np.ndarray | None
    phi: float

    def second(self, p: HermitianPoint) -> np.ndarray:
        Jx = p.apply_J(self.x)
        if self.y is None:
            return Jx
        return Jx * np.cos(self.phi) + self.y * np.sin(self.phi)


def canonical_plane_basis(plane: TwoPlane) -> CanonicalBasis:
    """Write the plane as ``span{x, Jx cos(phi) + y sin(phi)}`` with ``x`` orthogonal to ``y, Jy``.

    For a holomorphic plane (``sin(phi) <= 1e-8``) ``y`` is ``None`` and the
    basis is ``{x, Jx}``.
    """
    p = plane.point
    on = orthonormalize(plane)
    u, w = on.b1, on.b2
    # w = Jx cos(phi) + y sin(phi) forces g(Jx, w) = cos(phi) >= 0
    s = p.inner(p.apply_J(u), w)
    x = u if s >= 0 else -u
    cos_phi = float(np.clip(abs(s), 0.0, 1.0))
    phi = float(np.arccos(cos_phi))
    sin_phi = np.sqrt(max(0.0, 1.0 - cos_phi**2))
    if sin_phi <= HOLOMORPHIC_SIN_TOL:
        return CanonicalBasis(x, None, 0.0)
    y = (w - p.apply_J(x) * cos_phi) / sin_phi
    return CanonicalBasis(x, y, phi)


def principal_angles(p: HermitianPoint, A, B) -> np.ndarray:
    """Principal angles between column spans of ``A`` and ``B`` under the metric ``g``."""
    L = cholesky(p.g, lower=True)
    return subspace_angles(L.T @ np.asarray(A, dtype=float), L.T @ np.asarray(B, dtype=float))


def random_unit_vectors(p: HermitianPoint, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` g-unit vectors, uniform on the g-unit sphere, as rows."""
    L = cholesky(p.g, lower=True)
    z = rng.standard_normal((count, p.dim))
    # x = L^{-T} z has g-norm |z|
    x = np.linalg.solve(L.T, z.T).T
    return x / np.sqrt(np.einsum("ia,ab,ib->i", x, p.g, x))[:, None]


def admissible_pairs(p: HermitianPoint, rng: np.random.Generator, count: int):
    """Seeded unit pairs ``(x, y)`` with ``y`` orthogonal to ``x`` and ``Jx`` (hence ``x`` to ``Jy``)."""
    xs = random_unit_vectors(p, rng, count)
    raw = random_unit_vectors(p, rng, count)
    ys = np.empty_like(raw)
    for i, (x, v) in enumerate(zip(xs, raw)):
        Jx = p.apply_J(x)
        w = v.copy()
        for _ in range(2):
            w -= p.inner(x, w) * x
            w -= p.inner(Jx, w) * Jx
        nrm = p.norm(w)
        if nrm < 1e-8:
            raise DegeneratePlaneError("no room for an admissible partner; dimension too small")
        ys[i] = w / nrm
    return xs, ys
