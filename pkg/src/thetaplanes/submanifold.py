"""Submanifold calculus for immersed coordinate patches.

Conventions follow the Gauss and Weingarten formulas::

    nabla~_X Y  = nabla_X Y + sigma(X, Y)
    nabla~_X xi = -A_xi X + D_X xi

Vector fields are taken as constant-coefficient combinations of the parameter
coordinate fields; all quantities are tensorial, so only the discretization
error depends on that choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import expr
from .charts import (
    CatalogError,
    ChartMetric,
    DiffConfig,
    DomainError,
    _christoffel,
    catalog,
    central_diff,
    chart_from_dict,
    riemann_coordinates,
)

RANK_TOL = 1e-8
NORMAL_TOL = 1e-8
TANGENT_TOL = 1e-6


class RankError(ValueError):
    pass


class NotNormalError(ValueError):
    pass


class NotTangentError(ValueError):
    pass


NormalField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ImmersedPatch:
    """Immersion ``f`` of an ``n``-dimensional parameter box into a chart."""

    name: str
    ambient: ChartMetric
    n: int
    parameters: tuple[str, ...]
    f_src: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    params: Mapping[str, float] = field(default_factory=dict)
    points: tuple[tuple[float, ...], ...] = ()
    normals_src: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    expected: Mapping = field(default_factory=dict)
    diff: DiffConfig = field(default_factory=DiffConfig)

    def __post_init__(self):
        if len(self.f_src) != self.ambient.dim:
            raise CatalogError(f"immersion needs {self.ambient.dim} components, got {len(self.f_src)}")
        object.__setattr__(self, "_f", self._compile(self.f_src))

    def _compile(self, exprs: Sequence[str]):
        try:
            nodes = [expr.substitute(expr.parse(s), self.params) for s in exprs]
            return [expr.compile_positional(node, list(self.parameters)) for node in nodes]
        except expr.ExpressionError as exc:
            raise CatalogError(f"patch {self.name!r}: {exc}") from None

    def position(self, t) -> np.ndarray:
        t = [float(v) for v in t]
        return np.array([fn(t) for fn in self._f])

    def vector_field(self, components: Sequence[str]) -> NormalField:
        """Compile a vector field given as chart-coordinate expressions over the parameters."""
        if len(components) != self.ambient.dim:
            raise CatalogError(f"vector field needs {self.ambient.dim} components")
        fns = self._compile(components)
        return lambda t: np.array([fn([float(v) for v in t]) for fn in fns])

    def normal_field(self, name: str) -> NormalField:
        if name not in self.normals_src:
            raise CatalogError(f"patch {self.name!r} has no normal field {name!r}")
        return self.vector_field(self.normals_src[name])

    def check_interior(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape != (self.n,):
            raise DomainError(f"parameter point has shape {t.shape}, expected ({self.n},)")
        m = 2 * self.diff.reach
        if np.any(t - m < self.lower) or np.any(t + m > self.upper):
            raise DomainError(f"parameter point {t.tolist()} is outside the patch domain")
        self.ambient.check_interior(self.position(t))
        return t


# --------------------------------------------------------------------------
# pointwise building blocks
# --------------------------------------------------------------------------


def _tangents(patch: ImmersedPatch, t) -> np.ndarray:
    """Rows ``T_i = d f / d t_i`` in chart coordinates."""
    return central_diff(patch.position, t, patch.diff.step, patch.diff.order)


@dataclass(frozen=True)
class _Local:
    t: np.ndarray
    x: np.ndarray  # ambient point
    g: np.ndarray
    Gamma: np.ndarray
    T: np.ndarray  # (n, dim)
    G: np.ndarray  # induced metric
    hess: np.ndarray  # (n, n, dim): nabla~_{d_i} d_j f

    def tangent_coeffs(self, v: np.ndarray) -> np.ndarray:
        """Parameter coefficients of the tangential part of ambient vector(s) ``v`` (last axis)."""
        rhs = np.einsum("ia,ab,...b->...i", self.T, self.g, v)
        return rhs @ np.linalg.inv(self.G)

    def tangent_part(self, v: np.ndarray) -> np.ndarray:
        return np.einsum("...i,ia->...a", self.tangent_coeffs(v), self.T)

    def normal_part(self, v: np.ndarray) -> np.ndarray:
        return v - self.tangent_part(v)

    def ambient_derivative(self, dv: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``nabla~_{d_i} V`` rows from coordinate derivatives ``dv[i]`` of ``V`` along ``f``."""
        return dv + np.einsum("kab,ia,b->ik", self.Gamma, self.T, v)


def _local(patch: ImmersedPatch, t) -> _Local:
    t = np.asarray(t, dtype=float)
    x = patch.position(t)
    amb = patch.ambient
    g = amb.metric(x)
    Gamma = _christoffel(amb, x)
    T = _tangents(patch, t)
    G = T @ g @ T.T
    d2f = central_diff(lambda s: _tangents(patch, s), t, patch.diff.outer_step, patch.diff.order)
    hess = d2f + np.einsum("kab,ia,jb->ijk", Gamma, T, T)
    return _Local(t, x, g, Gamma, T, G, hess)


def _sigma_coords(loc: _Local) -> np.ndarray:
    return loc.normal_part(loc.hess)


def check_rank(patch: ImmersedPatch, t) -> None:
    loc_T = _tangents(patch, t)
    g = patch.ambient.metric(patch.position(t))
    L = np.linalg.cholesky(g)
    sv = np.linalg.svd(loc_T @ L, compute_uv=False)
    if sv.min() <= RANK_TOL:
        raise RankError(f"immersion is rank deficient at {list(t)} (singular value {sv.min():.3g})")


def tangent_frame(loc: _Local) -> np.ndarray:
    """Coefficient matrix ``C`` with ``E_a = sum_i C[i, a] T_i`` g-orthonormal (Gram-Schmidt)."""
    n = loc.G.shape[0]
    C = np.zeros((n, n))
    for a in range(n):
        c = np.zeros(n)
        c[a] = 1.0
        for _ in range(2):
            for b in range(a):
                c -= (C[:, b] @ loc.G @ c) * C[:, b]
        C[:, a] = c / np.sqrt(c @ loc.G @ c)
    return C


def normal_frame(loc: _Local) -> np.ndarray:
    """Columns form a g-orthonormal basis of the normal space."""
    dim = loc.g.shape[0]
    basis = []
    for v in np.eye(dim):
        w = loc.normal_part(v)
        for _ in range(2):
            for e in basis:
                w = w - (e @ loc.g @ w) * e
        nrm2 = w @ loc.g @ w
        if nrm2 > 1e-10:
            basis.append(w / np.sqrt(nrm2))
        if len(basis) == dim - loc.G.shape[0]:
            break
    return np.stack(basis, axis=1)


def _prepare(patch: ImmersedPatch, t) -> _Local:
    t = patch.check_interior(t)
    check_rank(patch, t)
    return _local(patch, t)


def _to_coeffs(loc: _Local, X, label: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    n = loc.G.shape[0]
    if X.shape == (n,) and n != loc.g.shape[0]:
        return X
    if X.shape != (loc.g.shape[0],):
        raise ValueError(f"{label} must be an ambient vector or parameter coefficients")
    off = loc.normal_part(X)
    scale = max(np.sqrt(X @ loc.g @ X), 1.0)
    if np.sqrt(abs(off @ loc.g @ off)) > TANGENT_TOL * scale:
        raise NotTangentError(f"{label} is not tangent to the patch")
    return loc.tangent_coeffs(X)


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SecondFundamentalForm:
    """``sigma`` at one parameter point.

    ``coords[i, j]`` is ``sigma(d_i, d_j)`` for parameter fields; ``frame[a, b]``
    is ``sigma(E_a, E_b)`` for the g-orthonormal tangent frame ``E``.
    """

    coords: np.ndarray
    frame: np.ndarray
    tangent_frame: np.ndarray  # (dim, n), columns E_a
    _loc: _Local = field(repr=False)

    def __call__(self, X, Y) -> np.ndarray:
        x = _to_coeffs(self._loc, X, "X")
        y = _to_coeffs(self._loc, Y, "Y")
        return np.einsum("i,j,ijk->k", x, y, self.coords)


def second_fundamental_form(patch: ImmersedPatch, t) -> SecondFundamentalForm:
    loc = _prepare(patch, t)
    sig = _sigma_coords(loc)
    C = tangent_frame(loc)
    framed = np.einsum("ia,jb,ijk->abk", C, C, sig)
    return SecondFundamentalForm(sig, framed, loc.T.T @ C, loc)


def _mean(loc: _Local, sig: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ijk->k", np.linalg.inv(loc.G), sig) / loc.G.shape[0]


def mean_curvature(patch: ImmersedPatch, t) -> np.ndarray:
    """``H = (1/n) trace sigma`` as an ambient chart vector."""
    loc = _prepare(patch, t)
    return _mean(loc, _sigma_coords(loc))


def mean_curvature_field(patch: ImmersedPatch) -> NormalField:
    def H(t):
        loc = _local(patch, np.asarray(t, dtype=float))
        return _mean(loc, _sigma_coords(loc))

    return H


def g_norm(patch: ImmersedPatch, t, v) -> float:
    g = patch.ambient.metric(patch.position(t))
    return float(np.sqrt(np.asarray(v) @ g @ np.asarray(v)))


def umbilic_residual(patch: ImmersedPatch, t) -> float:
    """Max-abs normal-frame component of ``sigma(E_a, E_b) - delta_ab H``."""
    loc = _prepare(patch, t)
    sig = _sigma_coords(loc)
    C = tangent_frame(loc)
    framed = np.einsum("ia,jb,ijk->abk", C, C, sig)
    H = _mean(loc, sig)
    diff = framed - np.eye(loc.G.shape[0])[:, :, None] * H
    N = normal_frame(loc)
    comps = np.einsum("abk,kl,lm->abm", diff, loc.g, N)
    return float(np.max(np.abs(comps)))


def _as_field(patch: ImmersedPatch, xi) -> NormalField:
    if callable(xi):
        return xi
    if isinstance(xi, str):
        return patch.normal_field(xi)
    return patch.vector_field(list(xi))


@dataclass(frozen=True)
class WeingartenSplit:
    """``A[b, a] = g(A_xi E_a, E_b)``; ``D[a]`` is the chart vector ``D_{E_a} xi``."""

    A: np.ndarray
    D: np.ndarray
    nabla: np.ndarray  # nabla~_{E_a} xi rows
    tangent_frame: np.ndarray


def weingarten_split(patch: ImmersedPatch, t, xi) -> WeingartenSplit:
    loc = _prepare(patch, t)
    fld = _as_field(patch, xi)
    v = fld(loc.t)
    scale = max(np.sqrt(v @ loc.g @ v), 1.0)
    tang = loc.tangent_part(v)
    if np.sqrt(abs(tang @ loc.g @ tang)) > NORMAL_TOL * scale:
        raise NotNormalError(f"field is not normal to {patch.name!r} at {loc.t.tolist()}")
    dv = central_diff(fld, loc.t, patch.diff.outer_step, patch.diff.order)
    C = tangent_frame(loc)
    nab = C.T @ loc.ambient_derivative(dv, v)  # rows: nabla~_{E_a} xi
    E = loc.T.T @ C
    A = -np.einsum("ak,kl,lb->ba", nab, loc.g, E)
    D = loc.normal_part(nab)
    return WeingartenSplit(A, D, nab, E)


def parallel_normal_residual(patch: ImmersedPatch, t, xi) -> float:
    """``max_a |D_{E_a} xi|_g`` over the orthonormal tangent frame."""
    split = weingarten_split(patch, t, xi)
    loc_g = patch.ambient.metric(patch.position(t))
    return float(max(np.sqrt(d @ loc_g @ d) for d in split.D))


def _sigma_field(patch: ImmersedPatch):
    def sig(t):
        return _sigma_coords(_local(patch, np.asarray(t, dtype=float)))

    return sig


def codazzi_residual(patch: ImmersedPatch, t, X, Y, Z) -> np.ndarray:
    """``{R(X,Y)Z}^perp - [(nabla_X sigma)(Y,Z) - (nabla_Y sigma)(X,Z)]`` as a chart vector."""
    loc = _prepare(patch, t)
    x, y, z = (_to_coeffs(loc, V, lab) for V, lab in ((X, "X"), (Y, "Y"), (Z, "Z")))
    sig = _sigma_coords(loc)
    dsig = central_diff(_sigma_field(patch), loc.t, patch.diff.outer_step, patch.diff.order)
    # tangential connection coefficients: nabla_{d_i} d_j = gam[i, j, k] d_k
    gam = loc.tangent_coeffs(loc.hess)

    def cov_sigma(a, b, c):
        s = np.einsum("j,k,ijkl->il", b, c, dsig)  # d_i of sigma(b, c)
        s_val = np.einsum("j,k,jkl->l", b, c, sig)
        D = loc.normal_part(a @ loc.ambient_derivative(s, s_val))
        nab_ab = np.einsum("i,j,ijk->k", a, b, gam)
        nab_ac = np.einsum("i,j,ijk->k", a, c, gam)
        return (
            D
            - np.einsum("i,j,ijl->l", nab_ab, c, sig)
            - np.einsum("i,j,ijl->l", b, nab_ac, sig)
        )

    R = riemann_coordinates(patch.ambient, loc.x).components
    Xa, Ya, Za = x @ loc.T, y @ loc.T, z @ loc.T
    RXYZ = np.linalg.solve(loc.g, np.einsum("ijkl,i,j,k->l", R, Xa, Ya, Za))
    lhs = loc.normal_part(RXYZ)
    return lhs - (cov_sigma(x, y, z) - cov_sigma(y, x, z))


def codazzi_max_residual(patch: ImmersedPatch, t) -> float:
    """Max g-norm of the Codazzi residual over orthonormal tangent frame triples."""
    loc = _prepare(patch, t)
    C = tangent_frame(loc)
    n = patch.n
    worst = 0.0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                r = codazzi_residual(patch, t, C[:, a], C[:, b], C[:, c])
                worst = max(worst, float(np.sqrt(abs(r @ loc.g @ r))))
    return worst


def normal_curvature_residual(patch: ImmersedPatch, t) -> float:
    """Max g-norm of ``{R(E_a, E_b) E_c}^perp`` over an orthonormal tangent frame."""
    loc = _prepare(patch, t)
    E = loc.T.T @ tangent_frame(loc)
    R = riemann_coordinates(patch.ambient, loc.x).components
    vals = np.einsum("ijkl,ia,jb,kc->abcl", R, E, E, E)
    vecs = np.linalg.solve(loc.g, vals.reshape(-1, loc.g.shape[0]).T).T
    perp = loc.normal_part(vecs)
    return float(np.max(np.sqrt(np.abs(np.einsum("ia,ab,ib->i", perp, loc.g, perp)))))


def sigma_symmetry_residual(patch: ImmersedPatch, t) -> float:
    sf = second_fundamental_form(patch, t)
    return float(np.max(np.abs(sf.coords - sf.coords.transpose(1, 0, 2))))


def sigma_normality_residual(patch: ImmersedPatch, t) -> float:
    """Max ``|g(sigma(E_a, E_b), E_c)|`` over the orthonormal tangent frame."""
    sf = second_fundamental_form(patch, t)
    g = patch.ambient.metric(patch.position(t))
    return float(np.max(np.abs(np.einsum("abk,kl,lc->abc", sf.frame, g, sf.tangent_frame))))


# --------------------------------------------------------------------------
# patch files
# --------------------------------------------------------------------------


def patch_from_dict(doc: Mapping, params: Mapping[str, float] | None = None,
                    diff: DiffConfig | None = None) -> ImmersedPatch:
    if not isinstance(doc, Mapping):
        raise CatalogError("patch document must be a JSON object")
    try:
        name = doc["name"]
        amb = doc["ambient"]
        n = int(doc["n"])
        f = tuple(str(s) for s in doc["f"])
        dom = doc["domain"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"patch document missing or invalid field: {exc}") from None
    if isinstance(amb, Mapping) and "space" in amb:
        ambient = catalog(amb["space"], amb.get("params"), diff)
    elif isinstance(amb, Mapping):
        ambient = chart_from_dict(amb, None, diff)
    else:
        raise CatalogError("ambient must be {'space': name, 'params': {...}} or an inline chart")
    parameters = tuple(doc.get("parameters", [f"t{i}" for i in range(n)]))
    bound = {k: float(v) for k, v in dict(doc.get("params", {})).items()}
    for k, v in dict(params or {}).items():
        if k not in bound:
            raise CatalogError(f"patch {name!r} has no parameter {k!r}")
        bound[k] = float(v)
    try:
        lower = np.array([expr.evaluate(expr.parse(v), bound) for v in dom["lower"]])
        upper = np.array([expr.evaluate(expr.parse(v), bound) for v in dom["upper"]])
    except (KeyError, TypeError, expr.ExpressionError) as exc:
        raise CatalogError(f"bad patch domain: {exc}") from None
    normals = {k: tuple(str(s) for s in v) for k, v in dict(doc.get("normals", {})).items()}
    points = tuple(tuple(float(c) for c in p) for p in doc.get("points", []))
    return ImmersedPatch(
        name, ambient, n, parameters, f, lower, upper, bound, points, normals,
        dict(doc.get("expected", {})), diff or DiffConfig(),
    )


def load_patch(path: str | Path, params=None, diff: DiffConfig | None = None) -> ImmersedPatch:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return patch_from_dict(doc, params, diff)


def _patch_dir():
    return resources.files("thetaplanes") / "data" / "patches"


def patch_names() -> list[str]:
    return sorted(p.name[:-5] for p in _patch_dir().iterdir() if p.name.endswith(".json"))


def patch_catalog(name: str, params=None, diff: DiffConfig | None = None) -> ImmersedPatch:
    if name not in patch_names():
        raise CatalogError(f"unknown patch {name!r}; known: {', '.join(patch_names())}")
    doc = json.loads((_patch_dir() / f"{name}.json").read_text())
    return patch_from_dict(doc, params, diff)
