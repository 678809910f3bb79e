"""Chart-level Riemannian geometry by central finite differences.

A :class:`ChartMetric` holds the metric ``g(u)`` (and optionally ``J(u)``) as
expression trees over chart coordinates. Christoffel symbols come from first
differences of ``g``; the curvature tensor differentiates the Christoffel
symbols once more with the (coarser) ``outer_step``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import expr
from .planes import orthonormal_frame
from .tensor import CurvatureTensor, HermitianPoint, check_compatible

CHART_TOL = 1e-5
KAHLER_TOL = 1e-6


class ChartError(ValueError):
    pass


class DomainError(ChartError):
    pass


class CatalogError(ChartError):
    pass


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference policy.

    ``step`` differentiates closed-form expressions; ``outer_step`` differentiates
    quantities that are themselves finite differences.
    """

    step: float = 1e-4
    outer_step: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError("order must be 2 or 4")
        if self.step <= 0 or self.outer_step <= 0:
            raise ValueError("steps must be positive")

    @property
    def reach(self) -> float:
        # stencil half-width of a nested evaluation
        k = self.order // 2
        return k * (self.step + self.outer_step)


_STENCILS = {
    2: ((1.0, 1 / 2),),
    4: ((1.0, 2 / 3), (2.0, -1 / 12)),
}


def central_diff(fn: Callable[[np.ndarray], np.ndarray], u, h: float, order: int = 2) -> np.ndarray:
    """``out[i, ...] = d fn / d u_i`` by a central stencil of the given order."""
    u = np.asarray(u, dtype=float)
    out = None
    for i in range(u.size):
        acc = 0.0
        for k, w in _STENCILS[order]:
            e = np.zeros_like(u)
            e[i] = k * h
            acc = acc + w * (np.asarray(fn(u + e)) - np.asarray(fn(u - e)))
        d = acc / h
        if out is None:
            out = np.empty((u.size,) + np.shape(d))
        out[i] = d
    return out


def _compile_matrix(rows, names, params, what: str):
    try:
        nodes = [[expr.substitute(expr.parse(s), params) for s in row] for row in rows]
        return [[expr.compile_positional(n, names) for n in row] for row in nodes]
    except expr.ExpressionError as exc:
        raise CatalogError(f"{what}: {exc}") from None


@dataclass(frozen=True)
class ChartMetric:
    """Metric and optional almost complex structure on a coordinate box."""

    name: str
    dim: int
    coordinates: tuple[str, ...]
    g_src: tuple[tuple[str, ...], ...]
    J_src: tuple[tuple[str, ...], ...] | None
    lower: np.ndarray
    upper: np.ndarray
    params: Mapping[str, float] = field(default_factory=dict)
    expected: Mapping = field(default_factory=dict)
    points: tuple[tuple[float, ...], ...] = ()
    diff: DiffConfig = field(default_factory=DiffConfig)

    def __post_init__(self):
        names = list(self.coordinates)
        object.__setattr__(self, "_g", _compile_matrix(self.g_src, names, self.params, "g"))
        J = None if self.J_src is None else _compile_matrix(self.J_src, names, self.params, "J")
        object.__setattr__(self, "_J", J)

    @property
    def has_J(self) -> bool:
        return self.J_src is not None

    def with_diff(self, diff: DiffConfig) -> "ChartMetric":
        return ChartMetric(
            self.name, self.dim, self.coordinates, self.g_src, self.J_src, self.lower,
            self.upper, self.params, self.expected, self.points, diff,
        )

    def _eval(self, mat, u) -> np.ndarray:
        u = [float(v) for v in u]
        return np.array([[f(u) for f in row] for row in mat])

    def metric(self, u) -> np.ndarray:
        return self._eval(self._g, u)

    def structure(self, u) -> np.ndarray:
        if self._J is None:
            raise ChartError(f"chart {self.name!r} carries no almost complex structure")
        return self._eval(self._J, u)

    def check_interior(self, u, margin: float | None = None) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise DomainError(f"point has shape {u.shape}, chart dimension is {self.dim}")
        m = self.diff.reach if margin is None else margin
        if np.any(u - m < self.lower) or np.any(u + m > self.upper):
            raise DomainError(
                f"point {u.tolist()} is not inside the domain of {self.name!r} "
                f"(box {self.lower.tolist()} .. {self.upper.tolist()}, margin {m:g})"
            )
        return u

    def expected_c(self) -> float | None:
        c = self.expected.get("c")
        if c is None:
            return None
        return expr.evaluate(expr.parse(c), dict(self.params))

    def sample_points(self, k: int, seed: int = 0) -> np.ndarray:
        """Seeded points uniform in the middle 80% of the domain box."""
        rng = np.random.default_rng(seed)
        mid = (self.lower + self.upper) / 2
        half = 0.4 * (self.upper - self.lower)
        return mid + half * rng.uniform(-1.0, 1.0, size=(k, self.dim))


def _metric_checked(chart: ChartMetric, u) -> np.ndarray:
    g = chart.metric(u)
    if np.max(np.abs(g - g.T)) > CHART_TOL or np.linalg.eigvalsh((g + g.T) / 2).min() <= 0:
        raise ChartError(f"metric of {chart.name!r} is not positive definite at {list(u)}")
    return g


def _christoffel(chart: ChartMetric, u: np.ndarray) -> np.ndarray:
    cfg = chart.diff
    g = chart.metric(u)
    dg = central_diff(chart.metric, u, cfg.step, cfg.order)  # dg[l, i, j] = d_l g_ij
    # first kind: first[i, j, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0))
    return np.einsum("kl,ijl->kij", np.linalg.inv(g), first)


def christoffel(chart: ChartMetric, u) -> np.ndarray:
    """``Gamma[k, i, j]`` = Levi-Civita symbol ``Gamma^k_ij`` at ``u``."""
    u = chart.check_interior(u)
    _metric_checked(chart, u)
    return _christoffel(chart, u)


def riemann_coordinates(chart: ChartMetric, u) -> CurvatureTensor:
    """``R_ijkl = g(R(d_i, d_j) d_k, d_l)`` in the coordinate frame."""
    u = chart.check_interior(u)
    g = _metric_checked(chart, u)
    cfg = chart.diff
    G = _christoffel(chart, u)
    dG = central_diff(lambda v: _christoffel(chart, v), u, cfg.outer_step, cfg.order)
    # R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    Rup = (
        dG.transpose(1, 0, 2, 3)
        - dG.transpose(1, 2, 0, 3)
        + np.einsum("lim,mjk->lijk", G, G)
        - np.einsum("ljm,mik->lijk", G, G)
    )
    return CurvatureTensor(np.einsum("lp,pijk->ijkl", g, Rup))


def frame_at(chart: ChartMetric, u, seed: int | None = None) -> np.ndarray:
    g = chart.metric(u)
    J = chart.structure(u) if chart.has_J else None
    return orthonormal_frame(g, J, seed=seed)


def riemann_tensor(chart: ChartMetric, u, frame_seed: int | None = None) -> CurvatureTensor:
    """Curvature tensor in a g-orthonormal frame (J-adapted when the chart has ``J``)."""
    R = riemann_coordinates(chart, u)
    return R.in_frame(frame_at(chart, u, frame_seed))


def hermitian_point(chart: ChartMetric, u, frame_seed: int | None = None) -> HermitianPoint:
    """Pointwise data in an orthonormal J-adapted frame: ``g = I``, ``J`` in standard form."""
    u = chart.check_interior(u)
    J = chart.structure(u)
    E = frame_at(chart, u, frame_seed)
    R = riemann_coordinates(chart, u).in_frame(E)
    J_frame = np.linalg.solve(E, J @ E)
    return HermitianPoint(E.T @ chart.metric(u) @ E, J_frame, R)


def coordinate_point(chart: ChartMetric, u) -> HermitianPoint:
    """Pointwise data in the raw coordinate frame (no orthonormalization)."""
    u = chart.check_interior(u)
    return HermitianPoint(chart.metric(u), chart.structure(u), riemann_coordinates(chart, u))


def nabla_J(chart: ChartMetric, u) -> np.ndarray:
    """``out[i, a, b] = (nabla_i J)^a_b`` in coordinates."""
    u = chart.check_interior(u)
    J = chart.structure(u)
    G = christoffel(chart, u)
    dJ = central_diff(chart.structure, u, chart.diff.step, chart.diff.order)
    return dJ + np.einsum("aic,cb->iab", G, J) - np.einsum("cib,ac->iab", G, J)


def nabla_J_residual(chart: ChartMetric, u) -> float:
    """Max-abs component of ``nabla J`` in the orthonormal frame at ``u``."""
    NJ = nabla_J(chart, u)
    E = frame_at(chart, u)
    Einv = np.linalg.inv(E)
    framed = np.einsum("ip,ab,ibc,cd->pad", E, Einv, NJ, E)
    return float(np.max(np.abs(framed)))


# --------------------------------------------------------------------------
# catalog files
# --------------------------------------------------------------------------

_CONSTRAINTS = {
    "gt": (lambda v, b: v > b, ">"),
    "ge": (lambda v, b: v >= b, ">="),
    "lt": (lambda v, b: v < b, "<"),
    "le": (lambda v, b: v <= b, "<="),
}


def _require(doc, key, kind):
    if key not in doc:
        raise CatalogError(f"missing field {key!r}")
    if not isinstance(doc[key], kind):
        raise CatalogError(f"field {key!r} must be {kind.__name__ if isinstance(kind, type) else kind}")
    return doc[key]


def _matrix(doc, key, dim):
    rows = _require(doc, key, list)
    if len(rows) != dim or any(not isinstance(r, list) or len(r) != dim for r in rows):
        raise CatalogError(f"{key!r} must be a {dim}x{dim} array of expressions")
    return tuple(tuple(str(v) if not isinstance(v, str) else v for v in r) for r in rows)


def chart_from_dict(doc: Mapping, params: Mapping[str, float] | None = None,
                    diff: DiffConfig | None = None) -> ChartMetric:
    if not isinstance(doc, Mapping):
        raise CatalogError("catalog document must be a JSON object")
    name = _require(doc, "name", str)
    dim = _require(doc, "dim", int)
    if dim < 1:
        raise CatalogError("dim must be positive")
    coords = tuple(doc.get("coordinates", [f"u{i}" for i in range(dim)]))
    if len(coords) != dim:
        raise CatalogError("coordinates must list one name per dimension")
    bound = {k: float(v) for k, v in dict(doc.get("params", {})).items()}
    for k, v in dict(params or {}).items():
        if k not in bound:
            raise CatalogError(f"space {name!r} has no parameter {k!r}")
        bound[k] = float(v)
    for pname, rules in dict(doc.get("param_constraints", {})).items():
        for op, limit in rules.items():
            test, sym = _CONSTRAINTS[op]
            if not test(bound[pname], float(limit)):
                raise CatalogError(f"invalid parameter for {name!r}: need {pname} {sym} {limit}")
    g = _matrix(doc, "g", dim)
    J = _matrix(doc, "J", dim) if doc.get("J") is not None else None
    domain = _require(doc, "domain", dict)
    try:
        lower = np.array([expr.evaluate(expr.parse(v), bound) for v in domain["lower"]])
        upper = np.array([expr.evaluate(expr.parse(v), bound) for v in domain["upper"]])
    except (KeyError, TypeError, expr.ExpressionError) as exc:
        raise CatalogError(f"bad domain box: {exc}") from None
    if lower.shape != (dim,) or upper.shape != (dim,) or np.any(lower >= upper):
        raise CatalogError("domain box must give lower < upper for every coordinate")
    points = tuple(tuple(float(c) for c in p) for p in doc.get("points", []))
    return ChartMetric(
        name, dim, coords, g, J, lower, upper, bound, dict(doc.get("expected", {})),
        points, diff or DiffConfig(),
    )


def load_chart(path: str | Path, params: Mapping[str, float] | None = None,
               diff: DiffConfig | None = None) -> ChartMetric:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return chart_from_dict(doc, params, diff)


def _data_dir(kind: str):
    return resources.files("thetaplanes") / "data" / kind


def catalog_names() -> list[str]:
    return sorted(p.name[:-5] for p in _data_dir("spaces").iterdir() if p.name.endswith(".json"))


def catalog(name: str, params: Mapping[str, float] | None = None,
            diff: DiffConfig | None = None) -> ChartMetric:
    """Load a built-in space by name, e.g. ``catalog("sphere", {"c": 1})``."""
    if name not in catalog_names():
        raise CatalogError(f"unknown space {name!r}; known: {', '.join(catalog_names())}")
    doc = json.loads((_data_dir("spaces") / f"{name}.json").read_text())
    return chart_from_dict(doc, params, diff)
