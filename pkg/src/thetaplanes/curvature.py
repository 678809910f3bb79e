"""Sectional and holomorphic sectional curvature, plus pointwise constancy scans."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .planes import TwoPlane, admissible_pairs, orthonormalize, random_unit_vectors
from .tensor import HermitianPoint, evaluate

UNIT_TOL = 1e-10


def sectional_curvature(p: HermitianPoint, plane: TwoPlane) -> float:
    on = orthonormalize(plane)
    return evaluate(p.R, on.b1, on.b2, on.b2, on.b1)


def holomorphic_curvature(p: HermitianPoint, x) -> float:
    """``H(x) = R(x, Jx, Jx, x)`` for a unit vector ``x``."""
    x = np.asarray(x, dtype=float)
    if abs(p.norm(x) - 1.0) > UNIT_TOL:
        raise ValueError(f"holomorphic curvature needs a unit vector, |x| = {p.norm(x)!r}")
    return sectional_curvature(p, TwoPlane(x, p.apply_J(x), p))


class ScanResult(NamedTuple):
    mean: float
    max_deviation: float


def constancy_scan(
    p: HermitianPoint, kind: str = "holomorphic", samples: int = 1000, seed: int = 0
) -> ScanResult:
    """Sample ``H`` (holomorphic) or antiholomorphic ``K(x, y)`` and report its spread.

    The antiholomorphic kind draws unit pairs with ``x`` orthogonal to ``y`` and ``Jy``.
    """
    if samples < 2:
        raise ValueError("constancy_scan needs at least 2 samples")
    rng = np.random.default_rng(seed)
    T = p.R.components
    if kind == "holomorphic":
        xs = random_unit_vectors(p, rng, samples)
        Jxs = xs @ p.J.T
        values = np.einsum("abcd,ia,ib,ic,id->i", T, xs, Jxs, Jxs, xs, optimize=True)
    elif kind == "antiholomorphic":
        xs, ys = admissible_pairs(p, rng, samples)
        values = np.einsum("abcd,ia,ib,ic,id->i", T, xs, ys, ys, xs, optimize=True)
    else:
        raise ValueError(f"unknown scan kind {kind!r}")
    mean = float(np.mean(values))
    return ScanResult(mean, float(np.max(np.abs(values - mean))))
