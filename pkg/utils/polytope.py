"""
Small linear programs over point sets in a Cartan subalgebra.

cone_decompose solves  min sum(gamma)  s.t.  points^T gamma = x, gamma >= 0
by enumerating every square basic subset of the points, which is exact and
deterministic at the sizes used here (at most C(24, 3) = 2024 systems).
cone_decompose_simplex solves the same program with the HiGHS simplex and
exists as an independent check. hull_residual measures convex-hull
membership through the same cone program.
"""

import itertools
import logging
from typing import Tuple

import numpy as np
from scipy.optimize import linprog

import config
from utils.errors import Infeasible

logger = logging.getLogger(__name__)


def cone_decompose(points: np.ndarray, x: np.ndarray, tol: float = None) -> np.ndarray:
    """Minimal-sum non-negative combination of points reproducing x"""
    points = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    tol = config.get_tolerance("lp") if tol is None else tol
    m, r = points.shape
    scale = max(1.0, float(np.max(np.abs(points))), float(np.max(np.abs(x))))
    if float(np.max(np.abs(x))) <= tol * scale:
        return np.zeros(m)

    combos = np.array(list(itertools.combinations(range(m), r)), dtype=int)
    systems = points[combos].transpose(0, 2, 1)
    dets = np.linalg.det(systems)
    regular = np.abs(dets) > 1e-12 * scale ** r
    combos, systems = combos[regular], systems[regular]
    if len(combos) == 0:
        raise Infeasible("Orbit points do not span the Cartan subalgebra")
    rhs = np.broadcast_to(x, (len(combos), r))[..., None]
    solutions = np.linalg.solve(systems, rhs)[..., 0]
    feasible = np.all(solutions >= -tol * scale, axis=1)
    logger.debug(f"cone_decompose: {len(combos)} basic subsets, {int(feasible.sum())} feasible")
    if not np.any(feasible):
        raise Infeasible(f"Target {x.tolist()} lies outside the cone of the orbit")

    combos, solutions = combos[feasible], np.clip(solutions[feasible], 0.0, None)
    sums = solutions.sum(axis=1)
    best = float(sums.min())
    candidates = []
    for idx in np.flatnonzero(sums <= best + tol * scale):
        gamma = np.zeros(m)
        gamma[combos[idx]] = solutions[idx]
        candidates.append(gamma)
    gamma = max(candidates, key=lambda g: tuple(np.round(g, 12)))

    residual = float(np.linalg.norm(points.T @ gamma - x))
    if residual > 1e-9 * scale:
        raise Infeasible(f"Cone decomposition residual {residual:.3e} too large")
    return gamma


def cone_decompose_simplex(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Same program through scipy's HiGHS simplex"""
    points = np.asarray(points, dtype=float)
    m = points.shape[0]
    result = linprog(
        c=np.ones(m),
        A_eq=points.T,
        b_eq=np.asarray(x, dtype=float),
        bounds=[(0, None)] * m,
        method="highs-ds",
    )
    if not result.success:
        raise Infeasible(f"Simplex failed: {result.message}")
    return np.asarray(result.x)


def hull_residual(points: np.ndarray, y: np.ndarray) -> float:
    """
    Upper bound on the distance of y from conv(points), zero inside the hull.

    The hull must contain the origin, as every Weyl orbit's does. Then y lies
    in the hull exactly when the cone_decompose sum is at most 1, and y / sum
    is a hull point at distance |y| (1 - 1 / sum).
    """
    points = np.asarray(points, dtype=float)
    y = np.asarray(y, dtype=float)
    norm = float(np.linalg.norm(y))
    if np.max(np.abs(points)) <= config.get_tolerance("lp"):
        return norm
    scale = float(cone_decompose(points, y).sum())
    return norm * max(0.0, 1.0 - 1.0 / scale) if scale > 0.0 else 0.0
