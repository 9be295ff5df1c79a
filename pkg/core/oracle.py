"""
Brute-force ground truth: enumerate a lattice over the bounding box of S and
compare ratio vectors pairwise.

y dominates q when y <= q + tol everywhere and y < q - margin somewhere.
y weakly dominates q when y < q - margin everywhere. margin defaults to tol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ConfigError, InfeasiblePoint
from core.globalmin import bounding_box
from core.model import AffineConstraint, ProblemInstance, as_vector, evaluate_ratios, feasibility, ratio_gradient
from utils.parallel import thread_map

logger = logging.getLogger("vqfp.oracle")

CHUNK = 65536


@dataclass(frozen=True, eq=False)
class DominanceReport:
    query: np.ndarray
    dominated: bool
    weakly_dominated: bool
    dominator: np.ndarray | None
    weak_dominator: np.ndarray | None
    grid_step: float
    points_checked: int

    def to_dict(self) -> dict:
        return {
            "query": self.query.tolist(),
            "dominated": self.dominated,
            "weakly_dominated": self.weakly_dominated,
            "dominator": None if self.dominator is None else self.dominator.tolist(),
            "weak_dominator": None if self.weak_dominator is None else self.weak_dominator.tolist(),
            "grid_step": self.grid_step,
            "points_checked": self.points_checked,
        }


@dataclass(frozen=True, eq=False)
class FrontPoint:
    point: np.ndarray
    ratios: np.ndarray

    def to_dict(self) -> dict:
        return {"point": self.point.tolist(), "ratios": self.ratios.tolist()}


# ===== Grid =====

def _axes(p: ProblemInstance, step: float, grid_cap: int, bounds=None) -> list[np.ndarray]:
    if not step > 0:
        raise ConfigError(f"grid step must be > 0, got {step!r}")
    box = bounds if bounds is not None else bounding_box(p)
    if box is None:
        raise ConfigError("no bounding box for S; add a Box constraint or pass bounds")
    lo, hi = (as_vector(b, p.n, "bounds") for b in box)
    counts = np.floor((hi - lo) / step + 1e-9).astype(int) + 1
    total = int(np.prod(counts.astype(float)))
    if total > grid_cap:
        raise ConfigError(f"grid of {total} points exceeds the cap of {grid_cap}")
    return [lo[k] + step * np.arange(counts[k]) for k in range(p.n)]


def row_values(p: ProblemInstance, X: np.ndarray) -> np.ndarray:
    """h_j at every row of X, shape (len(X), l)."""
    if not p.rows:
        return np.zeros((X.shape[0], 0))
    cols = []
    for r in p.rows:
        if isinstance(r, AffineConstraint):
            cols.append(X @ r.a + r.b)
        else:
            cols.append(np.einsum("ij,jk,ik->i", X, r.Q, X) + X @ r.c + r.d)
    return np.column_stack(cols)


def ratio_matrix(p: ProblemInstance, X: np.ndarray) -> np.ndarray:
    """f_i/g_i at every row of X, shape (len(X), m)."""
    f, g = objective_parts(p, X)
    return f / g


def objective_parts(p: ProblemInstance, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    def q(fn):
        return np.einsum("ij,jk,ik->i", X, fn.Q, X) + X @ fn.c + fn.d
    f = np.column_stack([q(o.f) for o in p.objectives])
    g = np.column_stack([q(o.g) for o in p.objectives])
    return f, g


def grid_array(p: ProblemInstance, step: float, feas_tol: float = 1e-9,
               grid_cap: int = 10_000_000, bounds=None) -> np.ndarray:
    """Feasible lattice points in row-major order, one per row."""
    axes = _axes(p, step, grid_cap, bounds)
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([m.reshape(-1) for m in mesh])
    if p.rows:
        X = X[np.all(row_values(p, X) <= feas_tol, axis=1)]
    return X


def grid_points(p: ProblemInstance, step: float, feas_tol: float = 1e-9,
                grid_cap: int = 10_000_000, bounds=None):
    yield from grid_array(p, step, feas_tol, grid_cap, bounds)


# ===== Dominance =====

def dominance_masks(Y: np.ndarray, q: np.ndarray, tol, margin=None) -> tuple[np.ndarray, np.ndarray]:
    """(dominates, weakly dominates) for every row of Y against q.
    `tol` bounds how much worse a coordinate may be; `margin` is how much
    better one must be. Either may be a scalar or broadcast against Y."""
    below = Y <= q + tol
    strict = Y < q - (tol if margin is None else margin)
    return np.all(below, axis=1) & np.any(strict, axis=1), np.all(strict, axis=1)


def _first(mask: np.ndarray, X: np.ndarray) -> np.ndarray | None:
    idx = np.flatnonzero(mask)
    return X[idx[0]].copy() if idx.size else None


def dominance_check(p: ProblemInstance, query, step: float, dom_tol: float = 1e-9,
                    feas_tol: float = 1e-9, grid_cap: int = 10_000_000,
                    threads: int = 1, bounds=None, margin: float | None = None) -> DominanceReport:
    query = as_vector(query, p.n, "query")
    check = feasibility(p, query, feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"query violates constraints {list(check.violated)}", list(check.violated))
    q = evaluate_ratios(p, query)
    X = grid_array(p, step, feas_tol, grid_cap, bounds)
    chunks = [X[s:s + CHUNK] for s in range(0, X.shape[0], CHUNK)]

    def scan(chunk):
        dom, weak = dominance_masks(ratio_matrix(p, chunk), q, dom_tol, margin)
        return _first(dom, chunk), _first(weak, chunk)

    results = thread_map(scan, chunks, threads)
    # row-major lattice order is lexicographic, so the first hit is the smallest
    dominator = next((d for d, _ in results if d is not None), None)
    weak = next((w for _, w in results if w is not None), None)
    logger.debug("dominance of %s on %d grid points: dominated=%s", query.tolist(), X.shape[0],
                 dominator is not None)
    return DominanceReport(query, dominator is not None, weak is not None, dominator, weak,
                           float(step), int(X.shape[0]))


def _nondominated(Y: np.ndarray, dom_tol: float, weak: bool) -> np.ndarray:
    keep = np.ones(Y.shape[0], dtype=bool)
    for i in range(Y.shape[0]):
        dom, wk = dominance_masks(Y, Y[i], dom_tol)
        keep[i] = not np.any(wk if weak else dom)
    return keep


def approximate_pareto_front(p: ProblemInstance, step: float, dom_tol: float = 1e-9,
                             feas_tol: float = 1e-9, grid_cap: int = 10_000_000,
                             weak: bool = False, bounds=None) -> list[FrontPoint]:
    """Grid points no other grid point dominates (or weakly dominates, with `weak`)."""
    X = grid_array(p, step, feas_tol, grid_cap, bounds)
    Y = ratio_matrix(p, X)
    keep = _nondominated(Y, dom_tol, weak)
    logger.info("front: %d of %d grid points kept", int(keep.sum()), X.shape[0])
    return [FrontPoint(X[i].copy(), Y[i].copy()) for i in np.flatnonzero(keep)]


def lipschitz_margin(p: ProblemInstance, step: float, dom_tol: float = 1e-9,
                     feas_tol: float = 1e-9, grid_cap: int = 10_000_000, bounds=None) -> float:
    """dom_tol + L * step * sqrt(n), L the largest ratio-gradient norm sampled on the grid."""
    X = grid_array(p, step, feas_tol, grid_cap, bounds)
    L = max((float(np.max(np.linalg.norm(ratio_gradient(p, x), axis=1))) for x in X), default=0.0)
    return dom_tol + L * step * float(np.sqrt(p.n))
