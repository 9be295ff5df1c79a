"""
Global minimization of a possibly indefinite quadratic q(x) = x^T M x + c^T x + d
over the feasible set S of an instance.

Strategy:
  - convex q: local descent (SLSQP under the instance constraints) is global
    once its KKT residual, or the first-order bound it yields, checks out.
  - n <= grid_dims_max and S boxed: branch and bound. A sub-box with center
    c0 and half-widths h gets the lower bound
        q(c0) - |grad q(c0)|.h - h^T |M_neg| h
    where M_neg is the negative spectral part of M; boxes are split along the
    axis contributing most to that slack until the gap is below z_tol.
  - otherwise multistart local descent (random starts plus +-v_min) gives a
    witness and the box gives a crude lower bound.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, nnls

from core.errors import InfeasiblePoint
from core.model import AffineConstraint, ProblemInstance, QuadraticConstraint, as_vector
from core.simplex import LpOptimal, solve_linear_program
from core.spectral import effective_tol, eig_sym

logger = logging.getLogger("vqfp.globalmin")


@dataclass(frozen=True)
class GlobalMin:
    value: float
    argmin: np.ndarray
    status = "global"


@dataclass(frozen=True)
class LocalOnly:
    value: float
    argmin: np.ndarray
    bound: float
    status = "local"


@dataclass(frozen=True)
class LowerBoundOnly:
    bound: float
    witness: np.ndarray | None = None
    witness_value: float | None = None
    status = "bound"


@dataclass(frozen=True)
class Unbounded:
    status = "unbounded"


MinResult = GlobalMin | LocalOnly | LowerBoundOnly | Unbounded


def quad_value(M: np.ndarray, c: np.ndarray, d: float, x: np.ndarray) -> float:
    return float(x @ M @ x + c @ x + d)


# ===== Bounding box of S =====

def _lp_bounds(n: int, rows: list[AffineConstraint]) -> tuple[np.ndarray, np.ndarray]:
    A = np.vstack([r.a for r in rows])
    b = -np.array([r.b for r in rows])
    A_split = np.hstack([A, -A])         # x = xp - xm
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    for k in range(n):
        e = np.zeros(2 * n)
        e[k], e[n + k] = 1.0, -1.0
        up = solve_linear_program(e, A_ineq=A_split, b_ineq=b)
        if isinstance(up, LpOptimal):
            hi[k] = up.objective
        down = solve_linear_program(-e, A_ineq=A_split, b_ineq=b)
        if isinstance(down, LpOptimal):
            lo[k] = -down.objective
    return lo, hi


def _ellipsoid_bounds(con: QuadraticConstraint) -> tuple[np.ndarray, np.ndarray] | None:
    lam = eig_sym(con.Q).eigenvalues
    if lam[0] <= 1e-12 * max(1.0, abs(lam[-1])):
        return None
    Qinv = np.linalg.inv(con.Q)
    center = -0.5 * Qinv @ con.c
    r = max(float(center @ con.Q @ center) - con.d, 0.0)
    half = np.sqrt(r * np.diag(Qinv))
    return center - half, center + half


def bounding_box(p: ProblemInstance) -> tuple[np.ndarray, np.ndarray] | None:
    """Box containing S: Box rows, LP bounds over affine rows, ellipsoids of
    positive definite quadratic rows, intersected. None when S may be unbounded."""
    lo = np.full(p.n, -np.inf)
    hi = np.full(p.n, np.inf)
    box = p.explicit_box()
    if box is not None:
        lo, hi = np.maximum(lo, box[0]), np.minimum(hi, box[1])
    affine = [r for r in p.rows if isinstance(r, AffineConstraint)]
    if affine and not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        l2, h2 = _lp_bounds(p.n, affine)
        lo, hi = np.maximum(lo, l2), np.minimum(hi, h2)
    for r in p.rows:
        if isinstance(r, QuadraticConstraint):
            eb = _ellipsoid_bounds(r)
            if eb is not None:
                lo, hi = np.maximum(lo, eb[0]), np.minimum(hi, eb[1])
    if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
        return lo, hi
    return None


def max_sq_distance(lo: np.ndarray, hi: np.ndarray, x0: np.ndarray) -> float:
    return float(np.sum(np.maximum((hi - x0) ** 2, (x0 - lo) ** 2)))


def spectral_bound(lam_min: float, lo, hi, x0) -> float:
    """Lower bound of (x-x0)^T M (x-x0) over the box from lambda_min(M)."""
    return min(0.0, lam_min) * max_sq_distance(lo, hi, x0)


# ===== Feasibility helpers =====

def is_feasible(p: ProblemInstance, x: np.ndarray, tol: float) -> bool:
    return all(r.value(x) <= tol for r in p.rows)


def _box_excluded(p: ProblemInstance, center: np.ndarray, half: np.ndarray, tol: float) -> bool:
    # h_j convex: the tangent plane at the center underestimates it on the box
    for r in p.rows:
        if r.value(center) - float(np.abs(r.gradient(center)) @ half) > tol:
            return True
    return False


def find_feasible(p: ProblemInstance, feas_tol: float, start=None) -> np.ndarray:
    """A point of S near `start` (default: box center or the origin)."""
    box = bounding_box(p)
    if start is None:
        start = (box[0] + box[1]) / 2.0 if box is not None else np.zeros(p.n)
    start = as_vector(start, p.n, "start")
    if is_feasible(p, start, feas_tol):
        return start
    x = _local(np.eye(p.n), -2.0 * start, float(start @ start), p, start, box)
    if not is_feasible(p, x, feas_tol):
        raise InfeasiblePoint("no feasible point found; S may be empty")
    return x


# ===== Local descent =====

def _local(M, c, d, p: ProblemInstance, start: np.ndarray, box) -> np.ndarray:
    cons = [{"type": "ineq", "fun": (lambda x, r=r: -r.value(x)), "jac": (lambda x, r=r: -r.gradient(x))}
            for r in p.rows]
    bounds = list(zip(*box)) if box is not None else None
    res = minimize(lambda x: quad_value(M, c, d, x), start,
                   jac=lambda x: 2.0 * M @ x + c, method="SLSQP",
                   bounds=bounds, constraints=cons, options={"maxiter": 500, "ftol": 1e-14})
    return np.asarray(res.x, dtype=float)


def multistart(M, c, d, p: ProblemInstance, x0: np.ndarray, starts: int, rng: np.random.Generator,
               feas_tol: float, box=None) -> tuple[np.ndarray | None, float]:
    """Best feasible local minimizer found; (None, inf) if every descent failed."""
    vmin = eig_sym(M).eigenvectors[:, 0]
    if box is not None:
        lo, hi = box
        reach = float(np.max(hi - lo))
    else:
        reach = 1.0
    seeds = [x0, x0 + reach * vmin, x0 - reach * vmin]
    while len(seeds) < starts:
        if box is not None:
            seeds.append(lo + rng.random(p.n) * (hi - lo))
        else:
            seeds.append(x0 + rng.standard_normal(p.n))
    best, best_val = None, np.inf
    for s in seeds:
        if box is not None:
            s = np.clip(s, *box)
        try:
            x = _local(M, c, d, p, s, box)
        except (ValueError, np.linalg.LinAlgError) as e:
            logger.debug("local descent failed from %s: %s", s.tolist(), e)
            continue
        if is_feasible(p, x, feas_tol):
            v = quad_value(M, c, d, x)
            if v < best_val:
                best, best_val = x, v
    return best, best_val


def polish(M, c, d, p: ProblemInstance, x: np.ndarray, feas_tol: float, active_tol: float = 1e-6) -> np.ndarray:
    """Exact minimizer of a convex q on the affine face active at x, when
    that point stays feasible and does no worse; x otherwise."""
    active = [r for r in p.rows if abs(r.value(x)) <= active_tol]
    if any(not isinstance(r, AffineConstraint) for r in active):
        return x
    k = len(active)
    K = np.zeros((p.n + k, p.n + k))
    K[:p.n, :p.n] = 2.0 * M
    rhs = np.concatenate([-c, np.zeros(k)])
    for j, r in enumerate(active):
        K[:p.n, p.n + j] = r.a
        K[p.n + j, :p.n] = r.a
        rhs[p.n + j] = -r.b
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    y = sol[:p.n]
    if is_feasible(p, y, feas_tol) and quad_value(M, c, d, y) <= quad_value(M, c, d, x):
        return y
    return x


def convex_verdict(M, c, d, p: ProblemInstance, x: np.ndarray, cfg, box=None,
                   active_tol: float = 1e-6) -> GlobalMin | LocalOnly:
    """Accept a convex descent result only if it is a KKT point.

    Multipliers for the active rows come from nonnegative least squares on
    grad q + J^T lambda = 0. When the residual r exceeds kkt_tol, convexity of
    q and of every row still gives
        q(y) >= q(x) + lambda.h_active(x) - |r|.reach(x)
    on the box, and x is kept as GlobalMin only if that bound is within z_tol.
    """
    grad = 2.0 * M @ x + c
    active = [r for r in p.rows if r.value(x) >= -active_tol]
    lam, resid = np.zeros(0), grad
    if active:
        J = np.array([r.gradient(x) for r in active])
        lam, _ = nnls(J.T, -grad)
        resid = grad + J.T @ lam
    v = quad_value(M, c, d, x)
    scale = 1.0 + float(np.max(np.abs(2.0 * M @ x))) + float(np.max(np.abs(c)))
    if np.max(np.abs(resid)) <= cfg.kkt_tol * scale:
        return GlobalMin(v, x)
    if box is None:
        bound = -np.inf
    else:
        lo, hi = box
        reach = np.maximum(hi - x, x - lo)
        bound = v + float(lam @ np.array([r.value(x) for r in active])) - float(np.abs(resid) @ reach)
    if v - bound <= cfg.z_tol:
        return GlobalMin(v, x)
    logger.info("convex descent stopped off stationarity at %s (residual %.3e)", x.tolist(), float(np.max(np.abs(resid))))
    return LocalOnly(v, x, bound)


# ===== Branch and bound =====)

def branch_and_bound(M, c, d, p: ProblemInstance, lo, hi, z_tol: float, node_budget: int,
                     feas_tol: float, incumbent: tuple[np.ndarray, float]) -> tuple[np.ndarray, float, float, bool]:
    """Returns (argmin, value, lower_bound, exhausted)."""
    eig = eig_sym(M)
    neg = np.maximum(-eig.eigenvalues, 0.0)
    M_neg = np.abs(eig.eigenvectors @ np.diag(neg) @ eig.eigenvectors.T)
    best_x, best_v = incumbent

    def slack(center, half):
        g = np.abs(2.0 * M @ center + c)
        return g * half + (M_neg @ half) * half

    def lower(center, half):
        return quad_value(M, c, d, center) - float(np.sum(slack(center, half)))

    def offer(x):
        nonlocal best_x, best_v
        if is_feasible(p, x, feas_tol):
            v = quad_value(M, c, d, x)
            if v < best_v:
                best_x, best_v = x.copy(), v

    center, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    heap = [(lower(center, half), 0, center, half)]
    counter, nodes = 1, 0
    while heap:
        lb, _, center, half = heapq.heappop(heap)
        if best_v - lb <= z_tol:
            return best_x, best_v, lb, True
        nodes += 1
        if nodes > node_budget:
            logger.info("branch and bound hit the node budget (%d); gap %.3e", node_budget, best_v - lb)
            return best_x, best_v, lb, False
        if _box_excluded(p, center, half, feas_tol):
            continue
        offer(center)
        score = slack(center, half)
        k = int(np.argmax(score)) if np.max(score) > 0 else int(np.argmax(half))
        if half[k] <= 0.0:
            continue
        for sign in (-1.0, 1.0):
            h2 = half.copy()
            h2[k] /= 2.0
            c2 = center.copy()
            c2[k] += sign * h2[k]
            offer(c2 + sign * h2)
            heapq.heappush(heap, (lower(c2, h2), counter, c2, h2))
            counter += 1
    return best_x, best_v, best_v, True


def global_minimize(M, c, d, p: ProblemInstance, x0, cfg, rng: np.random.Generator | None = None) -> MinResult:
    """Minimize x^T M x + c^T x + d over S, starting from a feasible x0."""
    M = np.asarray(M, dtype=float)
    c = as_vector(c, p.n, "c")
    x0 = as_vector(x0, p.n, "x0")
    rng = rng or np.random.default_rng(cfg.seed)
    eig = eig_sym(M, cfg.jacobi_sweeps)
    lam_min = float(eig.eigenvalues[0])
    convex = lam_min >= -effective_tol(eig.eigenvalues, cfg.psd_tol)
    box = bounding_box(p)
    v0 = quad_value(M, c, d, x0)

    if box is None:
        if not convex:
            logger.info("S unbounded and quadratic not convex: minimum may be -inf")
            return LowerBoundOnly(-np.inf, x0, v0)
        if not p.rows:
            w, *_ = np.linalg.lstsq(2.0 * M, -c, rcond=None)
            if np.max(np.abs(2.0 * M @ w + c)) > 1e-9 * (1.0 + np.max(np.abs(c))):
                return Unbounded()
            return GlobalMin(quad_value(M, c, d, w), w)
        x, v = multistart(M, c, d, p, x0, 3, rng, cfg.feas_tol)
        if x is None or not np.isfinite(v) or np.linalg.norm(x - x0) > 1e8:
            return Unbounded()
        return convex_verdict(M, c, d, p, polish(M, c, d, p, x if v < v0 else x0, cfg.feas_tol), cfg)

    if convex:
        x, v = multistart(M, c, d, p, x0, 3, rng, cfg.feas_tol, box)
        if x is None or v0 <= v:
            x, v = x0, v0
        return convex_verdict(M, c, d, p, polish(M, c, d, p, x, cfg.feas_tol), cfg, box)

    x_ms, v_ms = multistart(M, c, d, p, x0, cfg.multistart, rng, cfg.feas_tol, box)
    if x_ms is None or v0 < v_ms:
        x_ms, v_ms = x0, v0

    lo, hi = box
    if p.n <= cfg.grid_dims_max:
        x, v, lb, exhausted = branch_and_bound(M, c, d, p, lo, hi, cfg.z_tol, cfg.bb_node_budget,
                                                cfg.feas_tol, (x_ms, v_ms))
        return GlobalMin(v, x) if exhausted else LocalOnly(v, x, lb)

    g0 = np.abs(2.0 * M @ x0 + c)
    reach = np.maximum(hi - x0, x0 - lo)
    bound = v0 - float(g0 @ reach) + spectral_bound(lam_min, lo, hi, x0)
    return LowerBoundOnly(bound, x_ms, v_ms)
