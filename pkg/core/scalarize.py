"""
The weighted scalar problem anchored at x*:

    minimize  sum_i w_i (f_i(x) - alpha_i g_i(x)),   alpha_i = f_i(x*)/g_i(x*)

its convexity test, a Dinkelbach-style fixed-point search over anchors, the
weight-lattice sweep built on it, and the membership consistency check
between the fractional problem and the anchored one.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import DomainError, InfeasiblePoint
from core.certify import Status, certify_point
from core.globalmin import GlobalMin, LocalOnly, LowerBoundOnly, Unbounded, global_minimize
from core.kkt import Found, find_multipliers, sample_multipliers
from core.model import ProblemInstance, as_vector, evaluate_ratios, feasibility
from core.oracle import dominance_masks, grid_array, objective_parts
from core.spectral import build_F, eig_sym, psd_status
from utils.parallel import thread_map

logger = logging.getLogger("vqfp.scalarize")


@dataclass(frozen=True, eq=False)
class ScalarizedProblem:
    anchor: np.ndarray
    weights: np.ndarray
    alphas: np.ndarray
    Q_eff: np.ndarray
    c_eff: np.ndarray
    d_eff: float
    convex: bool

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q_eff @ x + self.c_eff @ x + self.d_eff)

    def gradient(self, x) -> np.ndarray:
        return 2.0 * self.Q_eff @ np.asarray(x, dtype=float) + self.c_eff


def build_scalarized(p: ProblemInstance, xstar, w, psd_tol: float = 1e-9) -> ScalarizedProblem:
    xstar = as_vector(xstar, p.n, "xstar")
    w = as_vector(w, p.m, "weights")
    if np.any(w <= 0):
        raise DomainError("weights must be strictly positive")
    alphas = evaluate_ratios(p, xstar)
    Q = sum(w[i] * (o.f.Q - alphas[i] * o.g.Q) for i, o in enumerate(p.objectives))
    c = sum(w[i] * (o.f.c - alphas[i] * o.g.c) for i, o in enumerate(p.objectives))
    d = float(sum(w[i] * (o.f.d - alphas[i] * o.g.d) for i, o in enumerate(p.objectives)))
    # Q_eff is F(w, x*) exactly, so the flag shares psd_status's tolerance
    convex = psd_status(Q, psd_tol).is_psd
    return ScalarizedProblem(xstar, w, alphas, Q, c, d, convex)


def minimize_scalarized(sp: ScalarizedProblem, p: ProblemInstance, cfg) -> GlobalMin | LocalOnly | Unbounded:
    if not sp.convex and not p.rows:
        return Unbounded()
    res = global_minimize(sp.Q_eff, sp.c_eff, sp.d_eff, p, sp.anchor, cfg)
    if isinstance(res, LowerBoundOnly):
        if res.witness is None:
            return Unbounded()
        return LocalOnly(res.witness_value, res.witness, res.bound)
    return res


# ===== Dinkelbach iteration =====

@dataclass(frozen=True, eq=False)
class Converged:
    x: np.ndarray
    iterations: int
    history: tuple[tuple[float, ...], ...]
    kkt: bool = False
    converged = True


@dataclass(frozen=True, eq=False)
class Stalled:
    x: np.ndarray
    reason: str
    iterations: int = 0
    history: tuple[tuple[float, ...], ...] = ()
    converged = False


def dinkelbach_search(p: ProblemInstance, w, x0, cfg) -> Converged | Stalled:
    """x_{k+1} = argmin of the problem anchored at x_k, until the anchors settle."""
    w = as_vector(w, p.m, "weights")
    x = as_vector(x0, p.n, "x0")
    check = feasibility(p, x, cfg.feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x0 violates constraints {list(check.violated)}", list(check.violated))

    alphas = evaluate_ratios(p, x)
    history = [tuple(alphas.tolist())]
    for k in range(1, cfg.max_iter + 1):
        sp = build_scalarized(p, x, w, cfg.psd_tol)
        res = minimize_scalarized(sp, p, cfg)
        if isinstance(res, Unbounded):
            return Stalled(x, "unbounded-subproblem", k, tuple(history))
        if isinstance(res, LocalOnly):
            return Stalled(x, "nonconvex-subproblem-local-only", k, tuple(history))
        # the anchor is feasible with value 0; keep it unless the solver beat it
        x_next = res.argmin if res.value < 0.0 else x
        new = evaluate_ratios(p, x_next)
        history.append(tuple(new.tolist()))
        logger.debug("dinkelbach iter %d: x=%s alphas=%s", k, x_next.tolist(), new.tolist())
        done = np.all(np.abs(new - alphas) <= cfg.alpha_tol * (1.0 + np.abs(alphas)))
        x, alphas = x_next, new
        if done:
            step1 = find_multipliers(p, x, max(cfg.kkt_tol, 1e-6), cfg.strict_tol, cfg.feas_tol)
            return Converged(x, k, tuple(history), isinstance(step1, Found))
    return Stalled(x, "max-iter", cfg.max_iter, tuple(history))


# ===== Weight lattice sweep =====

def simplex_lattice(m: int, divisions: int) -> list[np.ndarray]:
    """Strictly positive weights j / divisions summing to one."""
    if m == 1:
        return [np.ones(1)]
    out = []
    for cuts in itertools.combinations(range(1, divisions), m - 1):
        bounds = (0,) + cuts + (divisions,)
        out.append(np.diff(bounds) / divisions)
    return out


@dataclass(frozen=True, eq=False)
class SweepEntry:
    weights: np.ndarray
    result: Converged | Stalled
    ratios: np.ndarray
    certified: bool | None = None

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "point": self.result.x.tolist(),
            "ratios": self.ratios.tolist(),
            "converged": self.result.converged,
            "certified": self.certified,
        }


def run_weights(p: ProblemInstance, w, x0, cfg, certify: bool = True) -> SweepEntry:
    w = as_vector(w, p.m, "weights")
    res = dinkelbach_search(p, w, x0, cfg)
    certified = None
    if certify and res.converged:
        certified = certify_point(p, res.x, cfg).status is Status.CERTIFIED
    return SweepEntry(w, res, evaluate_ratios(p, res.x), certified)


def sweep(p: ProblemInstance, x0, cfg, divisions: int | None = None, certify: bool = True) -> list[SweepEntry]:
    """Dinkelbach from x0 for every lattice weight, merged in lattice order."""
    lattice = simplex_lattice(p.m, divisions or cfg.sweep_divisions)
    logger.info("sweeping %d weight vectors", len(lattice))
    return thread_map(lambda w: run_weights(p, w, x0, cfg, certify), lattice, cfg.threads)


# ===== PSD-making weights =====

def seek_psd_weights(p: ProblemInstance, xstar, cfg, samples: int = 32,
                     rng: np.random.Generator | None = None) -> np.ndarray | None:
    """w = tau / g(x*) from valid multipliers, such that F(w, x*) is PSD.

    Tries the max-min multiplier, LP vertices picked by random objectives,
    then random convex combinations of those vertices. Returns None when
    none of the candidates works; that says nothing about other tau.
    """
    xstar = as_vector(xstar, p.n, "xstar")
    rng = rng or np.random.default_rng(cfg.seed)
    g = p.g_values(xstar)
    candidates: list[np.ndarray] = []
    first = find_multipliers(p, xstar, cfg.kkt_tol, cfg.strict_tol, cfg.feas_tol)
    if not isinstance(first, Found):
        return None
    candidates.append(first.pair.tau)
    vertices = sample_multipliers(p, xstar, rng, samples, cfg.strict_tol, cfg.feas_tol)
    candidates.extend(vertices)
    if len(vertices) > 1:
        for _ in range(samples):
            mix = rng.dirichlet(np.ones(len(vertices)))
            candidates.append(mix @ np.vstack(vertices))

    for tau in candidates:
        w = tau / g
        F = build_F(p, w, xstar)
        if psd_status(F, cfg.psd_tol, eig_sym(F, cfg.jacobi_sweeps)).is_psd:
            logger.info("PSD-making weights at x*=%s: %s", xstar.tolist(), w.tolist())
            return w
    return None


# ===== Membership consistency =====

@dataclass(frozen=True)
class Consistent:
    dominated: bool
    consistent = True


@dataclass(frozen=True, eq=False)
class Violation:
    witness: np.ndarray
    dominated_in_fractional: bool
    consistent = False


def check_anchored_membership(p: ProblemInstance, xstar, cfg, step: float) -> Consistent | Violation:
    """x* is grid-dominated for the ratios iff it is grid-dominated for
    f_i - alpha_i g_i, both compared with the same absolute dom_tol.

    f_i - alpha_i g_i = g_i (r_i - alpha_i) with g_i > 0, so the two sets only
    part ways on near-ties where g_i stretches a gap across dom_tol."""
    xstar = as_vector(xstar, p.n, "xstar")
    check = feasibility(p, xstar, cfg.feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x* violates constraints {list(check.violated)}", list(check.violated))
    alphas = evaluate_ratios(p, xstar)
    X = grid_array(p, step, cfg.feas_tol, cfg.grid_cap)
    f, g = objective_parts(p, X)
    frac_dom, _ = dominance_masks(f / g, alphas, cfg.dom_tol)
    anch_dom, _ = dominance_masks(f - alphas * g, np.zeros(p.m), cfg.dom_tol)
    disagree = np.flatnonzero(frac_dom != anch_dom)
    if disagree.size:
        j = disagree[0]
        return Violation(X[j].copy(), bool(frac_dom[j]))
    return Consistent(bool(np.any(frac_dom)))
