"""
Step 1 of the Pareto optimality test: multipliers tau > 0, lambda >= 0 with

    sum_i tau_i grad(f_i/g_i)(x*) + sum_j lambda_j grad h_j(x*) = 0
    sum_j lambda_j h_j(x*) = 0

Strict positivity is decided by a max-min LP: maximize the floor t of all
tau_i under sum(tau) + sum(lambda) = normalization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import DomainError, InfeasiblePoint, NumericalError
from core.model import ProblemInstance, as_vector, feasibility, ratio_gradient
from core.simplex import LpOptimal, solve_linear_program

logger = logging.getLogger("vqfp.kkt")


@dataclass(frozen=True, eq=False)
class MultiplierPair:
    tau: np.ndarray
    lam: np.ndarray
    stationarity_residual: float
    complementarity_residual: float
    floor: float = float("nan")

    @classmethod
    def at(cls, p: ProblemInstance, xstar, tau, lam, floor: float = float("nan")) -> "MultiplierPair":
        xstar = as_vector(xstar, p.n, "xstar")
        tau = as_vector(tau, p.m, "tau")
        lam = as_vector(lam, p.ell, "lambda")
        grad = tau @ ratio_gradient(p, xstar)
        if p.ell:
            grad = grad + lam @ p.h_jacobian(xstar)
        comp = abs(float(lam @ p.h(xstar))) if p.ell else 0.0
        return cls(tau, lam, float(np.max(np.abs(grad))), comp, floor)

    def to_dict(self) -> dict:
        return {"tau": self.tau.tolist(), "lambda": self.lam.tolist(),
                "stationarity_residual": self.stationarity_residual,
                "complementarity_residual": self.complementarity_residual}


@dataclass(frozen=True)
class Found:
    pair: MultiplierPair
    found = True


@dataclass(frozen=True)
class NoneExist:
    floor: float
    found = False


def _active_h(p: ProblemInstance, xstar: np.ndarray, active_tol: float) -> np.ndarray:
    h = p.h(xstar)
    h[np.abs(h) <= active_tol] = 0.0
    return h


def _kkt_rows(p: ProblemInstance, xstar: np.ndarray, active_tol: float):
    """Equality block over the variables (tau, lambda): stationarity rows then complementarity."""
    G = ratio_gradient(p, xstar)                 # m x n
    J = p.h_jacobian(xstar)                      # l x n
    stat = np.hstack([G.T, J.T])                 # n x (m + l)
    comp = np.concatenate([np.zeros(p.m), _active_h(p, xstar, active_tol)])
    return stat, comp


def find_multipliers(p: ProblemInstance, xstar, tol: float = 1e-8, strict_tol: float = 1e-9,
                     feas_tol: float = 1e-9, normalization: float = 1.0,
                     reference=None) -> Found | NoneExist:
    """Recover (tau, lambda) at a feasible x*.

    With `reference`, a second LP returns, among the valid pairs with
    tau_i >= strict_tol * normalization, the one whose tau is L1-closest to
    the ray through `reference`.
    """
    xstar = as_vector(xstar, p.n, "xstar")
    check = feasibility(p, xstar, feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x* violates constraints {list(check.violated)}", list(check.violated))

    m, ell = p.m, p.ell
    stat, comp = _kkt_rows(p, xstar, feas_tol)
    nv = m + ell

    # variables: tau (m) | lambda (l) | t
    A_eq = np.zeros((p.n + 2, nv + 1))
    A_eq[:p.n, :nv] = stat
    A_eq[p.n, :nv] = comp
    A_eq[p.n + 1, :nv] = 1.0
    b_eq = np.zeros(p.n + 2)
    b_eq[-1] = normalization
    A_in = np.zeros((m, nv + 1))
    A_in[:, :m] = -np.eye(m)
    A_in[:, -1] = 1.0
    c = np.zeros(nv + 1)
    c[-1] = 1.0

    res = solve_linear_program(c, A_eq, b_eq, A_in, np.zeros(m))
    if not isinstance(res, LpOptimal):
        logger.info("multiplier LP status %s at x*=%s", res.status, xstar.tolist())
        return NoneExist(floor=0.0)
    t = float(res.x[-1])
    if t < strict_tol * normalization:
        logger.info("no strictly positive tau at x*=%s (floor %.3e)", xstar.tolist(), t)
        return NoneExist(floor=t)

    z = res.x[:nv]
    if reference is not None:
        z = _closest_to_reference(p, stat, comp, as_vector(reference, m, "reference"),
                                  strict_tol * normalization, normalization, z)

    pair = MultiplierPair.at(p, xstar, z[:m], np.maximum(z[m:], 0.0), floor=float(np.min(z[:m])))
    if pair.stationarity_residual > tol * normalization or pair.complementarity_residual > tol * normalization:
        raise NumericalError(
            f"multiplier residuals too large: stationarity {pair.stationarity_residual:.3e}, "
            f"complementarity {pair.complementarity_residual:.3e}")
    logger.debug("multipliers at x*=%s: tau=%s lambda=%s", xstar.tolist(), pair.tau.tolist(), pair.lam.tolist())
    return Found(pair)


def _closest_to_reference(p: ProblemInstance, stat: np.ndarray, comp: np.ndarray, ref: np.ndarray,
                          floor: float, normalization: float, fallback: np.ndarray) -> np.ndarray:
    if np.any(ref <= 0):
        raise DomainError("reference tau must be strictly positive")
    m, ell = p.m, p.ell
    nv = m + ell
    ref = ref / ref.sum()
    # variables: tau (m) | lambda (l) | kappa | e (m)
    width = nv + 1 + m
    A_eq = np.zeros((p.n + 2, width))
    A_eq[:p.n, :nv] = stat
    A_eq[p.n, :nv] = comp
    A_eq[p.n + 1, :nv] = 1.0
    b_eq = np.zeros(p.n + 2)
    b_eq[-1] = normalization
    eye = np.eye(m)
    # tau - kappa ref - e <= 0 ; -tau + kappa ref - e <= 0 ; -tau <= -floor
    up = np.hstack([eye, np.zeros((m, ell)), -ref[:, None], -eye])
    down = np.hstack([-eye, np.zeros((m, ell)), ref[:, None], -eye])
    pos = np.hstack([-eye, np.zeros((m, ell + 1 + m))])
    A_in = np.vstack([up, down, pos])
    b_in = np.concatenate([np.zeros(2 * m), -floor * np.ones(m)])
    c = np.zeros(width)
    c[nv + 1:] = -1.0
    res = solve_linear_program(c, A_eq, b_eq, A_in, b_in)
    if not isinstance(res, LpOptimal):
        logger.warning("reference-direction LP returned %s; keeping the max-min vertex", res.status)
        return fallback
    return res.x[:nv]


def sample_multipliers(p: ProblemInstance, xstar, rng: np.random.Generator, count: int,
                       floor: float = 1e-9, feas_tol: float = 1e-9) -> list[np.ndarray]:
    """Vertices of the multiplier set {tau >= floor, lambda >= 0, sum = 1} picked by
    random linear objectives. Returns the distinct tau parts found."""
    xstar = as_vector(xstar, p.n, "xstar")
    stat, comp = _kkt_rows(p, xstar, feas_tol)
    m, nv = p.m, p.m + p.ell
    A_eq = np.vstack([stat, comp[None, :], np.ones((1, nv))])
    b_eq = np.concatenate([np.zeros(p.n + 1), [1.0]])
    A_in = np.hstack([-np.eye(m), np.zeros((m, p.ell))])
    b_in = -floor * np.ones(m)
    found: list[np.ndarray] = []
    for _ in range(count):
        res = solve_linear_program(rng.standard_normal(nv), A_eq, b_eq, A_in, b_in)
        if not isinstance(res, LpOptimal):
            logger.debug("multiplier sampling LP returned %s", res.status)
            break
        tau = res.x[:m]
        if not any(np.allclose(tau, t, atol=1e-12) for t in found):
            found.append(tau)
    return found


def complete_multipliers(p: ProblemInstance, xstar, tau, tol: float = 1e-8,
                         feas_tol: float = 1e-9) -> Found | NoneExist:
    """Given a user tau > 0, find lambda >= 0 completing the KKT system."""
    xstar = as_vector(xstar, p.n, "xstar")
    tau = as_vector(tau, p.m, "tau")
    if np.any(tau <= 0):
        raise DomainError("tau must be strictly positive")
    check = feasibility(p, xstar, feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x* violates constraints {list(check.violated)}", list(check.violated))
    rhs = -(tau @ ratio_gradient(p, xstar))
    if p.ell == 0:
        lam = np.zeros(0)
    else:
        J = p.h_jacobian(xstar)
        A_eq = np.vstack([J.T, _active_h(p, xstar, feas_tol)[None, :]])
        b_eq = np.concatenate([rhs, [0.0]])
        res = solve_linear_program(np.zeros(p.ell), A_eq, b_eq)
        if not isinstance(res, LpOptimal):
            return NoneExist(floor=float(np.min(tau)))
        lam = res.x
    pair = MultiplierPair.at(p, xstar, tau, lam, floor=float(np.min(tau)))
    if pair.stationarity_residual > tol or pair.complementarity_residual > tol:
        return NoneExist(floor=float(np.min(tau)))
    return Found(pair)


def convert_multipliers(p: ProblemInstance, xstar, mu) -> np.ndarray:
    """tau_i = mu_i / g_i(x*)"""
    xstar = as_vector(xstar, p.n, "xstar")
    mu = as_vector(mu, p.m, "mu")
    if np.any(mu <= 0):
        raise DomainError("mu must be strictly positive")
    g = p.g_values(xstar)
    if np.any(g <= 0):
        raise DomainError("g must be positive at x*")
    return mu / g


def scalarized_gradients(p: ProblemInstance, x) -> np.ndarray:
    """Row i is grad f_i(x) - (f_i(x)/g_i(x)) grad g_i(x)."""
    x = as_vector(x, p.n, "x")
    g = p.g_values(x)
    if np.any(g <= 0):
        raise DomainError("g must be positive")
    alpha = p.f_values(x) / g
    return np.vstack([o.f.gradient(x) - alpha[i] * o.g.gradient(x) for i, o in enumerate(p.objectives)])


def stationarity_residual_scalarized(p: ProblemInstance, xstar, tau, lam) -> float:
    tau = as_vector(tau, p.m, "tau")
    lam = as_vector(lam, p.ell, "lambda")
    r = tau @ scalarized_gradients(p, xstar)
    if p.ell:
        r = r + lam @ p.h_jacobian(xstar)
    return float(np.max(np.abs(r)))
