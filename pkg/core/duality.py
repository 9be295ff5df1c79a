# core/duality.py
# Mond-Weir type dual of the ratio problem. Nothing here solves the dual;
# each function verifies one duality statement at given points.
#
# Dual constraints at (u, tau, lambda):
#   sum_i tau_i (grad f_i(u) - r_i(u) grad g_i(u)) + sum_j lambda_j grad h_j(u) = 0
#   sum_j lambda_j h_j(u) >= 0,  tau > 0,  lambda >= 0,  sum_j lambda_j = 1,  u in S
# with r_i = f_i / g_i.
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from core.certify import Certificate, certify_point
from core.errors import HypothesisNotMet, InfeasiblePoint
from core.kkt import MultiplierPair, convert_multipliers, stationarity_residual_scalarized
from core.model import ProblemInstance, as_vector, evaluate_ratios, feasibility
from core.oracle import DominanceReport, dominance_check, dominance_masks
from core.spectral import PsdStatus, build_F, psd_status

logger = logging.getLogger("vqfp.duality")


@dataclass(frozen=True, eq=False)
class DualPoint:
    u: np.ndarray
    tau: np.ndarray
    lam: np.ndarray
    stationarity: float
    lambda_h: float

    @classmethod
    def at(cls, p: ProblemInstance, u, tau, lam) -> "DualPoint":
        u = as_vector(u, p.n, "u")
        tau = as_vector(tau, p.m, "tau")
        lam = as_vector(lam, p.ell, "lambda")
        res = stationarity_residual_scalarized(p, u, tau, lam)
        lh = float(lam @ p.h(u)) if p.ell else 0.0
        return cls(u, tau, lam, res, lh)

    def to_dict(self) -> dict:
        return {"u": self.u.tolist(), "tau": self.tau.tolist(), "lambda": self.lam.tolist(),
                "residuals": {"stationarity": self.stationarity, "lambda_h_sign": self.lambda_h}}


@dataclass(frozen=True)
class DualFeasible:
    feasible = True


@dataclass(frozen=True)
class DualInfeasible:
    which: str
    feasible = False


def dual_feasible(p: ProblemInstance, dp: DualPoint, tol: float = 1e-8,
                  sign_tol: float = 1e-9) -> DualFeasible | DualInfeasible:
    if np.any(dp.tau <= 0):
        return DualInfeasible("tau > 0")
    if np.any(dp.lam < -sign_tol):
        return DualInfeasible("lambda >= 0")
    if p.ell == 0 or abs(float(dp.lam.sum()) - 1.0) > tol:
        return DualInfeasible("sum lambda = 1")
    if not feasibility(p, dp.u, sign_tol).feasible:
        return DualInfeasible("u in S")
    if dp.stationarity > tol:
        return DualInfeasible("stationarity")
    if dp.lambda_h < -sign_tol:
        return DualInfeasible("sum lambda h(u) >= 0")
    return DualFeasible()


def _require_psd(p: ProblemInstance, dp: DualPoint, psd_tol: float) -> PsdStatus:
    status = psd_status(build_F(p, dp.tau, dp.u), psd_tol)
    if not status.is_psd:
        raise HypothesisNotMet(f"F(tau, u) is {status.value}, not positive semidefinite")
    return status


# ===== Weak duality =====

@dataclass(frozen=True)
class Consistent:
    consistent = True


@dataclass(frozen=True, eq=False)
class CounterexampleFound:
    details: dict = field(default_factory=dict)
    consistent = False


def weak_duality_check(p: ProblemInstance, x, dp: DualPoint, cfg) -> Consistent | CounterexampleFound:
    """The primal ratios at a feasible x never dominate the dual ratios at u."""
    x = as_vector(x, p.n, "x")
    check = feasibility(p, x, cfg.feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x violates constraints {list(check.violated)}", list(check.violated))
    _require_psd(p, dp, cfg.psd_tol)
    rx, ru = evaluate_ratios(p, x), evaluate_ratios(p, dp.u)
    dom, _ = dominance_masks(rx[None, :], ru, cfg.dom_tol)
    if dom[0]:
        details = {"x": x.tolist(), "ratios_x": rx.tolist(), "dual": dp.to_dict(), "ratios_u": ru.tolist()}
        logger.error("weak duality counterexample: %s", details)
        return CounterexampleFound(details)
    return Consistent()


# ===== Strong duality =====

@dataclass(frozen=True, eq=False)
class Dual:
    point: DualPoint
    equal_values: bool


@dataclass(frozen=True)
class NotConstructible:
    reason: str


def strong_duality_construct(p: ProblemInstance, xstar, mp: MultiplierPair,
                             tol: float = 1e-10) -> Dual | NotConstructible:
    """Dual point (x*, tau/g(x*), lambda) rescaled jointly so that sum lambda = 1."""
    xstar = as_vector(xstar, p.n, "xstar")
    total = float(mp.lam.sum()) if p.ell else 0.0
    if total <= 0.0:
        return NotConstructible("lambda-sum-zero")
    tau = convert_multipliers(p, xstar, mp.tau) / total
    lam = mp.lam / total
    dp = DualPoint.at(p, xstar, tau, lam)
    equal = bool(np.all(np.abs(evaluate_ratios(p, xstar) - evaluate_ratios(p, dp.u)) <= tol))
    return Dual(dp, equal)


# ===== Converse duality =====

@dataclass(frozen=True, eq=False)
class ConverseReport:
    certificate: Certificate
    dominance: DominanceReport | None = None

    def to_dict(self) -> dict:
        return {"certificate": self.certificate.to_dict(),
                "dominance": self.dominance.to_dict() if self.dominance else None}


def converse_duality_check(p: ProblemInstance, dp: DualPoint, cfg, step: float | None = None) -> ConverseReport:
    """Re-certify u of a feasible dual point with F(tau, u) PSD; with `step`,
    also run the grid oracle at u."""
    check = dual_feasible(p, dp, cfg.kkt_tol, cfg.sign_tol)
    if not check.feasible:
        raise HypothesisNotMet(f"dual point is not feasible: {check.which}")
    _require_psd(p, dp, cfg.psd_tol)
    # tau on the ratio gradients is tau on the scalarized ones times g(u)
    cert = certify_point(p, dp.u, cfg, tau=dp.tau * p.g_values(dp.u))
    report = None
    if step is not None:
        report = dominance_check(p, dp.u, step, cfg.dom_tol, cfg.feas_tol, cfg.grid_cap, cfg.threads)
    return ConverseReport(cert, report)


# ===== Strict converse duality =====

@dataclass(frozen=True)
class SamePoint:
    distance: float


@dataclass(frozen=True)
class HypothesisUnmet:
    reason: str


@dataclass(frozen=True, eq=False)
class Violation:
    details: dict = field(default_factory=dict)


def strict_converse_check(p: ProblemInstance, xstar, dp: DualPoint, cfg) -> SamePoint | HypothesisUnmet | Violation:
    xstar = as_vector(xstar, p.n, "xstar")
    if not feasibility(p, xstar, cfg.feas_tol).feasible:
        return HypothesisUnmet("x* is not in S")
    check = dual_feasible(p, dp, cfg.kkt_tol, cfg.sign_tol)
    if not check.feasible:
        return HypothesisUnmet(f"dual point is not feasible: {check.which}")
    gap = abs(float(dp.tau @ evaluate_ratios(p, xstar)) - float(dp.tau @ evaluate_ratios(p, dp.u)))
    if gap > cfg.kkt_tol:
        return HypothesisUnmet(f"weighted objective values differ by {gap:.3e}")
    status = psd_status(build_F(p, dp.tau / p.g_values(xstar), dp.u), cfg.psd_tol)
    if status is not PsdStatus.POSITIVE_DEFINITE:
        return HypothesisUnmet(f"F(tau/g(x*), u) is {status.value}, not positive definite")
    dist = float(np.linalg.norm(xstar - dp.u))
    if dist <= cfg.point_tol:
        return SamePoint(dist)
    details = {"xstar": xstar.tolist(), "dual": dp.to_dict(), "distance": dist}
    logger.error("strict converse duality violated: %s", details)
    return Violation(details)
