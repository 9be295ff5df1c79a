"""
Step 2 of the Pareto optimality test and the sufficient-condition routes.

Every route proves Z(x, x*) = (x - x*)^T F_hat (x - x*) >= 0 on S, where
F_hat = sum_i tau_i / g_i(x*) * F_i(x*):

  psd     every F_i(x*) is PSD
  h_psd   every rank-two H_{i,k} has a PSD symmetric part and alpha_{i,k} = 0
  eigen   mu^A_k <d, p_k>^2 w_i >= mu^B_k <d, q_k>^2 w_i f_i/g_i on S, per (i, k)
  h       H_{i,k}(x) >= 0 on S, per (i, k)
  zmin    min over S of Z itself

Each route is only sufficient. A failing route never says x* is dominated.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from core.errors import DomainError, InapplicableRoute, InfeasiblePoint
from core.globalmin import GlobalMin, LocalOnly, LowerBoundOnly, MinResult, Unbounded, global_minimize
from core.kkt import Found, MultiplierPair, complete_multipliers, find_multipliers
from core.model import ProblemInstance, as_vector, feasibility, u_and_s
from core.spectral import (
    EigenDecomposition, HMatrixData, build_F, build_Fi, build_H_data,
    eig_sym, objective_eigen, psd_status,
)
from utils.parallel import thread_map

logger = logging.getLogger("vqfp.certify")

GGCQ_NOTE = "conclusion valid under the generalized Guignard constraint qualification"
SYM_PART_NOTE = "H-matrix definiteness evaluated on the symmetric part of a+ a-^T"


class Status(str, enum.Enum):
    CERTIFIED = "CertifiedPareto"
    NOT_KKT = "NotKkt"
    INCONCLUSIVE = "Inconclusive"


class Route(str, enum.Enum):
    POINTWISE_PSD = "PointwisePsd"
    H_PSD_ALPHA_ZERO = "HPsdAlphaZero"
    EIGEN_INEQUALITY = "EigenInequality"
    Z_MINIMIZATION = "ZMinimization"
    H_NONNEG = "HNonneg"


ROUTE_KEYS = {
    "psd": Route.POINTWISE_PSD,
    "h_psd": Route.H_PSD_ALPHA_ZERO,
    "eigen": Route.EIGEN_INEQUALITY,
    "zmin": Route.Z_MINIMIZATION,
    "h": Route.H_NONNEG,
}


# ===== Outcomes of a single inequality check =====

@dataclass(frozen=True)
class Holds:
    bound: float
    holds = True


@dataclass(frozen=True)
class FailsAt:
    x: np.ndarray
    gap: float
    holds = False


@dataclass(frozen=True)
class Undecided:
    bound: float
    witness: np.ndarray | None = None
    witness_value: float | None = None
    holds = False


Check = Holds | FailsAt | Undecided


@dataclass(frozen=True)
class RouteReport:
    route: Route
    passed: bool
    reason: str = ""
    witness: np.ndarray | None = None
    value: float | None = None

    def to_dict(self) -> dict:
        out = {"route": self.route.value, "passed": self.passed, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass(frozen=True, eq=False)
class Certificate:
    point: np.ndarray
    status: Status
    route: Route | None = None
    multipliers: MultiplierPair | None = None
    z_min_value: float | None = None
    witness: np.ndarray | None = None
    reason: str = ""
    note: str = ""
    tolerances: dict = field(default_factory=dict)
    reports: tuple[RouteReport, ...] = ()
    pairing: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "point": self.point.tolist(),
            "status": self.status.value,
            "route": self.route.value if self.route else None,
            "multipliers": self.multipliers.to_dict() if self.multipliers else None,
            "z_min_value": self.z_min_value,
            "witness": self.witness.tolist() if self.witness is not None else None,
            "reason": self.reason,
            "note": self.note,
            "tolerances": dict(self.tolerances),
            "routes_tried": [r.to_dict() for r in self.reports],
        }
        if self.pairing:
            out["eigen_pairing"] = list(self.pairing)
        return out


# ===== Z =====

def _weights(p: ProblemInstance, tau, xstar) -> np.ndarray:
    tau = as_vector(tau, p.m, "tau")
    g = p.g_values(as_vector(xstar, p.n, "xstar"))
    if np.any(g <= 0):
        raise DomainError(f"g must be positive at x*, got {g.tolist()}")
    return tau / g


def f_hat(p: ProblemInstance, tau, xstar) -> np.ndarray:
    xstar = as_vector(xstar, p.n, "xstar")
    return build_F(p, _weights(p, tau, xstar), xstar)


def z_value(p: ProblemInstance, tau, xstar, x) -> float:
    """(x - x*)^T F_hat (x - x*)"""
    xstar = as_vector(xstar, p.n, "xstar")
    d = as_vector(x, p.n, "x") - xstar
    return float(d @ f_hat(p, tau, xstar) @ d)


def z_value_sum(p: ProblemInstance, tau, xstar, x) -> float:
    """sum_i tau_i s_i / u_i, the same number computed term by term."""
    tau = as_vector(tau, p.m, "tau")
    total = 0.0
    for i in range(p.m):
        u, s = u_and_s(p, i, x, xstar)
        total += tau[i] * s / u
    return total


def eigen_terms(p: ProblemInstance, tau, xstar, x,
                table: tuple[tuple[EigenDecomposition, EigenDecomposition], ...] | None = None) -> np.ndarray:
    """m x n matrix of mu^A_k gamma_i^k - mu^B_k eta_i^k; its sum is Z(x, x*)."""
    xstar = as_vector(xstar, p.n, "xstar")
    d = as_vector(x, p.n, "x") - xstar
    w = _weights(p, tau, xstar)
    table = table or objective_eigen(p)
    ratios = p.f_values(xstar) / p.g_values(xstar)
    out = np.zeros((p.m, p.n))
    for i, (eA, eB) in enumerate(table):
        gamma = w[i] * (eA.eigenvectors.T @ d) ** 2
        eta = w[i] * ratios[i] * (eB.eigenvectors.T @ d) ** 2
        out[i] = eA.eigenvalues * gamma - eB.eigenvalues * eta
    return out


def _centered(M: np.ndarray, xstar: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Coefficients of x -> (x - x*)^T M (x - x*)."""
    return M, -2.0 * M @ xstar, float(xstar @ M @ xstar)


def minimize_z(p: ProblemInstance, tau, xstar, cfg) -> GlobalMin | LowerBoundOnly:
    xstar = as_vector(xstar, p.n, "xstar")
    F = f_hat(p, tau, xstar)
    if psd_status(F, cfg.psd_tol, eig_sym(F, cfg.jacobi_sweeps)).is_psd:
        return GlobalMin(0.0, xstar.copy())
    res = global_minimize(*_centered(F, xstar), p, xstar, cfg)
    if isinstance(res, LocalOnly):
        return LowerBoundOnly(res.bound, res.argmin, res.value)
    if isinstance(res, Unbounded):
        return LowerBoundOnly(-np.inf)
    return res


def _judge(res: MinResult, tol: float) -> Check:
    """Holds iff the minimum is >= -tol; a witness needs a violation beyond 10 tol."""
    if isinstance(res, GlobalMin):
        if res.value >= -tol:
            return Holds(res.value)
        if res.value < -10.0 * tol:
            return FailsAt(res.argmin, res.value)
        return Undecided(res.value, res.argmin, res.value)
    if isinstance(res, LocalOnly):
        if res.bound >= -tol:
            return Holds(res.bound)
        if res.value < -10.0 * tol:
            return FailsAt(res.argmin, res.value)
        return Undecided(res.bound, res.argmin, res.value)
    if isinstance(res, LowerBoundOnly):
        if res.bound >= -tol:
            return Holds(res.bound)
        if res.witness_value is not None and res.witness_value < -10.0 * tol:
            return FailsAt(res.witness, res.witness_value)
        return Undecided(res.bound, res.witness, res.witness_value)
    return Undecided(-np.inf)


def check_eigen_inequality(p: ProblemInstance, i: int, k: int, tau, xstar, cfg,
                           table=None) -> Check:
    xstar = as_vector(xstar, p.n, "xstar")
    table = table or objective_eigen(p, cfg.jacobi_sweeps)
    eA, eB = table[i]
    w = _weights(p, tau, xstar)[i]
    ratio = p.objectives[i].f.value(xstar) / p.objectives[i].g.value(xstar)
    pk, qk = eA.eigenvectors[:, k], eB.eigenvectors[:, k]
    a = w * float(eA.eigenvalues[k])
    b = w * float(eB.eigenvalues[k]) * ratio
    if a >= 0.0 and b <= 0.0:
        return Holds(0.0)
    M = a * np.outer(pk, pk) - b * np.outer(qk, qk)
    if psd_status(M, cfg.psd_tol).is_psd:
        return Holds(0.0)
    return _judge(global_minimize(*_centered(M, xstar), p, xstar, cfg), cfg.z_tol)


def check_H_nonneg(p: ProblemInstance, i: int, k: int, hd: HMatrixData, cfg) -> Check:
    """min over S of x^T sym(Hbar) x - alpha^T x + beta, against -z_tol."""
    if not hd.real_valued:
        raise InapplicableRoute(
            f"H_{i},{k} is not real valued (mu_A={hd.mu_A:.6g}, mu_B*ratio={hd.mu_B * hd.ratio:.6g})")
    if not np.any(hd.a_plus) or not np.any(hd.a_minus):
        return Holds(0.0)
    return _judge(global_minimize(hd.sym_part(), -hd.alpha, hd.beta, p, hd.xstar, cfg), cfg.z_tol)


# ===== Route evaluation =====

@dataclass
class _Step2:
    p: ProblemInstance
    xstar: np.ndarray
    tau: np.ndarray
    cfg: object

    @cached_property
    def table(self):
        return objective_eigen(self.p, self.cfg.jacobi_sweeps)

    @cached_property
    def pairs(self) -> list[tuple[int, int]]:
        return [(i, k) for i in range(self.p.m) for k in range(self.p.n)]

    @cached_property
    def h_data(self) -> list[HMatrixData]:
        return [build_H_data(self.p, i, k, self.xstar, *self.table[i]) for i, k in self.pairs]

    def pairing(self) -> tuple[dict, ...]:
        return tuple(
            {"objective": i, "k": k,
             "mu_A": float(self.table[i][0].eigenvalues[k]),
             "mu_B": float(self.table[i][1].eigenvalues[k])}
            for i, k in self.pairs)


def _route_psd(s: _Step2) -> RouteReport:
    for i in range(s.p.m):
        status = psd_status(build_Fi(s.p, i, s.xstar), s.cfg.psd_tol)
        if not status.is_psd:
            return RouteReport(Route.POINTWISE_PSD, False, f"F_{i}(x*) is {status.value}")
    return RouteReport(Route.POINTWISE_PSD, True, value=0.0)


def _route_h_psd(s: _Step2) -> RouteReport:
    for hd in s.h_data:
        if not hd.real_valued:
            return RouteReport(Route.H_PSD_ALPHA_ZERO, False, f"H_{hd.i},{hd.k} is not real valued")
        if not hd.alpha_vanishes(s.cfg.kkt_tol):
            return RouteReport(Route.H_PSD_ALPHA_ZERO, False, f"alpha_{hd.i},{hd.k} is nonzero")
        if not psd_status(hd.sym_part(), s.cfg.psd_tol).is_psd:
            return RouteReport(Route.H_PSD_ALPHA_ZERO, False, f"symmetric part of H_{hd.i},{hd.k} is not PSD")
    return RouteReport(Route.H_PSD_ALPHA_ZERO, True, SYM_PART_NOTE, value=0.0)


def _merge(route: Route, checks: list[Check], pairs: list[tuple[int, int]]) -> RouteReport:
    for (i, k), chk in zip(pairs, checks):
        if isinstance(chk, FailsAt):
            return RouteReport(route, False, f"fails for (i={i}, k={k})", chk.x, chk.gap)
    for (i, k), chk in zip(pairs, checks):
        if isinstance(chk, Undecided):
            return RouteReport(route, False, f"undecided for (i={i}, k={k}); lower bound {chk.bound:.3e}")
    return RouteReport(route, True, value=min(c.bound for c in checks))


def _route_eigen(s: _Step2) -> RouteReport:
    checks = thread_map(
        lambda ik: check_eigen_inequality(s.p, ik[0], ik[1], s.tau, s.xstar, s.cfg, s.table),
        s.pairs, s.cfg.threads)
    return _merge(Route.EIGEN_INEQUALITY, checks, s.pairs)


def _route_h(s: _Step2) -> RouteReport:
    bad = [hd for hd in s.h_data if not hd.real_valued]
    if bad:
        return RouteReport(Route.H_NONNEG, False, f"inapplicable: H_{bad[0].i},{bad[0].k} is not real valued")
    checks = thread_map(lambda hd: check_H_nonneg(s.p, hd.i, hd.k, hd, s.cfg),
                        s.h_data, s.cfg.threads)
    return _merge(Route.H_NONNEG, checks, s.pairs)


def _route_zmin(s: _Step2) -> RouteReport:
    res = minimize_z(s.p, s.tau, s.xstar, s.cfg)
    chk = _judge(res, s.cfg.z_tol)
    if isinstance(chk, Holds):
        return RouteReport(Route.Z_MINIMIZATION, True, value=chk.bound)
    if isinstance(chk, FailsAt):
        return RouteReport(Route.Z_MINIMIZATION, False, "min Z < 0", chk.x, chk.gap)
    return RouteReport(Route.Z_MINIMIZATION, False,
                       f"only a lower bound {chk.bound:.3e} is available", value=chk.bound)


ROUTE_FUNCS = {
    Route.POINTWISE_PSD: _route_psd,
    Route.H_PSD_ALPHA_ZERO: _route_h_psd,
    Route.EIGEN_INEQUALITY: _route_eigen,
    Route.Z_MINIMIZATION: _route_zmin,
    Route.H_NONNEG: _route_h,
}


def _routes(cfg) -> list[Route]:
    if cfg.route == "auto":
        return [ROUTE_KEYS[r] for r in cfg.route_order]
    return [ROUTE_KEYS[cfg.route]]


def certify_point(p: ProblemInstance, xstar, cfg, tau=None, tau_hint=None) -> Certificate:
    """Run the Pareto optimality test at x*.

    `tau` fixes the multipliers used in Step 2 (lambda is completed by LP);
    `tau_hint` picks, among valid multipliers, the tau closest to that direction.
    """
    xstar = as_vector(xstar, p.n, "xstar")
    tols = cfg.tolerances()
    check = feasibility(p, xstar, cfg.feas_tol)
    if not check.feasible:
        raise InfeasiblePoint(f"x* violates constraints {list(check.violated)}", list(check.violated))

    if tau is not None:
        step1 = complete_multipliers(p, xstar, tau, cfg.kkt_tol, cfg.feas_tol)
        if not isinstance(step1, Found):
            return Certificate(xstar, Status.INCONCLUSIVE, reason="supplied tau admits no lambda >= 0 "
                               "satisfying stationarity and complementarity", tolerances=tols)
    else:
        step1 = find_multipliers(p, xstar, cfg.kkt_tol, cfg.strict_tol, cfg.feas_tol, reference=tau_hint)
        if not isinstance(step1, Found):
            logger.info("x*=%s fails the multiplier step (floor %.3e)", xstar.tolist(), step1.floor)
            return Certificate(xstar, Status.NOT_KKT, reason="no multipliers with tau > 0",
                               note=GGCQ_NOTE, tolerances=tols)

    pair = step1.pair
    s = _Step2(p, xstar, pair.tau, cfg)
    reports: list[RouteReport] = []
    for route in _routes(cfg):
        logger.debug("trying route %s at x*=%s", route.value, xstar.tolist())
        report = ROUTE_FUNCS[route](s)
        reports.append(report)
        if report.passed:
            logger.info("x*=%s certified by %s", xstar.tolist(), route.value)
            return Certificate(
                xstar, Status.CERTIFIED, route, pair,
                z_min_value=report.value if route is Route.Z_MINIMIZATION else None,
                note=report.reason, tolerances=tols, reports=tuple(reports),
                pairing=s.pairing() if "table" in s.__dict__ else ())

    witness = next((r.witness for r in reports if r.witness is not None), None)
    zmin = next((r.value for r in reports if r.route is Route.Z_MINIMIZATION), None)
    reason = "; ".join(f"{r.route.value}: {r.reason}" for r in reports)
    return Certificate(xstar, Status.INCONCLUSIVE, None, pair, z_min_value=zmin, witness=witness,
                       reason=reason, tolerances=tols, reports=tuple(reports),
                       pairing=s.pairing() if "table" in s.__dict__ else ())
