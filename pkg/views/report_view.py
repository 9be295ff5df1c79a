# views/report_view.py
# Result objects -> JSON-ready payloads and one-line human summaries.
from dataclasses import dataclass
from typing import Any, List

import numpy as np

from core.certify import Certificate, Status
from core.kkt import Found
from core.oracle import DominanceReport, FrontPoint
from core.scalarize import SweepEntry

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_KKT = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT = 4
EXIT_USAGE = 64

STATUS_EXIT = {
    Status.CERTIFIED: EXIT_OK,
    Status.NOT_KKT: EXIT_NOT_KKT,
    Status.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


@dataclass
class Report:
    payload: Any
    summary: str = ""
    code: int = EXIT_OK


def _fmt(v) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in np.asarray(v, dtype=float).reshape(-1)) + ")"


def certificate_report(cert: Certificate) -> Report:
    if cert.status is Status.CERTIFIED:
        line = f"✅ x* = {_fmt(cert.point)} is Pareto optimal ({cert.route.value})"
    elif cert.status is Status.NOT_KKT:
        line = f"❌ x* = {_fmt(cert.point)} admits no multipliers with tau > 0 ({cert.note})"
    else:
        line = f"⚠ x* = {_fmt(cert.point)}: no route certified it; {cert.reason}"
        if cert.witness is not None:
            line += f"; witness {_fmt(cert.witness)}"
    if cert.multipliers is not None:
        line += f"\n   tau = {_fmt(cert.multipliers.tau)}, lambda = {_fmt(cert.multipliers.lam)}"
    return Report(cert.to_dict(), line, STATUS_EXIT[cert.status])


def multipliers_report(point: np.ndarray, res) -> Report:
    if isinstance(res, Found):
        payload = {"point": point.tolist(), "found": True, **res.pair.to_dict()}
        return Report(payload, f"✅ multipliers at {_fmt(point)}: tau = {_fmt(res.pair.tau)}, "
                               f"lambda = {_fmt(res.pair.lam)}")
    payload = {"point": point.tolist(), "found": False, "floor": res.floor}
    return Report(payload, f"❌ no multipliers with tau > 0 at {_fmt(point)}", EXIT_NOT_KKT)


def sweep_report(entries: List[SweepEntry]) -> Report:
    lines = []
    for e in entries:
        mark = "✅" if e.certified else ("·" if e.result.converged else "⚠")
        lines.append(f"{mark} w = {_fmt(e.weights)} -> x = {_fmt(e.result.x)}, ratios {_fmt(e.ratios)}")
    return Report([e.to_dict() for e in entries], "\n".join(lines))


def dominance_report(rep: DominanceReport) -> Report:
    if rep.dominated:
        line = f"❌ {_fmt(rep.query)} is dominated by {_fmt(rep.dominator)} on a grid of {rep.points_checked} points"
    else:
        line = f"✅ {_fmt(rep.query)} is undominated on a grid of {rep.points_checked} points (step {rep.grid_step:g})"
    if rep.weakly_dominated:
        line += "; also weakly dominated"
    return Report(rep.to_dict(), line)


def front_report(front: List[FrontPoint], weak: bool = False) -> Report:
    kind = "weak Pareto" if weak else "Pareto"
    pts = np.vstack([f.point for f in front]) if front else np.zeros((0, 0))
    span = f" spanning {_fmt(pts.min(axis=0))} .. {_fmt(pts.max(axis=0))}" if front else ""
    return Report([f.to_dict() for f in front], f"{len(front)} grid points on the approximate {kind} front{span}")


def eigen_payload(table) -> list:
    return [{"objective": i, "A": eA.to_dict(), "B": eB.to_dict()} for i, (eA, eB) in enumerate(table)]


def eigen_report(table) -> Report:
    lines = [f"objective {i}: eig A = {_fmt(eA.eigenvalues)}, eig B = {_fmt(eB.eigenvalues)}"
             for i, (eA, eB) in enumerate(table)]
    return Report(eigen_payload(table), "\n".join(lines))


def status_name(obj) -> str:
    return type(obj).__name__


def result_payload(obj) -> dict:
    """Generic payload for the small status dataclasses of the duality checks."""
    out = {"status": status_name(obj)}
    for key, value in vars(obj).items():
        if hasattr(value, "to_dict"):
            value = value.to_dict()
        elif isinstance(value, np.ndarray):
            value = value.tolist()
        out[key] = value
    return out
