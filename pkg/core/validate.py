# core/validate.py
# Instance invariants that need eigenvalues: PSD denominators, convex
# quadratic constraints, and g_i > 0 on all of R^n.
import logging

import numpy as np

from core.errors import ValidationError
from core.model import ProblemInstance, QuadraticConstraint
from core.spectral import effective_tol, eig_sym

logger = logging.getLogger("vqfp.validate")


def denominator_floor(Q: np.ndarray, c: np.ndarray, d: float, index: int) -> tuple[np.ndarray, float]:
    """Minimizer w of x^T Q x + c^T x + d (Q PSD) and the minimum value.

    Solves 2 Q w = -c by least squares; an inconsistent system means the
    quadratic is unbounded below and the instance is rejected.
    """
    w, *_ = np.linalg.lstsq(2.0 * Q, -c, rcond=None)
    residual = float(np.max(np.abs(2.0 * Q @ w + c))) if c.size else 0.0
    if residual > 1e-9 * (1.0 + float(np.max(np.abs(c)))):
        raise ValidationError(
            "g-positivity", index,
            "2 B x + b = 0 has no solution, so g is unbounded below and cannot stay positive")
    return w, float(w @ Q @ w + c @ w + d)


def validate_instance(p: ProblemInstance, psd_tol: float = 1e-9, g_pos_tol: float = 1e-9,
                      max_sweeps: int = 30) -> ProblemInstance:
    for i, obj in enumerate(p.objectives):
        lam = eig_sym(obj.g.Q, max_sweeps).eigenvalues
        if lam[0] < -effective_tol(lam, psd_tol):
            raise ValidationError("psd", i, f"B has eigenvalue {lam[0]:.6g} < 0")
        _, floor = denominator_floor(obj.g.Q, obj.g.c, obj.g.d, i)
        if floor < g_pos_tol:
            raise ValidationError("g-positivity", i, f"min g = {floor:.6g} is below {g_pos_tol:g}")
        logger.debug("objective %d: min g = %.6g", i, floor)

    for j, con in enumerate(p.constraints):
        if isinstance(con, QuadraticConstraint):
            lam = eig_sym(con.Q, max_sweeps).eigenvalues
            if lam[0] < -effective_tol(lam, psd_tol):
                raise ValidationError("psd", j, f"constraint Q has eigenvalue {lam[0]:.6g} < 0")
    return p
