"""Theoretical time-step bounds and the polynomial-inequality constants.

The sufficient stability condition evaluated here reads

    dt < min(eps_lower, mu_lower) / max(C_E, C_H) * h_min,

where C_E and C_H combine an inverse-inequality constant C_inv, a
shape-regularity trace constant C_tau, the polynomial order, the flux
dissipation parameter alpha and boundary-condition weights (beta1,
beta2, beta3). Neither C_inv nor C_tau has a universal closed form;
both are calibrated computationally (C_tau from the mesh geometry,
C_inv from a generalized eigenvalue problem on the reference triangle)
so the bound is a concrete number rather than an order statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .dg_core import BC_PEC, BC_PMC, BC_SM, normalize_bc
from .errors import DomainError
from .materials import MaterialMap, face_impedances
from .mesh import Mesh2D
from .reference_element import build_reference_element

# diameter of the reference triangle (-1,-1), (1,-1), (-1,1)
_REF_DIAMETER = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class StabilityConstants:
    c_inv: float
    c_tau: float
    beta1: float
    beta2: float
    beta3: float
    c_e: float
    c_h: float
    dt_bound: float

    def report(self) -> str:
        lines = [
            f"C_inv     = {self.c_inv:.6g}",
            f"C_tau     = {self.c_tau:.6g}",
            f"beta      = ({self.beta1:g}, {self.beta2:g}, {self.beta3:g})",
            f"C_E       = {self.c_e:.6g}",
            f"C_H       = {self.c_h:.6g}",
            f"dt_bound  = {self.dt_bound:.6g}",
        ]
        return "\n".join(lines)


def trace_constant_exact(order: int, face_measure: float, cell_measure: float,
                         dim: int = 2) -> float:
    """Exact constant of the polynomial trace inequality on a simplex.

    2D: sqrt((N+1)(N+2)/2 * |f|/|T|); 3D: sqrt((N+1)(N+3)/3 * |f|/|T|).
    """
    if face_measure <= 0.0 or cell_measure <= 0.0:
        raise DomainError("face and cell measures must be positive")
    if dim == 2:
        factor = (order + 1) * (order + 2) / 2.0
    elif dim == 3:
        factor = (order + 1) * (order + 3) / 3.0
    else:
        raise DomainError(f"dim must be 2 or 3, got {dim}")
    return math.sqrt(factor * face_measure / cell_measure)


def calibrate_c_tau(mesh: Mesh2D) -> float:
    """Tightest shape-regularity trace constant for a given mesh.

    Summing the exact per-edge trace inequality over the three edges of
    an element gives ||u||_dT^2 <= (N+1)(N+2)/2 * per/|T| * ||u||_T^2,
    so C_tau = max_k sqrt(h_k * per_k / (2 |T_k|)) makes the h-scaled
    form hold with the smallest possible constant of this type.
    """
    return float(np.sqrt(mesh.h_k * mesh.perimeter_k / (2.0 * mesh.area)).max())


@lru_cache(maxsize=None)
def calibrate_c_inv_per_order(order: int) -> float:
    """Inverse-inequality constant for a single polynomial order.

    Largest generalized eigenvalue of the H1-vs-L2 quadratic forms on the
    reference triangle, rescaled by diameter / N^2 so that
    ||u||_H1 <= C_inv N^2 h^-1 ||u|| holds on shape-similar elements no
    larger than the reference one.
    """
    elem = build_reference_element(order)
    m = elem.mass
    stiff = elem.diff_r.T @ m @ elem.diff_r + elem.diff_s.T @ m @ elem.diff_s
    lam = scipy.linalg.eigh(m + stiff, m, eigvals_only=True)[-1]
    return _REF_DIAMETER / order**2 * math.sqrt(lam)


def calibrate_c_inv(max_order: int) -> float:
    """Inverse-inequality constant covering all orders up to max_order."""
    if max_order < 1:
        raise DomainError("max_order must be >= 1")
    return max(calibrate_c_inv_per_order(n) for n in range(1, max_order + 1))


def beta_params(bc: str, alpha: float = 0.0) -> tuple[float, float, float]:
    """Boundary-condition weights (beta1, beta2, beta3) of the bound."""
    bc = normalize_bc(bc)
    if bc == BC_PEC:
        return alpha, 0.0, 0.0  # beta3 unused for PEC
    if bc == BC_PMC:
        return 0.0, 1.0, alpha
    return 0.5, 0.5, 1.0


def _check_positive(**values):
    for name, value in values.items():
        if value <= 0.0:
            raise DomainError(f"{name} must be positive, got {value}")


def stability_bound_2d(order: int, h_min: float, eps_lower: float,
                       mu_lower: float, z_min: float, y_min: float,
                       alpha: float, bc: str, c_inv: float,
                       c_tau: float) -> StabilityConstants:
    """Evaluate the 2D sufficient time-step bound."""
    _check_positive(h_min=h_min, eps_lower=eps_lower, mu_lower=mu_lower,
                    z_min=z_min, y_min=y_min, c_inv=c_inv, c_tau=c_tau)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    b1, b2, b3 = beta_params(bc, alpha)
    poly = (order + 1) * (order + 2)
    base = 0.5 * c_inv * order**2
    c_e = base + c_tau**2 * poly * (2.0 + b2 + (2.0 * alpha + b1) / (2.0 * z_min))
    c_h = base + c_tau**2 * poly * (2.0 + b2 + (alpha + b2 * b3) / y_min)
    dt_bound = min(eps_lower, mu_lower) * h_min / max(c_e, c_h)
    return StabilityConstants(c_inv, c_tau, b1, b2, b3, c_e, c_h, dt_bound)


def stability_bound_3d(order: int, h_min: float, eps_lower: float,
                       mu_lower: float, z_min: float, y_min: float,
                       alpha: float, bc: str, c_inv: float,
                       c_tau: float) -> StabilityConstants:
    """Evaluate the 3D sufficient time-step bound (formula only; no 3D solver)."""
    _check_positive(h_min=h_min, eps_lower=eps_lower, mu_lower=mu_lower,
                    z_min=z_min, y_min=y_min, c_inv=c_inv, c_tau=c_tau)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    b1, b2, b3 = beta_params(bc, alpha)
    poly = (order + 1) * (order + 3)
    base = 0.5 * c_inv * order**2
    c_e = base + c_tau**2 * poly * (3.0 + b2 / 2.0 + (alpha + b1) / (2.0 * z_min))
    c_h = base + c_tau**2 * poly * (3.0 + b2 / 2.0 + (alpha + b3) / (2.0 * y_min))
    dt_bound = min(eps_lower, mu_lower) * h_min / max(c_e, c_h)
    return StabilityConstants(c_inv, c_tau, b1, b2, b3, c_e, c_h, dt_bound)


def theoretical_bound(mesh: Mesh2D, materials: MaterialMap, order: int,
                      alpha: float, bc: str,
                      c_inv: float | None = None,
                      c_tau: float | None = None) -> StabilityConstants:
    """Calibrate the constants for a concrete mesh/material pair and
    evaluate the 2D bound."""
    if c_tau is None:
        c_tau = calibrate_c_tau(mesh)
    if c_inv is None:
        c_inv = calibrate_c_inv(order)
    imp = face_impedances(materials, mesh)
    return stability_bound_2d(
        order, mesh.h_min, materials.eps_lower, materials.mu_lower,
        imp.z_min, imp.y_min, alpha, bc, c_inv, c_tau,
    )
