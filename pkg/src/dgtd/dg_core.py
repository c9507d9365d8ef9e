"""Semi-discrete DG spatial operator for the 2D TE Maxwell system.

Fields (Ex, Ey, Hz) live element-wise as (K, Np) nodal arrays. The
operator evaluates, per element,

    eps dEx/dt =  dHz/dy + face terms,
    eps dEy/dt = -dHz/dx + face terms,
    mu  dHz/dt =  dEx/dy - dEy/dx + face terms,

with the element coupling carried entirely by an impedance-weighted
numerical flux of the field jumps, interpolated between a central
(alpha = 0) and an upwind (alpha = 1) form. Boundary faces synthesize an
exterior ghost trace: PEC mirrors the tangential electric field, PMC the
magnetic one, and the Silver-Muller absorbing condition uses a zero
exterior state with the flux forced to its upwind form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MeshError
from .materials import MaterialMap, face_impedances
from .mesh import Mesh2D
from .reference_element import ReferenceElement

BC_PEC = "PEC"
BC_PMC = "PMC"
BC_SM = "SM"
BOUNDARY_CONDITIONS = (BC_PEC, BC_PMC, BC_SM)

_BC_ALIASES = {
    "pec": BC_PEC,
    "pmc": BC_PMC,
    "sm": BC_SM,
    "silvermuller": BC_SM,
    "silver-muller": BC_SM,
    "silver_muller": BC_SM,
}


def normalize_bc(label: str) -> str:
    try:
        return _BC_ALIASES[str(label).strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown boundary condition {label!r}") from None


@dataclass(frozen=True)
class FluxParams:
    """Numerical-flux dissipation parameter and boundary condition."""

    alpha: float = 0.0
    bc: str = BC_PEC

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "bc", normalize_bc(self.bc))


def numerical_flux(jump_ex, jump_ey, jump_hz, nx, ny,
                   z_minus, z_plus, y_minus, y_plus, alpha):
    """Flux contributions (fEx, fEy, fHz) from field jumps on a face.

    All arguments broadcast; jumps are interior minus exterior.
    """
    tang_e = nx * jump_ey - ny * jump_ex
    common = (z_plus * jump_hz - alpha * tang_e) / (z_plus + z_minus)
    f_ex = -ny * common
    f_ey = nx * common
    f_hz = (y_plus * tang_e - alpha * jump_hz) / (y_plus + y_minus)
    return f_ex, f_ey, f_hz


def boundary_ghost(bc: str, alpha: float, interior_trace):
    """Exterior ghost trace and effective flux alpha for a boundary face.

    interior_trace is an (ex, ey, hz) tuple of arrays. The returned
    exterior trace realizes the jump settings [E] = 2E-, [Hz] = 0 (PEC),
    [E] = 0, [Hz] = 2Hz- (PMC) and [E] = E-, [Hz] = Hz- with the flux
    pinned to alpha = 1 (Silver-Muller).
    """
    bc = normalize_bc(bc)
    ex, ey, hz = (np.asarray(f, dtype=float) for f in interior_trace)
    if bc == BC_PEC:
        return (-ex, -ey, hz.copy()), alpha
    if bc == BC_PMC:
        return (ex.copy(), ey.copy(), -hz), alpha
    return (np.zeros_like(ex), np.zeros_like(ey), np.zeros_like(hz)), 1.0


@dataclass(frozen=True)
class TraceData:
    """Two-sided traces at the face nodes of one element, shape (3, Nfp)."""

    ex_minus: np.ndarray
    ey_minus: np.ndarray
    hz_minus: np.ndarray
    ex_plus: np.ndarray
    ey_plus: np.ndarray
    hz_plus: np.ndarray
    alpha_face: np.ndarray  # (3,)

    @property
    def jump_ex(self) -> np.ndarray:
        return self.ex_minus - self.ex_plus

    @property
    def jump_ey(self) -> np.ndarray:
        return self.ey_minus - self.ey_plus

    @property
    def jump_hz(self) -> np.ndarray:
        return self.hz_minus - self.hz_plus


class SpatialOperator:
    """Precomputed spatial DG operator for one (mesh, materials, order, flux).

    Evaluation is a pure function of the field arrays; instances are
    read-only after construction, so element-wise work may be shared
    across threads freely.
    """

    def __init__(self, mesh: Mesh2D, materials: MaterialMap,
                 elem: ReferenceElement, flux: FluxParams):
        if materials.n_elements != mesh.n_elements:
            raise MeshError("material map does not match mesh size")
        self.mesh = mesh
        self.materials = materials
        self.elem = elem
        self.flux = flux

        k_elems = mesh.n_elements
        n_fp = elem.face_node_count
        fm = elem.face_nodes
        self.x, self.y = mesh.map_reference_nodes(elem.r, elem.s)

        interior = mesh.neighbor >= 0
        self._interior = interior
        self._boundary = ~interior
        self._ext_elem = np.where(interior, mesh.neighbor, np.arange(k_elems)[:, None])

        # Exterior trace nodes: the neighbor walks the shared edge in the
        # opposite direction, so its face-node order is simply reversed.
        nbrf = np.where(interior, mesh.neighbor_face, 0)
        own = np.broadcast_to(fm[None, :, :], (k_elems, 3, n_fp))
        self._ext_node = np.where(interior[:, :, None], fm[:, ::-1][nbrf], own)
        self._fm_flat = fm.ravel()
        self._check_conforming_traces()

        imp = face_impedances(materials, mesh)
        self.impedance = imp
        self._nx = mesh.normals[:, :, 0][:, :, None]
        self._ny = mesh.normals[:, :, 1][:, :, None]
        self._zm = imp.z_minus[:, :, None]
        self._zp = imp.z_plus[:, :, None]
        self._ym = imp.y_minus[:, :, None]
        self._yp = imp.y_plus[:, :, None]

        alpha_face = np.full((k_elems, 3), flux.alpha)
        if flux.bc == BC_SM:
            alpha_face[self._boundary] = 1.0
        self.alpha_face = alpha_face
        self._af = alpha_face[:, :, None]

        # face integrals enter the residual as LIFT @ (edge_length/(2 J) * flux)
        self._fscale = (mesh.edge_length / (2.0 * mesh.jac[:, None]))[:, :, None]
        self._lift_t = elem.lift.T.copy()
        self._dr_t = elem.diff_r.T.copy()
        self._ds_t = elem.diff_s.T.copy()
        self._rx = mesh.rx[:, None]
        self._ry = mesh.ry[:, None]
        self._sx = mesh.sx[:, None]
        self._sy = mesh.sy[:, None]
        self._inv_mu = (1.0 / materials.mu)[:, None]
        inv_eps = materials.inv_eps
        self._ie00 = inv_eps[:, 0, 0][:, None]
        self._ie01 = inv_eps[:, 0, 1][:, None]
        self._ie10 = inv_eps[:, 1, 0][:, None]
        self._ie11 = inv_eps[:, 1, 1][:, None]

    def _check_conforming_traces(self):
        xm, xp = self._gather(self.x)
        ym, yp = self._gather(self.y)
        mismatch = np.hypot(xm - xp, ym - yp)[self._interior]
        if mismatch.size and mismatch.max() > 1e-9 * max(self.mesh.h_max, 1.0):
            raise MeshError(
                "face nodes of neighboring elements do not coincide; "
                "mesh is not conforming"
            )

    # -- trace gathering ------------------------------------------------

    def _gather(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k_elems, n_fp = self.mesh.n_elements, self.elem.face_node_count
        minus = u[:, self._fm_flat].reshape(k_elems, 3, n_fp)
        plus = u[self._ext_elem[:, :, None], self._ext_node]
        return minus, plus

    def traces_all(self, ex: np.ndarray, ey: np.ndarray, hz: np.ndarray):
        """Interior and exterior traces on every face, ghosts applied."""
        exm, exp_ = self._gather(ex)
        eym, eyp = self._gather(ey)
        hzm, hzp = self._gather(hz)
        b = self._boundary
        bc = self.flux.bc
        if bc == BC_PEC:
            exp_[b] = -exm[b]
            eyp[b] = -eym[b]
            hzp[b] = hzm[b]
        elif bc == BC_PMC:
            exp_[b] = exm[b]
            eyp[b] = eym[b]
            hzp[b] = -hzm[b]
        else:  # Silver-Muller: zero exterior state
            exp_[b] = 0.0
            eyp[b] = 0.0
            hzp[b] = 0.0
        return (exm, eym, hzm), (exp_, eyp, hzp)

    # -- derivative helpers ----------------------------------------------

    def _grad_x(self, u: np.ndarray) -> np.ndarray:
        return self._rx * (u @ self._dr_t) + self._sx * (u @ self._ds_t)

    def _grad_y(self, u: np.ndarray) -> np.ndarray:
        return self._ry * (u @ self._dr_t) + self._sy * (u @ self._ds_t)

    def _lift(self, face_values: np.ndarray) -> np.ndarray:
        k_elems = self.mesh.n_elements
        return (self._fscale * face_values).reshape(k_elems, -1) @ self._lift_t

    # -- right-hand sides --------------------------------------------------

    def _fluxes(self, ex, ey, hz):
        minus, plus = self.traces_all(ex, ey, hz)
        return numerical_flux(
            minus[0] - plus[0], minus[1] - plus[1], minus[2] - plus[2],
            self._nx, self._ny, self._zm, self._zp, self._ym, self._yp,
            self._af,
        )

    def rhs_e(self, ex, ey, hz) -> tuple[np.ndarray, np.ndarray]:
        """Time derivative of (Ex, Ey); E jumps feed only the alpha penalty."""
        f_ex, f_ey, _ = self._fluxes(ex, ey, hz)
        a_x = self._grad_y(hz) + self._lift(f_ex)
        a_y = -self._grad_x(hz) + self._lift(f_ey)
        return (self._ie00 * a_x + self._ie01 * a_y,
                self._ie10 * a_x + self._ie11 * a_y)

    def rhs_h(self, ex, ey, hz) -> np.ndarray:
        """Time derivative of Hz."""
        _, _, f_hz = self._fluxes(ex, ey, hz)
        return self._inv_mu * (self._grad_y(ex) - self._grad_x(ey) + self._lift(f_hz))

    def rhs(self, ex, ey, hz):
        """Full semi-discrete right-hand side (rEx, rEy, rHz)."""
        f_ex, f_ey, f_hz = self._fluxes(ex, ey, hz)
        a_x = self._grad_y(hz) + self._lift(f_ex)
        a_y = -self._grad_x(hz) + self._lift(f_ey)
        r_hz = self._inv_mu * (self._grad_y(ex) - self._grad_x(ey) + self._lift(f_hz))
        return (self._ie00 * a_x + self._ie01 * a_y,
                self._ie10 * a_x + self._ie11 * a_y,
                r_hz)


def gather_traces(state, op: SpatialOperator, elem_index: int) -> TraceData:
    """Two-sided traces of one element's faces, boundary ghosts included."""
    minus, plus = op.traces_all(state.Ex, state.Ey, state.Hz)
    k = int(elem_index)
    return TraceData(
        ex_minus=minus[0][k], ey_minus=minus[1][k], hz_minus=minus[2][k],
        ex_plus=plus[0][k], ey_plus=plus[1][k], hz_plus=plus[2][k],
        alpha_face=op.alpha_face[k],
    )


def spatial_rhs(state, op: SpatialOperator):
    """Semi-discrete RHS evaluated at a field state."""
    return op.rhs(state.Ex, state.Ey, state.Hz)
