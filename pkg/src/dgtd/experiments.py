"""Empirical stability sweeps: locate dt_max by bisection, extract CFL
constants, and regenerate the stability tables as CSV.

A "case" fixes everything except the time step: mesh, materials, order,
flux parameters and initial data, integrated to the final time. The
stable/unstable classification of a given dt is a complete run that
either finishes with bounded energy or trips the blowup detector. The
maximum stable step is bracketed by geometric expansion starting from
the theoretical bound and then bisected to a relative tolerance.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dg_core import FluxParams, SpatialOperator, normalize_bc
from .errors import SweepError
from .leapfrog import (
    DEFAULT_BLOWUP_FACTOR,
    RunConfig,
    default_initial_condition,
    initial_conditions,
    run,
)
from .materials import MaterialMap, PermittivityTensor
from .mesh import Mesh2D, structured_square_mesh
from .reference_element import build_reference_element
from .stability import StabilityConstants, theoretical_bound

DT_CAP = 10.0

# constant anisotropic tensor used throughout the benchmark sweeps
BENCHMARK_EPS = PermittivityTensor(5.0, 1.0, 1.0, 3.0)


# Stable staggered runs keep max(energy)/initial below ~1.4 even right at
# the stability boundary; unstable runs jump past 20 within T=1 on every
# benchmark cell. 5.0 splits the gap with a wide margin on both sides.
DEFAULT_BOUNDED_FACTOR = 5.0


@dataclass
class StabilityCase:
    """Everything about a run except the time step."""

    mesh: Mesh2D
    materials: MaterialMap
    order: int
    alpha: float
    bc: str
    initial: str | Callable | None = None
    final_time: float = 1.0
    blowup_factor: float = DEFAULT_BLOWUP_FACTOR
    bounded_factor: float = DEFAULT_BOUNDED_FACTOR

    def __post_init__(self):
        self.bc = normalize_bc(self.bc)
        if self.initial is None:
            self.initial = default_initial_condition(self.bc)
        self.elem = build_reference_element(self.order)
        self.op = SpatialOperator(
            self.mesh, self.materials, self.elem,
            FluxParams(alpha=self.alpha, bc=self.bc),
        )

    def theory(self) -> StabilityConstants:
        return theoretical_bound(self.mesh, self.materials, self.order,
                                 self.alpha, self.bc)


def benchmark_case(cells: int, order: int, alpha: float, bc: str,
                   diagonal: str = "slash", final_time: float = 1.0,
                   eps: PermittivityTensor = BENCHMARK_EPS,
                   mu: float = 1.0) -> StabilityCase:
    """The anisotropic square-cavity setup used by the CFL tables:
    domain (-1,1)^2, constant tensor eps, mu = 1, T = 1."""
    mesh = structured_square_mesh(cells, diagonal=diagonal)
    materials = MaterialMap.uniform(mesh.n_elements, eps, mu)
    return StabilityCase(mesh, materials, order, alpha, bc,
                         final_time=final_time)


def classify_stability(dt: float, case: StabilityCase) -> bool:
    """Run the case to its final time; True iff the energy stayed bounded.

    Bounded means the energy never exceeded bounded_factor times its
    initial value. The bounded factor sits far above the staggered
    scheme's benign energy oscillation (< 1.4x in practice) and far
    below the geometric growth of an unstable run. A dt too large to
    complete even one step before final_time proves nothing and
    classifies as unstable.
    """
    config = RunConfig(dt=dt, final_time=case.final_time,
                       record_energy_every=1,
                       blowup_factor=case.blowup_factor)
    if config.n_steps == 0:
        return False
    state0 = initial_conditions(case.initial, case.mesh, case.elem,
                                case.materials, dt)
    result = run(state0, case.op, config)
    if not result.completed:
        return False
    energies = result.energy[:, 2]
    return bool(energies.max() <= case.bounded_factor * energies[0])


@dataclass
class DtMaxSearch:
    dt_max: float
    iterations: int
    runs: int
    theory_bound: float
    stable_at_theory: bool


def find_dtmax(case: StabilityCase, tol: float = 1e-2,
               start: float | None = None) -> DtMaxSearch:
    """Largest stable time step, located by bracketing plus bisection.

    Starts from the theoretical bound (or `start`), doubles until an
    unstable step is found, then bisects the stable/unstable bracket to
    the relative tolerance. Returns the last stable iterate.
    """
    if not 0.0 < tol <= 0.1:
        raise SweepError(f"tolerance must lie in (0, 0.1], got {tol}")
    theory = case.theory().dt_bound
    dt = start if start is not None else theory
    runs = 0

    stable_at_theory = classify_stability(dt, case)
    runs += 1
    lo = hi = None
    if stable_at_theory:
        lo = dt
        while dt < DT_CAP:
            dt *= 2.0
            runs += 1
            if classify_stability(dt, case):
                lo = dt
            else:
                hi = dt
                break
        if hi is None:
            raise SweepError(f"no unstable time step found below the cap {DT_CAP}")
    else:
        # sufficient bound violated (or custom start too big): shrink first
        hi = dt
        for _ in range(60):
            dt *= 0.5
            runs += 1
            if classify_stability(dt, case):
                lo = dt
                break
            hi = dt
        if lo is None:
            raise SweepError("no stable time step found while shrinking")

    iterations = 0
    while (hi - lo) > tol * lo:
        mid = 0.5 * (lo + hi)
        iterations += 1
        runs += 1
        if classify_stability(mid, case):
            lo = mid
        else:
            hi = mid
    return DtMaxSearch(dt_max=lo, iterations=iterations, runs=runs,
                       theory_bound=theory, stable_at_theory=stable_at_theory)


def cfl_constant(dt_max: float, order: int, h_min: float) -> float:
    """C in dt_max = C / ((N+1)(N+2)) * h_min."""
    return dt_max * (order + 1) * (order + 2) / h_min


@dataclass
class SweepSpec:
    """Grid of (mesh refinement, order) cases sharing flux and materials."""

    cells: list[int]
    orders: list[int]
    alpha: float
    bc: str
    tol: float = 1e-2
    final_time: float = 1.0
    diagonal: str = "slash"
    eps: PermittivityTensor = BENCHMARK_EPS
    mu: float = 1.0
    initial: str | None = None  # None: pec_cosine, or sm_sine under SM
    blowup_factor: float = DEFAULT_BLOWUP_FACTOR
    bounded_factor: float = DEFAULT_BOUNDED_FACTOR

    def __post_init__(self):
        self.bc = normalize_bc(self.bc)


@dataclass
class SweepRow:
    h_min: float
    order: int
    dt_max: float = np.nan
    c: float = np.nan
    theory_bound: float = np.nan
    iterations: int = 0
    error: str | None = None


def flux_name(alpha: float) -> str:
    if alpha == 0.0:
        return "central"
    if alpha == 1.0:
        return "upwind"
    return f"alpha{alpha:g}"


def table_filename(bc: str, alpha: float) -> str:
    return f"table_{normalize_bc(bc).lower()}_{flux_name(alpha)}.csv"


def _run_one(spec: SweepSpec, cells: int, order: int) -> SweepRow:
    case = benchmark_case(cells, order, spec.alpha, spec.bc,
                          diagonal=spec.diagonal,
                          final_time=spec.final_time,
                          eps=spec.eps, mu=spec.mu)
    if spec.initial is not None:
        case.initial = spec.initial
    case.blowup_factor = spec.blowup_factor
    case.bounded_factor = spec.bounded_factor
    row = SweepRow(h_min=case.mesh.h_min, order=order)
    try:
        search = find_dtmax(case, tol=spec.tol)
        row.dt_max = search.dt_max
        row.c = cfl_constant(search.dt_max, order, case.mesh.h_min)
        row.theory_bound = search.theory_bound
        row.iterations = search.iterations
    except Exception as exc:  # record, keep the rest of the table going
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def run_table(spec: SweepSpec, threads: int = 1,
              progress: Callable[[SweepRow], None] | None = None) -> list[SweepRow]:
    """Run the whole (cells x orders) grid; failures are recorded per row."""
    jobs = [(cells, order) for cells in spec.cells for order in spec.orders]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda j: _run_one(spec, *j), jobs))
        if progress is not None:
            for row in rows:
                progress(row)
    else:
        rows = []
        for job in jobs:
            row = _run_one(spec, *job)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def write_table_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write("h_min,N,dt_max,C,theory_bound\n")
        for row in rows:
            out.write(f"{row.h_min:.6g},{row.order},{row.dt_max:.6g},"
                      f"{row.c:.6g},{row.theory_bound:.6g}\n")
