"""Theoretical time-step bound versus the observed stability threshold.

Evaluates the sufficient stability condition (with computationally
calibrated trace and inverse-inequality constants) for one setup, then
locates the actual maximum stable dt by bisection. The theory is a
guaranteed-safe bound, so the empirical threshold sits a comfortable
factor above it; alpha pushes both downward.
"""

from dgtd import cfl_constant, find_dtmax, stability_bound_3d
from dgtd.experiments import benchmark_case
from dgtd.materials import face_impedances

cells, order, bc = 10, 2, "PEC"

for alpha, label in ((0.0, "central"), (1.0, "upwind")):
    case = benchmark_case(cells, order, alpha, bc)
    theory = case.theory()
    print(f"--- {bc}, {label} flux, N = {order}, h_min = {case.mesh.h_min:.4f}")
    print(theory.report())

    search = find_dtmax(case, tol=1e-2)
    c = cfl_constant(search.dt_max, order, case.mesh.h_min)
    print(f"empirical dt_max = {search.dt_max:.5f}  (CFL constant C = {c:.3f})")
    print(f"sufficiency margin: dt_max / bound = "
          f"{search.dt_max / theory.dt_bound:.1f}x")
    print(f"bisection: {search.iterations} iterations, {search.runs} runs\n")

# The 3D bound is a formula evaluator sharing the calibrated constants.
case = benchmark_case(cells, order, 0.0, bc)
theory2d = case.theory()
imp = face_impedances(case.materials, case.mesh)
bound3d = stability_bound_3d(order, case.mesh.h_min,
                             case.materials.eps_lower,
                             case.materials.mu_lower,
                             imp.z_min, imp.y_min, 0.0, bc,
                             theory2d.c_inv, theory2d.c_tau)
print("3D bound with the same inputs (tetrahedral trace factor):")
print(bound3d.report())
