"""Command-line front end.

Subcommands: simulate, bound, dtmax-sweep, table. Exit codes: 0 success,
2 configuration error, 3 blowup during simulate, 4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback

from .config import parse_config, parse_table_spec
from .dg_core import FluxParams, SpatialOperator
from .errors import ConfigError, DgtdError, MaterialError, MeshError
from .experiments import (
    StabilityCase,
    cfl_constant,
    find_dtmax,
    run_table,
    table_filename,
)
from .leapfrog import (
    RunConfig,
    STATUS_COMPLETED,
    initial_conditions,
    run,
    write_energy_csv,
)
from .materials import face_impedances
from .reference_element import build_reference_element
from .stability import stability_bound_3d, theoretical_bound

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_INTERNAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgtd",
        description="Leap-frog DG solver for 2D TE Maxwell equations "
                    "with a CFL stability toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent cases")
        p.add_argument("--tol", type=float, default=None,
                       help="relative bisection tolerance override")

    p_sim = sub.add_parser("simulate", help="run one simulation")
    common(p_sim)

    p_bound = sub.add_parser("bound", help="evaluate the theoretical dt bound")
    common(p_bound)
    p_bound.add_argument("--three-d", action="store_true",
                         help="also evaluate the 3D bound formula")
    p_bound.add_argument("--h-min-3d", type=float, default=None,
                         help="h_min for the 3D bound (defaults to the 2D mesh value)")

    p_dtmax = sub.add_parser("dtmax-sweep",
                             help="bisect the maximum stable dt for one case")
    common(p_dtmax)

    p_table = sub.add_parser("table", help="regenerate a CFL table as CSV")
    common(p_table)
    return parser


def _prepare(cfg):
    mesh = cfg.build_mesh()
    materials = cfg.build_materials(mesh)
    elem = build_reference_element(cfg.order)
    flux = FluxParams(alpha=cfg.alpha, bc=cfg.bc)
    return mesh, materials, elem, flux


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    mesh, materials, elem, flux = _prepare(cfg)
    op = SpatialOperator(mesh, materials, elem, flux)

    if cfg.auto_dt:
        bound = theoretical_bound(mesh, materials, cfg.order, cfg.alpha, cfg.bc)
        dt = cfg.safety * bound.dt_bound
        print(f"auto dt: {dt!r} (bound {bound.dt_bound!r}, safety {cfg.safety})")
    else:
        dt = cfg.dt

    state0 = initial_conditions(cfg.initial_condition(), mesh, elem,
                                materials, dt)
    config = RunConfig(dt=dt, final_time=cfg.final_time,
                       record_energy_every=cfg.energy_every,
                       blowup_factor=cfg.blowup_factor)
    result = run(state0, op, config)

    os.makedirs(args.out, exist_ok=True)
    write_energy_csv(os.path.join(args.out, "energy.csv"), result)
    with open(os.path.join(args.out, "effective.cfg"), "w",
              encoding="utf-8") as handle:
        handle.write(cfg.to_text())
    if cfg.fields_out:
        _write_fields(os.path.join(args.out, "fields.csv"), op, result.state)

    if result.status != STATUS_COMPLETED:
        print(f"blowup at step {result.blowup_step} "
              f"(t = {result.blowup_step * dt!r})", file=sys.stderr)
        return EXIT_BLOWUP
    print(f"completed {config.n_steps} steps to t = {result.state.time_E!r}; "
          f"final energy {result.final_energy!r}")
    return EXIT_OK


def _write_fields(path, op, state) -> None:
    with open(path, "w", encoding="utf-8") as out:
        out.write("element,node,x,y,Ex,Ey,Hz\n")
        n_p = op.elem.node_count
        for k in range(op.mesh.n_elements):
            for i in range(n_p):
                vals = (op.x[k, i], op.y[k, i], state.Ex[k, i],
                        state.Ey[k, i], state.Hz[k, i])
                out.write(f"{k},{i}," + ",".join(repr(float(v)) for v in vals) + "\n")


def _cmd_bound(args) -> int:
    cfg = parse_config(args.config)
    mesh, materials, _, _ = _prepare(cfg)
    bound = theoretical_bound(mesh, materials, cfg.order, cfg.alpha, cfg.bc)
    print(f"2D bound for order {cfg.order}, alpha {cfg.alpha}, bc {cfg.bc}, "
          f"h_min {mesh.h_min!r}:")
    print(bound.report())

    rows = [("dim", "c_inv", "c_tau", "beta1", "beta2", "beta3",
             "c_e", "c_h", "dt_bound")]
    rows.append(("2", *(repr(v) for v in (
        bound.c_inv, bound.c_tau, bound.beta1, bound.beta2, bound.beta3,
        bound.c_e, bound.c_h, bound.dt_bound))))

    if args.three_d:
        imp = face_impedances(materials, mesh)
        h3 = args.h_min_3d if args.h_min_3d is not None else mesh.h_min
        bound3 = stability_bound_3d(
            cfg.order, h3, materials.eps_lower, materials.mu_lower,
            imp.z_min, imp.y_min, cfg.alpha, cfg.bc,
            bound.c_inv, bound.c_tau,
        )
        print(f"\n3D bound (h_min {h3!r}):")
        print(bound3.report())
        rows.append(("3", *(repr(v) for v in (
            bound3.c_inv, bound3.c_tau, bound3.beta1, bound3.beta2,
            bound3.beta3, bound3.c_e, bound3.c_h, bound3.dt_bound))))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "bound.csv"), "w",
              encoding="utf-8") as out:
        for row in rows:
            out.write(",".join(row) + "\n")
    return EXIT_OK


def _cmd_dtmax(args) -> int:
    cfg = parse_config(args.config)
    mesh, materials, elem, flux = _prepare(cfg)
    case = StabilityCase(mesh, materials, cfg.order, cfg.alpha, cfg.bc,
                         initial=cfg.initial_condition(),
                         final_time=cfg.final_time,
                         blowup_factor=cfg.blowup_factor)
    tol = args.tol if args.tol is not None else 1e-2
    search = find_dtmax(case, tol=tol)
    c = cfl_constant(search.dt_max, cfg.order, mesh.h_min)
    print(f"h_min        = {mesh.h_min!r}")
    print(f"dt_max       = {search.dt_max!r}")
    print(f"C            = {c!r}")
    print(f"theory bound = {search.theory_bound!r}")
    print(f"bisection iterations = {search.iterations}, runs = {search.runs}")
    return EXIT_OK


def _cmd_table(args) -> int:
    spec = parse_table_spec(args.config)
    if args.tol is not None:
        spec.tol = args.tol

    def progress(row):
        if row.error is None:
            print(f"h_min {row.h_min:.4f}  N {row.order}  "
                  f"dt_max {row.dt_max:.6g}  C {row.c:.4g}")
        else:
            print(f"h_min {row.h_min:.4f}  N {row.order}  FAILED: {row.error}")

    rows = run_table(spec, threads=args.threads, progress=progress)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, table_filename(spec.bc, spec.alpha))
    from .experiments import write_table_csv
    write_table_csv(rows, path)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "bound": _cmd_bound,
        "dtmax-sweep": _cmd_dtmax,
        "table": _cmd_table,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, MeshError, MaterialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DgtdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
