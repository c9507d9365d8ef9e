import numpy as np
import pytest

from dgtd import (
    SweepSpec,
    benchmark_case,
    cfl_constant,
    classify_stability,
    find_dtmax,
    run_table,
    write_table_csv,
)
from dgtd.experiments import flux_name, table_filename


@pytest.fixture(scope="module")
def coarse_case():
    return benchmark_case(5, 1, 0.0, "PEC")


def test_classify_trivial_extremes(coarse_case):
    # far below any bound (the theory bound itself is ~9e-3) and far above
    assert classify_stability(2e-4, coarse_case) is True
    assert classify_stability(10.0, coarse_case) is False


def test_classify_reference_bracket(coarse_case):
    # stability flips between the reference stable/unstable step sizes
    assert classify_stability(0.17, coarse_case) is True
    assert classify_stability(0.20, coarse_case) is False


def test_find_dtmax_coarsest_case(coarse_case):
    search = find_dtmax(coarse_case, tol=1e-2)
    assert search.stable_at_theory
    assert search.theory_bound < search.dt_max
    # reference value 0.17 (C = 1.80); reconstruction tolerance +-20%
    c = cfl_constant(search.dt_max, 1, coarse_case.mesh.h_min)
    assert 0.8 * 1.80 <= c <= 1.2 * 1.80


def test_find_dtmax_deterministic(coarse_case):
    a = find_dtmax(coarse_case, tol=1e-2)
    b = find_dtmax(coarse_case, tol=1e-2)
    assert a.dt_max == b.dt_max
    assert a.runs == b.runs


def test_find_dtmax_custom_start_converges(coarse_case):
    # a deliberately unstable starting guess must shrink and still bracket
    search = find_dtmax(coarse_case, tol=1e-2, start=1.0)
    assert not search.stable_at_theory
    reference = find_dtmax(coarse_case, tol=1e-2)
    assert search.dt_max == pytest.approx(reference.dt_max, rel=0.05)


def test_cfl_constant_definition():
    assert cfl_constant(0.17, 1, 0.5657) == pytest.approx(1.803, abs=2e-3)
    assert cfl_constant(0.05, 2, 0.2828) == pytest.approx(2.12, abs=5e-3)
    h, order = 0.37, 3
    assert cfl_constant(h / ((order + 1) * (order + 2)), order, h) == pytest.approx(1.0, rel=1e-12)


def test_refinement_scaling_halves_dtmax():
    coarse = find_dtmax(benchmark_case(5, 1, 0.0, "PEC"), tol=1e-2)
    fine = find_dtmax(benchmark_case(10, 1, 0.0, "PEC"), tol=1e-2)
    ratio = fine.dt_max / coarse.dt_max
    assert 0.45 <= ratio <= 0.55


def test_run_table_grid_and_csv(tmp_path):
    spec = SweepSpec(cells=[5], orders=[1, 2], alpha=1.0, bc="PEC", tol=5e-2)
    rows = run_table(spec)
    assert len(rows) == 2
    for row in rows:
        assert row.error is None
        assert row.dt_max >= row.theory_bound
        assert row.c == pytest.approx(
            cfl_constant(row.dt_max, row.order, row.h_min), rel=1e-12)
    path = tmp_path / table_filename(spec.bc, spec.alpha)
    write_table_csv(rows, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "h_min,N,dt_max,C,theory_bound"
    assert len(lines) == 3
    assert path.name == "table_pec_upwind.csv"


def test_run_table_empty_orders():
    spec = SweepSpec(cells=[5], orders=[], alpha=0.0, bc="PEC")
    assert run_table(spec) == []


def test_run_table_threaded_matches_serial():
    spec = SweepSpec(cells=[5], orders=[1, 2], alpha=0.0, bc="SM", tol=5e-2)
    serial = run_table(spec, threads=1)
    threaded = run_table(spec, threads=2)
    assert [(r.h_min, r.order, r.dt_max) for r in serial] == \
        [(r.h_min, r.order, r.dt_max) for r in threaded]


def test_flux_names():
    assert flux_name(0.0) == "central"
    assert flux_name(1.0) == "upwind"
    assert flux_name(0.5) == "alpha0.5"
    assert table_filename("SM", 0.0) == "table_sm_central.csv"


def test_pmc_case_respects_theory_bound():
    # PMC is not part of the benchmark tables but shares the machinery
    from dgtd.experiments import StabilityCase
    from dgtd import MaterialMap, PermittivityTensor, structured_square_mesh

    mesh = structured_square_mesh(5)
    mats = MaterialMap.uniform(mesh.n_elements,
                               PermittivityTensor(5.0, 1.0, 1.0, 3.0), 1.0)
    case = StabilityCase(mesh, mats, 1, 0.0, "PMC", initial="pec_cosine")
    search = find_dtmax(case, tol=2e-2)
    assert search.stable_at_theory
    assert search.dt_max >= search.theory_bound
    # same mesh/order as the PEC cell, so the threshold lands nearby
    assert 0.1 < search.dt_max < 0.3


def test_heterogeneous_two_region_run_is_stable():
    import numpy as np
    from dgtd import (
        FluxParams, MaterialMap, RunConfig, SpatialOperator,
        build_reference_element, initial_conditions, run,
        structured_square_mesh, theoretical_bound,
    )

    mesh = structured_square_mesh(6)
    x_cent = mesh.vertices[mesh.triangles].mean(axis=1)[:, 0]
    eps = np.where(x_cent[:, None, None] < 0, np.eye(2), 4.0 * np.eye(2))
    mats = MaterialMap(eps.copy(), np.ones(mesh.n_elements))
    assert mats.eps_lower == 1.0 and mats.eps_upper == 4.0

    elem = build_reference_element(2)
    op = SpatialOperator(mesh, mats, elem, FluxParams(1.0, "SM"))
    # impedances differ across the material interface
    assert np.any(np.abs(op.impedance.z_plus - op.impedance.z_minus) > 0.1)

    bound = theoretical_bound(mesh, mats, 2, 1.0, "SM")
    dt = 0.9 * bound.dt_bound
    state = initial_conditions("sm_sine", mesh, elem, mats, dt)
    result = run(state, op, RunConfig(dt=dt, final_time=1.0))
    assert result.completed
    assert result.energy[:, 2].max() <= 5.0 * result.energy[0, 2]
