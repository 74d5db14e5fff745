"""Acceptance battery: one test and one printed pass/fail line per
criterion.  Each test drives the matching verification suite and re-asserts
the documented tolerance on the reported residuals."""

from cartanlib import run_suite


def gate(capsys, name, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    with capsys.disabled():
        print(line)
    assert passed, line


def test_hyperbolic_geodesic_closed_form(capsys):
    r = run_suite("hyperbolic-geodesic")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["exact_path_error"] <= 1e-8
          and res["rk4_path_error"] <= 1e-6)
    gate(capsys, "hyperbolic geodesic closed form", ok,
         f"exact={res['exact_path_error']:.2e} rk4={res['rk4_path_error']:.2e}")


def test_hyperbolic_curvature(capsys):
    r = run_suite("hyperbolic-curvature")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["torsion"] <= 1e-9
          and res["h_vs_commutator_oracle"] <= 1e-10
          and res["constancy_deviation"] <= 1e-9)
    gate(capsys, "hyperbolic curvature and constancy", ok,
         f"torsion={res['torsion']:.2e} oracle={res['h_vs_commutator_oracle']:.2e}")


def test_klein_flatness(capsys):
    r = run_suite("klein-flat")
    ok = r["verdict"] == "pass" and r["residuals"]["max_curvature"] <= 1e-10
    gate(capsys, "flatness of identity-mutation models", ok,
         f"max={r['residuals']['max_curvature']:.2e}")


def test_structure_identities(capsys):
    r = run_suite("structure-identities")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["identity_residual"] <= 1e-6
          and res["vertical_relation_residual"] <= 1e-6)
    gate(capsys, "covariant-derivative structure identities", ok,
         f"id={res['identity_residual']:.2e} vert={res['vertical_relation_residual']:.2e}")


def test_parallel_velocity(capsys):
    r = run_suite("parallel-velocity")
    ok = (r["verdict"] == "pass"
          and r["residuals"]["velocity_transport_error"] <= 1e-7)
    gate(capsys, "geodesic velocity is parallel", ok,
         f"err={r['residuals']['velocity_transport_error']:.2e}")


def test_development(capsys):
    r = run_suite("development")
    ok = r["verdict"] == "pass" and r["residuals"]["development_error"] <= 1e-7
    gate(capsys, "geodesics develop to one-parameter subgroups", ok,
         f"err={r['residuals']['development_error']:.2e}")


def test_completeness_and_trotter(capsys):
    r = run_suite("completeness-trotter")
    res = r["residuals"]
    ratios = res["trotter_ratios"]
    ok = (r["verdict"] == "pass"
          and res["incomplete_models"] == []
          and all(1.8 <= x <= 2.2 for x in ratios))
    gate(capsys, "completeness evidence and product formula", ok,
         f"ratios={[round(x, 3) for x in ratios]}")


def test_sl2_connectivity_counterexample(capsys):
    r = run_suite("sl2-connect")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["unreachable_detected"]
          and res["found"] == 20
          and res["reverify_residual"] <= 1e-8)
    gate(capsys, "unreachable shear vs connectable targets", ok,
         f"found={int(res['found'])}/20 residual={res['reverify_residual']:.2e}")


def test_clifton_pohl_incompleteness(capsys):
    r = run_suite("clifton-pohl")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and 0.9 <= res["t_escape"] <= 1.0
          and res["ode_residual"] <= 1e-6)
    gate(capsys, "null geodesic blow-up on the incomplete surface", ok,
         f"t_escape={res['t_escape']} ode={res['ode_residual']:.2e}")


def test_geodesic_map_transfer(capsys):
    r = run_suite("geodesic-map")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["identity_pair_mismatch"] <= 1e-6
          and res["control_mismatch"] > 0.1)
    gate(capsys, "geodesic map with constant-curvature transfer", ok,
         f"pair={res['identity_pair_mismatch']:.2e} control={res['control_mismatch']:.2f}")


def test_jacobi_cross_validation(capsys):
    r = run_suite("jacobi")
    res = r["residuals"]
    ok = (r["verdict"] == "pass"
          and res["oracle_discrepancy"] <= 1e-4
          and res["sinh_error"] <= 1e-4)
    gate(capsys, "Jacobi field ODE vs variation oracle", ok,
         f"disc={res['oracle_discrepancy']:.2e} sinh={res['sinh_error']:.2e}")


def test_integrator_order(capsys):
    r = run_suite("integrator-order")
    res = r["residuals"]
    ratios = res["transport_ratios"] + res["development_ratios"]
    ok = r["verdict"] == "pass" and all(x >= 12.0 for x in ratios)
    gate(capsys, "fourth-order convergence of the integrators", ok,
         f"ratios={[round(x, 1) for x in ratios]}")
