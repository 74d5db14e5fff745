"""Verifier-level behavior: Trotter, completeness, connectivity, maps."""

import numpy as np
import pytest

from cartanlib import (
    Domain,
    GeodesicMapSpec,
    NoGeodesicFound,
    build_gauge_from_metric,
    catalog,
    completeness_report,
    connect_by_geodesic,
    group_exp,
    sl2_exp_reachable,
    trotter_probe,
    verify_geodesic_map,
)


def test_trotter_commuting_is_exact():
    geom = catalog("euclidean:2")
    g = geom.model.g
    mi = list(geom.model.m_indices)
    e0, e1 = np.eye(g.dim)[mi[0]], np.eye(g.dim)[mi[1]]
    errs = trotter_probe(g, e0, e1, 1.0, [1, 8])
    assert max(errs) < 1e-12


def test_trotter_first_order_decay():
    g = catalog("sl2xh").model.g
    nE, nF = np.eye(g.dim)[1], np.eye(g.dim)[2]
    errs = trotter_probe(g, nE, nF, 1.0, [64, 128, 256, 512])
    assert all(a > b for a, b in zip(errs, errs[1:]))
    for a, b in zip(errs, errs[1:]):
        assert 1.8 <= a / b <= 2.2


def test_trotter_n1_matches_bch_leading_term():
    g = catalog("sl2xh").model.g
    nE, nF = np.eye(g.dim)[1], np.eye(g.dim)[2]
    err = trotter_probe(g, nE, nF, 1.0, [1])[0]
    A, B = g.to_matrix(nE), g.to_matrix(nF)
    bch = np.linalg.norm(0.5 * (A @ B - B @ A), "fro")
    assert bch / 2 <= err <= bch * 2


def test_trotter_requires_ascending_n():
    g = catalog("sl2xh").model.g
    with pytest.raises(ValueError):
        trotter_probe(g, np.eye(g.dim)[1], np.eye(g.dim)[2], 1.0, [8, 4])


def test_mutation_models_complete():
    for name in ("hyperbolic:2", "euclidean:2", "sl2xh"):
        rep = completeness_report(catalog(name), horizon=50.0,
                                  n_directions=4, seed=0)
        assert rep.verdict == "CompleteUpToHorizon", name
        assert rep.witness is None
        d = rep.to_dict()
        assert d["verdict"] == "CompleteUpToHorizon"
        assert d["witnesses"] == []


def test_punctured_box_gauge_model_incomplete():
    geom = build_gauge_from_metric(
        [["1", "0"], ["0", "1"]],
        signature=(2, 0),
        domain=Domain(box=[[-1.0, 1.0], [-1.0, 1.0]],
                      sample_box=[[-0.5, 0.5], [-0.5, 0.5]]),
        name="boxed-plane",
    )
    rep = completeness_report(geom, horizon=5.0, n_directions=4, seed=0,
                              step=1e-2)
    assert rep.verdict == "IncompleteWitness"
    assert rep.witness.status == "LeftChart"
    assert rep.witness.max_time < 5.0


def test_clifton_pohl_incompleteness_witness():
    rep = completeness_report(catalog("clifton-pohl"), horizon=2.0,
                              n_directions=2, seed=0, step=1e-3)
    assert rep.verdict == "IncompleteWitness"
    assert rep.witness.status in ("BlowUp", "LeftChart")
    assert rep.to_dict()["witnesses"]


def test_connect_trivial_and_diagonal():
    geom = catalog("hyperbolic-klein:2")
    X = connect_by_geodesic(geom, geom.identity(), geom.identity())
    assert np.max(np.abs(X)) < 1e-12

    sl2 = catalog("sl2xh")
    q = np.eye(4)
    q[:2, :2] = np.diag([2.0, 0.5])
    X = connect_by_geodesic(sl2, np.eye(4), q)
    assert X[0] == pytest.approx(np.log(2.0), abs=1e-10)


def test_connect_reverifies():
    geom = catalog("hyperbolic-klein:2")
    rng = np.random.default_rng(0)
    pair = geom.model
    for _ in range(5):
        X0 = rng.standard_normal(pair.dim_m)
        h = group_exp(pair.g.to_matrix(pair.embed_h(rng.standard_normal(pair.dim_h))))
        q = group_exp(pair.g.to_matrix(pair.embed_m(X0))) @ h
        X = connect_by_geodesic(geom, np.eye(3), q)
        got = group_exp(pair.g.to_matrix(pair.embed_m(X)))
        # same coset: got^-1 q must lie in H (upper-left row/column split)
        rel = np.linalg.solve(got, q)
        assert np.max(np.abs(rel @ geom.base_projection(np.eye(3))
                             - geom.base_projection(np.eye(3)))) < 1e-7


def test_connect_budget_exhaustion():
    sl2 = catalog("sl2xh")
    bad = np.eye(4)
    bad[:2, :2] = [[-1.0, 1.0], [0.0, -1.0]]
    with pytest.raises(NoGeodesicFound) as exc:
        connect_by_geodesic(sl2, np.eye(4), bad)
    assert exc.value.budget["n_h_samples"] == 256


def test_sl2_reachability_trace_analysis():
    assert sl2_exp_reachable(np.eye(2))
    assert sl2_exp_reachable(-np.eye(2))
    assert sl2_exp_reachable(np.diag([3.0, 1.0 / 3.0]))
    assert sl2_exp_reachable(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert not sl2_exp_reachable(np.array([[-1.0, 1.0], [0.0, -1.0]]))
    assert not sl2_exp_reachable(np.diag([-3.0, -1.0 / 3.0]))


def test_geodesic_map_identity_pair():
    hk = catalog("hyperbolic-klein:2")
    hy = catalog("hyperbolic:2")
    spec = GeodesicMapSpec(hk, hy, np.eye(2), lambda p: hy.identity())
    rep = verify_geodesic_map(spec, n_geodesics=6, curvature_samples=10)
    assert rep.is_geodesic_map
    assert rep.max_mismatch < 1e-10
    assert rep.source_constant_curvature and rep.target_constant_curvature
    assert rep.curvature_transfer_consistent


def test_geodesic_map_control_fails():
    hy = catalog("hyperbolic:2")
    eu = catalog("euclidean:2")
    spec = GeodesicMapSpec(hy, eu, np.eye(2), lambda p: eu.identity(),
                           coordinate_map=lambda x: x[1:])
    rep = verify_geodesic_map(spec, n_geodesics=6, curvature_samples=10)
    assert not rep.is_geodesic_map
    assert rep.max_mismatch > 0.1
    assert rep.curvature_transfer_consistent   # vacuously: map failed


def test_geodesic_map_symmetric_verdict():
    hk = catalog("hyperbolic-klein:2")
    hy = catalog("hyperbolic:2")
    fwd = GeodesicMapSpec(hk, hy, np.eye(2), lambda p: hy.identity())
    rev = GeodesicMapSpec(hy, hk, np.eye(2), lambda p: hk.identity())
    a = verify_geodesic_map(fwd, n_geodesics=4, curvature_samples=10)
    b = verify_geodesic_map(rev, n_geodesics=4, curvature_samples=10)
    assert a.is_geodesic_map == b.is_geodesic_map
