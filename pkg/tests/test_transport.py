"""Geodesics, traces, parallel transport, developments, Jacobi fields."""

import numpy as np
import pytest

from cartanlib import (
    GeodesicSpec,
    InvalidDimension,
    JacobiState,
    Status,
    Trace,
    Unsupported,
    catalog,
    develop,
    geodesic,
    geodesic_lift_curve,
    group_exp,
    jacobi_field,
    parallel_transport,
)
from cartanlib.lie_core import adjoint


def hyperbolic_closed_form(v, t):
    v = np.asarray(v, dtype=float)
    n = len(v)
    X = np.zeros((n + 1, n + 1))
    X[0, 1:] = v
    X[1:, 0] = v
    r = np.linalg.norm(v)
    return (np.eye(n + 1) + np.sinh(t * r) / r * X
            + (np.cosh(t * r) - 1.0) / r**2 * (X @ X))


def test_exact_geodesic_matches_closed_form():
    geom = catalog("hyperbolic:2")
    v = np.array([0.8, -0.6])
    tr = geodesic(GeodesicSpec(geom, geom.identity(), v, (0.0, 2.0), 0.25))
    for s in tr.samples:
        want = hyperbolic_closed_form(v, s.t)
        assert np.max(np.abs(s.frame.reshape(3, 3) - want)) < 1e-10


def test_rk4_route_converges_to_exact():
    geom = catalog("hyperbolic-klein:2")
    v = np.array([1.0, 0.5])
    exact = geodesic(GeodesicSpec(geom, geom.identity(), v, (0.0, 1.0), 0.5))
    errs = []
    for step in (1e-2, 5e-3):
        tr = geodesic(
            GeodesicSpec(geom, geom.identity(), v, (0.0, 1.0), step),
            method="rk4",
        )
        errs.append(np.max(np.abs(tr.final().frame - exact.final().frame)))
    assert errs[0] < 1e-8
    assert errs[0] / errs[1] > 12.0


def test_spec_validation():
    geom = catalog("hyperbolic:2")
    with pytest.raises(InvalidDimension):
        GeodesicSpec(geom, geom.identity(), [1.0, 0.0, 0.0])
    with pytest.raises(InvalidDimension):
        GeodesicSpec(geom, geom.identity(), [1.0, 0.0], (1.0, 0.0))
    with pytest.raises(InvalidDimension):
        GeodesicSpec(geom, geom.identity(), [1.0, 0.0], (0.0, 1.0), -0.1)


def test_unknown_method_rejected():
    geom = catalog("hyperbolic:2")
    spec = GeodesicSpec(geom, geom.identity(), [1.0, 0.0], (0.0, 1.0), 0.5)
    with pytest.raises(Unsupported):
        geodesic(spec, method="verlet")


def test_csv_round_trip_and_status_parse():
    geom = catalog("hyperbolic:2")
    tr = geodesic(GeodesicSpec(geom, geom.identity(), [1.0, 0.0], (0.0, 1.0), 0.25))
    text = tr.to_csv_text()
    header = text.splitlines()[0]
    assert header.startswith("t,x1,x2,x3,frame00")
    assert header.endswith("vel_m1,vel_m2")
    assert text.strip().endswith("# status=Completed")
    clone = Trace.from_csv_text(text)
    assert clone.status.kind == "Completed"
    for a, b in zip(tr.samples, clone.samples):
        assert a.t == b.t
        assert np.array_equal(a.frame, b.frame)   # byte-exact via repr

    assert Status.parse("BlowUp:t=0.25").t == 0.25
    assert Status.parse("LeftChart:t=1.5").kind == "LeftChart"


def test_sphere_great_circle_and_chart_exit():
    geom = catalog("sphere:2")
    start = geom.point(np.array([np.pi / 2, 0.0]))
    tr = geodesic(GeodesicSpec(geom, start, [1.0, 0.0], (0.0, 1.0), 0.01))
    assert tr.status.kind == "Completed"
    assert tr.final().base[0] == pytest.approx(np.pi / 2 + 1.0, abs=1e-10)
    tr2 = geodesic(GeodesicSpec(geom, start, [1.0, 0.0], (0.0, 2.0), 0.01))
    assert tr2.status.kind == "LeftChart"
    assert tr2.status.t < 2.0


def test_horizontal_transport_is_constant():
    geom = catalog("hyperbolic:2")
    curve = geodesic_lift_curve(geom, geom.identity(), [1.0, 0.0])
    v = np.array([0.3, -0.7])
    out = parallel_transport(geom, curve, v, 0.0, 2.0, step=1e-2)
    assert np.max(np.abs(out - v)) < 1e-12


def test_twisted_transport_matches_adjoint_oracle():
    geom = catalog("hyperbolic:2")
    pair = geom.model
    curve = geodesic_lift_curve(geom, geom.identity(), [1.0, 0.0],
                                lift_offset=[0.8])
    v = np.array([0.3, -0.7])
    out = parallel_transport(geom, curve, v, 0.0, 2.0, step=1e-2)
    C = pair.g.to_matrix(pair.embed_h([0.8]))
    want = pair.m_coords(
        adjoint(group_exp(-2.0 * C), pair.embed_m(v), pair.g).coords
    )
    assert np.max(np.abs(out - want)) < 1e-9


def test_transport_backwards_inverts_forwards():
    geom = catalog("hyperbolic:2")
    curve = geodesic_lift_curve(geom, geom.identity(), [0.5, 0.5],
                                lift_offset=[-0.4])
    v = np.array([1.0, 2.0])
    there = parallel_transport(geom, curve, v, 0.0, 1.0, step=1e-2)
    back = parallel_transport(geom, curve, there, 1.0, 0.0, step=1e-2)
    assert np.max(np.abs(back - v)) < 1e-9


def test_development_of_horizontal_geodesic():
    geom = catalog("hyperbolic:2")
    X = np.array([0.6, 0.3])
    curve = geodesic_lift_curve(geom, geom.identity(), X)
    dev = develop(geom, curve, 0.0, 2.0, step=1e-2)
    XG = geom.model.g.to_matrix(geom.model.embed_m(X))
    want = group_exp(2.0 * XG)
    assert np.max(np.abs(dev.final().frame.reshape(3, 3) - want)) < 1e-9


def test_jacobi_sinh_solution():
    geom = catalog("hyperbolic:2")
    spec = GeodesicSpec(geom, geom.identity(), [1.0, 0.0], (0.0, 2.0), 0.01)
    jt = jacobi_field(geom, spec, JacobiState([0.0, 0.0], [0.0, 1.0]),
                      step=0.01, oracle=False)
    assert np.max(np.abs(jt.J[:, 1] - np.sinh(jt.times))) < 1e-8
    assert np.max(np.abs(jt.J[:, 0])) < 1e-12


def test_jacobi_oracle_cross_check():
    geom = catalog("hyperbolic:2")
    spec = GeodesicSpec(geom, geom.identity(), [0.7, 0.7], (0.0, 1.5), 0.05)
    jt = jacobi_field(geom, spec, JacobiState([0.2, 0.1], [-0.3, 0.5]),
                      step=0.05)
    assert jt.oracle_discrepancy < 1e-5


def test_jacobi_rejects_gauge():
    geom = catalog("sphere:2")
    spec = GeodesicSpec(geom, geom.point(np.array([1.5, 0.0])),
                        [1.0, 0.0], (0.0, 1.0), 0.1)
    with pytest.raises(Unsupported):
        jacobi_field(geom, spec, JacobiState([0.0, 0.0], [0.0, 1.0]))
