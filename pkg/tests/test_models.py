"""Geometry construction: catalog models, coframes, serialization."""

import numpy as np
import pytest

from cartanlib import (
    Domain,
    OutOfChart,
    SignatureError,
    UnknownModel,
    build_gauge_from_metric,
    catalog,
    geometry_from_dict,
    geometry_to_dict,
)
from cartanlib.models import CATALOG_NAMES, signature_matrix


MUTATION_NAMES = ("euclidean:2", "euclidean:3", "hyperbolic:2", "hyperbolic:3",
                  "hyperbolic-klein:2", "affine:2", "sl2xh")


def test_catalog_mutations_validate():
    for name in MUTATION_NAMES:
        geom = catalog(name)
        report = geom.validate()
        assert report.passed, (name, report.to_dict())


def test_klein_flags():
    assert catalog("euclidean:2").klein
    assert catalog("hyperbolic-klein:2").klein
    assert catalog("sl2xh").klein
    assert not catalog("hyperbolic:2").klein


def test_unknown_model():
    with pytest.raises(UnknownModel):
        catalog("dodecahedral:7")


def test_signature_matrix():
    assert np.allclose(signature_matrix(1, 2), np.diag([1.0, -1.0, -1.0]))


@pytest.mark.parametrize("name", ["sphere:2", "clifton-pohl"])
def test_coframe_factorizes_metric(name):
    geom = catalog(name)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = geom.domain.sample(rng)
        E = geom.coframe(x)
        g = geom.metric.value(x)
        assert np.max(np.abs(E.T @ geom.eta @ E - g)) < 1e-10


def test_frame_data_matches_slow_path():
    geom = catalog("clifton-pohl")
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = geom.domain.sample(rng)
        E, W = geom.frame_data(x)
        assert np.max(np.abs(E - geom.coframe(x))) < 1e-12
        assert np.max(np.abs(W - geom.frame_connection(x))) < 1e-6


def test_chart_domain_hard_fails():
    geom = catalog("sphere:2")
    with pytest.raises(OutOfChart):
        geom.point(np.array([0.0, 0.0]))    # at the coordinate pole
    with pytest.raises(OutOfChart):
        geom.gauge_value(np.array([10.0, 0.0]), np.array([1.0, 0.0]))


def test_clifton_pohl_origin_excluded():
    geom = catalog("clifton-pohl")
    assert not geom.domain.contains(np.array([0.0, 0.0]))
    assert geom.domain.contains(np.array([1.0, 0.0]))


def test_h_projection_is_signature_orthogonal():
    geom = catalog("clifton-pohl")
    rng = np.random.default_rng(2)
    for _ in range(5):
        h = geom.random_point(rng).h
        assert np.max(np.abs(h.T @ geom.eta @ h - geom.eta)) < 1e-10


def test_gauge_build_rejects_wrong_signature():
    with pytest.raises(SignatureError):
        build_gauge_from_metric(
            [["1", "0"], ["0", "1"]],
            signature=(1, 1),
            domain=Domain(box=[[-1, 1], [-1, 1]]),
        )


def test_mutation_json_round_trip():
    geom = catalog("hyperbolic:2")
    clone = geometry_from_dict(geometry_to_dict(geom))
    assert clone.kind == "mutation"
    rng = np.random.default_rng(3)
    X = clone.model.embed_m(rng.standard_normal(clone.model.dim_m))
    p = geom.random_point(rng)
    pdot = p @ clone.bundle_matrix(X)
    a = geom.connection_at(p, pdot).coords
    b = clone.connection_at(p, pdot).coords
    assert np.max(np.abs(a - b)) < 1e-12


def test_gauge_json_round_trip():
    geom = catalog("sphere:2")
    clone = geometry_from_dict(geometry_to_dict(geom))
    x = np.array([1.2, 0.3])
    assert np.max(np.abs(clone.coframe(x) - geom.coframe(x))) < 1e-12
    assert clone.signature == geom.signature


def test_catalog_lists_all_model_families():
    joined = " ".join(CATALOG_NAMES)
    for frag in ("euclidean", "hyperbolic", "sphere:2", "affine", "sl2xh",
                 "clifton-pohl"):
        assert frag in joined
