"""Curvature, torsion, covariant derivatives, and the structure identities."""

import numpy as np
import pytest

from cartanlib import (
    EquivariantField,
    Unsupported,
    catalog,
    check_structure_identities,
    constant_curvature_probe,
    covariant_derivative,
    curvature,
    star_identity_residual,
    torsion,
)


def test_hyperbolic_curvature_values():
    geom = catalog("hyperbolic:2")
    pair = geom.model
    e1 = pair.embed_m([1.0, 0.0])
    e2 = pair.embed_m([0.0, 1.0])
    val = curvature(geom, geom.identity(), e1, e2)
    assert np.max(np.abs(val.m_compressed)) < 1e-12      # torsion-free
    assert val.h_compressed == pytest.approx([-1.0])     # constant -1


def test_curvature_antisymmetry_and_bilinearity():
    geom = catalog("hyperbolic:3")
    pair = geom.model
    rng = np.random.default_rng(0)
    X = pair.embed_m(rng.standard_normal(pair.dim_m))
    Y = pair.embed_m(rng.standard_normal(pair.dim_m))
    p = geom.random_point(rng)
    a = curvature(geom, p, X, Y).coords
    b = curvature(geom, p, Y, X).coords
    assert np.max(np.abs(a + b)) < 1e-12
    c = curvature(geom, p, 2.0 * X, Y).coords
    assert np.max(np.abs(c - 2.0 * a)) < 1e-12


def test_klein_models_are_flat():
    rng = np.random.default_rng(1)
    for name in ("euclidean:2", "hyperbolic-klein:2", "affine:2", "sl2xh"):
        geom = catalog(name)
        pair = geom.model
        X = pair.embed_m(rng.standard_normal(pair.dim_m))
        Y = pair.embed_m(rng.standard_normal(pair.dim_m))
        val = curvature(geom, geom.random_point(rng), X, Y)
        assert np.max(np.abs(val.coords)) < 1e-12, name


def test_sphere_constant_positive_curvature():
    geom = catalog("sphere:2")
    pair = geom.model
    e1 = pair.embed_m([1.0, 0.0])
    e2 = pair.embed_m([0.0, 1.0])
    rng = np.random.default_rng(2)
    p = geom.random_point(rng)
    val = curvature(geom, p, e1, e2)
    # opposite sign from the hyperbolic model at unit radius
    assert val.h_compressed == pytest.approx([1.0], abs=1e-6)
    assert np.max(np.abs(val.m_compressed)) < 1e-6
    probe = constant_curvature_probe(geom, n_samples=10, seed=2)
    assert probe.constant, probe.max_deviation


def test_torsion_is_m_part():
    geom = catalog("hyperbolic:2")
    pair = geom.model
    e1 = pair.embed_m([1.0, 0.0])
    e2 = pair.embed_m([0.0, 1.0])
    t = torsion(geom, geom.identity(), e1, e2)
    assert np.max(np.abs(t)) < 1e-12


def test_covariant_derivative_constant_field_closed_form():
    geom = catalog("hyperbolic:2")
    pair = geom.model
    rng = np.random.default_rng(3)
    p = geom.random_point(rng)
    Y = pair.embed_m(rng.standard_normal(pair.dim_m))
    X = pair.embed_m(rng.standard_normal(pair.dim_m))
    fld = EquivariantField.constant_field(pair, Y)
    fast = covariant_derivative(geom, p, X, fld)
    slow = covariant_derivative(geom, p, X, fld, use_closed_form=False)
    assert np.max(np.abs(fast - slow)) < 1e-8


def test_conjugation_field_equivariance():
    geom = catalog("hyperbolic:2")
    rng = np.random.default_rng(4)
    M0 = geom.bundle_algebra.to_matrix(
        rng.standard_normal(geom.bundle_algebra.dim)
    )
    fld = EquivariantField.from_conjugation(geom, M0)
    assert fld.equivariance_residual(geom, rng) < 1e-10


def test_vertical_derivative_relation():
    geom = catalog("hyperbolic:2")
    pair = geom.model
    rng = np.random.default_rng(5)
    M0 = geom.bundle_algebra.to_matrix(rng.standard_normal(geom.bundle_algebra.dim))
    fld = EquivariantField.from_conjugation(geom, M0)
    p = geom.random_point(rng)
    xi = pair.embed_h(rng.standard_normal(pair.dim_h))
    assert star_identity_residual(geom, p, xi, fld) < 1e-7


def test_structure_identities_tight():
    rng = np.random.default_rng(6)
    for name in ("euclidean:2", "hyperbolic:2"):
        geom = catalog(name)
        pair = geom.model
        p = geom.random_point(rng)
        X = pair.embed_m(rng.standard_normal(pair.dim_m))
        Y = pair.embed_m(rng.standard_normal(pair.dim_m))
        Z = pair.embed_m(rng.standard_normal(pair.dim_m))
        rep = check_structure_identities(geom, p, X, Y, Z)
        assert rep.residual1 < 1e-7, name
        assert rep.residual2 < 1e-7, name


def test_structure_identities_reject_gauge():
    geom = catalog("sphere:2")
    pair = geom.model
    z = np.zeros(pair.g.dim)
    with pytest.raises(Unsupported):
        check_structure_identities(geom, None, z, z, z)
