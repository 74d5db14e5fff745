"""Curvature, torsion, and the covariant derivative.

Curvature convention: [w,w](u,v) = 2[w(u),w(v)], so the curvature 2-form is
dw + [w(u),w(v)] on a tangent pair.  For mutation geometries this gives the
point-independent closed form

    Omega(w^-1 X, w^-1 Y) = [X,Y]_g - sigma([sigma^-1 X, sigma^-1 Y])

while for gauge geometries the section pullback F = dA + [A(u),A(v)] is
differentiated numerically and Ad-translated to the queried bundle point.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FieldError, Unsupported
from .lie_core import adjoint, as_coords
from .models import GaugePoint

FD_STEP = 1e-5  # 4th-order central stencils


def _fd4(values, h):
    """4th-order central difference from samples at (-2h,-h,+h,+2h)."""
    m2, m1, p1, p2 = values
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)


@dataclass(frozen=True)
class CurvatureValue:
    """Curvature split into its torsion (m) and h components."""

    omega_m: np.ndarray   # full-length coords, supported on m
    omega_h: np.ndarray   # full-length coords, supported on h
    pair: object

    @property
    def coords(self):
        return self.omega_m + self.omega_h

    @property
    def vector(self):
        return self.pair.vector(self.coords)

    @property
    def m_compressed(self):
        return self.pair.m_coords(self.omega_m)

    @property
    def h_compressed(self):
        return self.pair.h_coords(self.omega_h)


def mutation_curvature_coords(geometry, X, Y):
    x, y = as_coords(X), as_coords(Y)
    g = geometry.model.g
    lhs = g.bracket_coords(x, y)
    rhs = geometry.sigma @ geometry.bundle_algebra.bracket_coords(
        geometry.sigma_inv @ x, geometry.sigma_inv @ y
    )
    return lhs - rhs


def _gauge_frame_chart_velocity(geometry, point, X):
    """Chart velocity of the frame field w^-1(X) at a gauge point."""
    pair = geometry.model
    Hbig = geometry.embed_H(point.h)
    adX = adjoint(Hbig, as_coords(X), pair.g, tol=1e-6).coords
    E = geometry.coframe(point.x)
    return np.linalg.solve(E, pair.m_coords(adX))


def gauge_section_curvature(geometry, x, h_step=1e-3):
    """F_x(e_i, e_j) = dA + [A,A] on chart coordinate pairs.

    Returns F[i,j,:] as full g-coordinates.
    """
    d = geometry.chart_dim
    k = geometry.model.g.dim
    A = np.empty((d, d, k))        # A[j] = A_x(e_j) coords as function of x, at x
    dA = np.empty((d, d, k))       # dA[i,j] = d/dx_i A(e_j)
    eye = np.eye(d)
    for j in range(d):
        A[0, j] = geometry.gauge_value(x, eye[j]).coords
    for i in range(d):
        h = h_step * max(1.0, abs(x[i]))
        samples = []
        for off in (-2.0, -1.0, 1.0, 2.0):
            xs = np.array(x, dtype=float)
            xs[i] += off * h
            samples.append(
                np.array(
                    [geometry.gauge_value(xs, eye[j]).coords for j in range(d)]
                )
            )
        dA[i] = _fd4(samples, h)
    F = np.empty((d, d, k))
    g = geometry.model.g
    for i in range(d):
        for j in range(d):
            F[i, j] = (
                dA[i, j]
                - dA[j, i]
                + g.bracket_coords(A[0, i], A[0, j])
            )
    return F


def curvature(geometry, point, X, Y):
    """Omega evaluated on the frame fields w^-1(X), w^-1(Y) at `point`."""
    pair = geometry.model
    if geometry.kind == "mutation":
        coords = mutation_curvature_coords(geometry, X, Y)
    else:
        geometry.require_in_domain(point.x)
        u = _gauge_frame_chart_velocity(geometry, point, X)
        v = _gauge_frame_chart_velocity(geometry, point, Y)
        F = gauge_section_curvature(geometry, point.x)
        Fuv = np.einsum("i,j,ijk->k", u, v, F)
        Hinv = np.linalg.inv(geometry.embed_H(point.h))
        coords = adjoint(Hinv, Fuv, pair.g, tol=1e-5).coords
    return CurvatureValue(pair.m_project(coords), pair.h_project(coords), pair)


def torsion(geometry, point, X, Y):
    """m-part of the curvature (the reductive identification of q o Omega)."""
    return curvature(geometry, point, X, Y).omega_m


@dataclass
class ProbeReport:
    max_deviation: float
    constant: bool
    tolerance: float
    n_samples: int
    seed: int
    per_pair: dict

    def to_dict(self):
        return {
            "verdict": "constant" if self.constant else "non-constant",
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _random_points(geometry, rng, n):
    if geometry.kind == "mutation":
        return [geometry.random_point(rng) for _ in range(n)]
    return [geometry.random_point(rng) for _ in range(n)]


def constant_curvature_probe(geometry, n_samples=10, seed=0, tol=1e-6, basis_pairs=None):
    """Sample Omega on frame-field basis pairs at random bundle points and
    report the maximum pairwise deviation."""
    if n_samples < 2:
        raise ValueError("need at least two sample points")
    pair = geometry.model
    k = pair.g.dim
    if basis_pairs is None:
        m = list(pair.m_indices)
        basis_pairs = [(m[i], m[j]) for i in range(len(m)) for j in range(i + 1, len(m))]
        if not basis_pairs:
            basis_pairs = [(0, 1)]
    rng = np.random.default_rng(seed)
    points = _random_points(geometry, rng, n_samples)
    eye = np.eye(k)
    per_pair = {}
    max_dev = 0.0
    for (i, j) in basis_pairs:
        vals = np.array(
            [curvature(geometry, p, eye[i], eye[j]).coords for p in points]
        )
        dev = float(np.max(np.abs(vals - vals[0])))
        per_pair[(i, j)] = dev
        max_dev = max(max_dev, dev)
    return ProbeReport(max_dev, max_dev <= tol, tol, n_samples, seed, per_pair)


class EquivariantField:
    """m-valued function on the bundle, standing in for a base vector field.

    `fn` maps a bundle point to full g-coordinates supported on m.  Constant
    fields short-circuit the derivative term of the covariant derivative.
    """

    def __init__(self, pair, fn, constant=None):
        self.pair = pair
        self.fn = fn
        self.constant = constant

    @classmethod
    def constant_field(cls, pair, Y0):
        Y0 = pair.m_project(as_coords(Y0))
        return cls(pair, lambda p: Y0, constant=Y0)

    @classmethod
    def from_conjugation(cls, geometry, M0):
        """Equivariant field p -> m-part of sigma(coords(p^-1 M0 p)).

        Equivariance follows from sigma's Ad_H-intertwining and the
        Ad-invariance of the reductive split.
        """
        if geometry.kind != "mutation":
            raise Unsupported("conjugation fields need a mutation geometry")
        M0 = np.asarray(M0, dtype=float)
        balg = geometry.bundle_algebra
        pair = geometry.model

        def fn(p):
            conj = np.linalg.solve(p, M0 @ p)
            return pair.m_project(geometry.sigma @ balg.to_coords(conj, tol=1e-6))

        return cls(pair, fn)

    def __call__(self, point):
        try:
            return self.fn(point)
        except Exception as exc:   # noqa: BLE001 - wrapped for the caller
            raise FieldError(f"field evaluation failed: {exc}") from exc

    def equivariance_residual(self, geometry, rng, n_samples=10):
        res = 0.0
        for _ in range(n_samples):
            p = geometry.random_point(rng)
            theta = rng.standard_normal(self.pair.dim_h)
            h_P, h_G = geometry.h_element(theta)
            lhs = self(p @ h_P)
            rhs = self.pair.m_project(
                adjoint(np.linalg.inv(h_G), self(p), self.pair.g).coords
            )
            res = max(res, float(np.max(np.abs(lhs - rhs))))
        return res


def _flow(geometry, point, xi, t):
    """Flow of the frame field w^-1(xi) from `point` for time t."""
    if geometry.kind == "mutation":
        return geometry.frame_flow(point, xi, t)
    return _gauge_frame_flow(geometry, point, xi, t)


def _gauge_frame_flow(geometry, point, xi, t, n_steps=2):
    """RK4 on (x, h) for the constant-omega field w^-1(xi)."""
    xi = as_coords(xi)
    pair = geometry.model

    def rhs(x, h):
        Hbig = geometry.embed_H(h)
        ad = adjoint(Hbig, xi, pair.g, tol=1e-5).coords
        E = geometry.coframe(x)
        xdot = np.linalg.solve(E, pair.m_coords(ad))
        A = geometry.gauge_value(x, xdot)
        Hinv = np.linalg.inv(Hbig)
        vert_target = pair.h_project(xi)
        adA = adjoint(Hinv, A.coords, pair.g, tol=1e-5).coords
        small = pair.h_coords(vert_target - pair.h_project(adA))
        w = np.einsum("k,kab->ab", small, geometry.h_small)
        hdot = h @ w
        return xdot, hdot

    x = np.array(point.x, dtype=float)
    h = np.array(point.h, dtype=float)
    dt = t / n_steps
    for _ in range(n_steps):
        k1x, k1h = rhs(x, h)
        k2x, k2h = rhs(x + 0.5 * dt * k1x, h + 0.5 * dt * k1h)
        k3x, k3h = rhs(x + 0.5 * dt * k2x, h + 0.5 * dt * k2h)
        k4x, k4h = rhs(x + dt * k3x, h + dt * k3h)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        h = h + dt / 6.0 * (k1h + 2 * k2h + 2 * k3h + k4h)
    return GaugePoint(x, h)


def covariant_derivative(geometry, point, direction, fld, h=FD_STEP,
                         use_closed_form=True):
    """nabla of an m-valued field along a g-direction at a bundle point.

    Central 4th-order difference of the field along the frame-field flow of
    the direction, minus the vertical correction [F(p), xi_h].  For constant
    fields the derivative term is identically zero and the bracket term is
    returned directly.
    """
    pair = geometry.model
    xi = as_coords(direction)
    if fld.constant is not None and use_closed_form:
        deriv = np.zeros(pair.g.dim)
    else:
        samples = [
            fld(_flow(geometry, point, xi, off * h))
            for off in (-2.0, -1.0, 1.0, 2.0)
        ]
        deriv = _fd4(samples, h)
    corr = pair.g.bracket_coords(fld(point), pair.h_project(xi))
    return pair.m_project(deriv - corr)


def star_identity_residual(geometry, point, xi_h, fld, h=FD_STEP):
    """Residual of the vertical-derivative relation: the derivative of an
    equivariant field along a vertical flow equals [F(p), xi]."""
    pair = geometry.model
    xi = pair.h_project(as_coords(xi_h))
    samples = [
        fld(_flow(geometry, point, xi, off * h))
        for off in (-2.0, -1.0, 1.0, 2.0)
    ]
    deriv = _fd4(samples, h)
    expected = pair.g.bracket_coords(fld(point), xi)
    return float(np.max(np.abs(pair.m_project(deriv - expected))))


@dataclass
class ResidualReport:
    identity1_lhs: np.ndarray
    identity1_rhs: np.ndarray
    identity2_lhs: np.ndarray
    identity2_rhs: np.ndarray

    @property
    def residual1(self):
        return float(np.max(np.abs(self.identity1_lhs - self.identity1_rhs)))

    @property
    def residual2(self):
        return float(np.max(np.abs(self.identity2_lhs - self.identity2_rhs)))


def check_structure_identities(geometry, point, X, Y, Z, h=FD_STEP):
    """Two-sided check of the curvature identities for the covariant
    derivative, with left-invariant frame lifts.

    Left sides go through the finite-difference covariant derivative; right
    sides through structure constants and the curvature closed form.
    """
    if geometry.kind != "mutation":
        raise Unsupported("structure identities need frame-field lifts "
                          "(mutation geometries only)")
    pair = geometry.model
    g = pair.g
    X, Y, Z = as_coords(X), as_coords(Y), as_coords(Z)
    Xm, Ym = pair.m_project(X), pair.m_project(Y)

    fld_X = EquivariantField.constant_field(pair, X)
    fld_Y = EquivariantField.constant_field(pair, Y)
    fld_Z = EquivariantField.constant_field(pair, Z)

    # lift of the frame-field bracket: [w^-1 X, w^-1 Y] = w^-1(W)
    W = geometry.sigma @ geometry.bundle_algebra.bracket_coords(
        geometry.sigma_inv @ X, geometry.sigma_inv @ Y
    )

    nab_XY = covariant_derivative(geometry, point, X, fld_Y, h=h,
                                  use_closed_form=False)
    nab_YX = covariant_derivative(geometry, point, Y, fld_X, h=h,
                                  use_closed_form=False)
    id1_lhs = nab_XY - nab_YX - pair.m_project(W)
    K = mutation_curvature_coords(geometry, X, Y)
    id1_rhs = pair.m_project(K) - pair.m_project(g.bracket_coords(Xm, Ym))

    def field_nab(direction):
        const = EquivariantField.constant_field(pair, Z)
        return EquivariantField(
            pair,
            lambda p: covariant_derivative(geometry, p, direction, const, h=h),
        )

    nab_X_nab_YZ = covariant_derivative(geometry, point, X, field_nab(Y), h=h)
    nab_Y_nab_XZ = covariant_derivative(geometry, point, Y, field_nab(X), h=h)
    nab_WZ = covariant_derivative(geometry, point, W, fld_Z, h=h,
                                  use_closed_form=False)
    id2_lhs = nab_X_nab_YZ - nab_Y_nab_XZ - nab_WZ

    K_YX = mutation_curvature_coords(geometry, Y, X)
    inner = pair.h_project(K_YX) - pair.h_project(g.bracket_coords(Ym, Xm))
    id2_rhs = pair.m_project(g.bracket_coords(pair.m_project(Z), inner))
    return ResidualReport(id1_lhs, id1_rhs, id2_lhs, id2_rhs)
