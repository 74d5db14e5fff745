"""Concrete reductive Cartan geometries.

Two representations are supported.  A *mutation* geometry is a matrix bundle
group P together with a linear isomorphism sigma from Lie(P) onto a model
algebra g; the connection form is sigma composed with the Maurer-Cartan form
of P (sigma = id gives a Klein geometry).  A *gauge* geometry is a single
chart U in R^d carrying a g-valued connection form built from a metric: a
signature-orthonormal coframe plus the metric-compatible torsion-free
h-connection in that coframe.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import lie_core
from .errors import (
    DegenerateMetric,
    DomainError,
    InvalidDimension,
    InvalidMutation,
    NotAnIsomorphism,
    NotInAlgebra,
    OutOfChart,
    SignatureError,
    UnknownModel,
)
from .expressions import parse_expression
from .lie_core import (
    AlgebraVector,
    MatrixAlgebra,
    ModelPair,
    adjoint,
    as_coords,
    group_exp,
)


# ---------------------------------------------------------------------------
# algebra builders

def signature_matrix(p, q):
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)]))


def iso_algebra(p, q, name=None):
    """Lie algebra of R^d x| O(p,q) in the (d+1)x(d+1) affine representation.

    Basis order: translations first (the m-subbasis), then the o(p,q)
    generators K_ab (a < b, lexicographic) in the upper-left block.
    """
    d = p + q
    eta = signature_matrix(p, q)
    basis = []
    for i in range(d):
        T = np.zeros((d + 1, d + 1))
        T[i, d] = 1.0
        basis.append(T)
    for a in range(d):
        for b in range(a + 1, d):
            K = np.zeros((d + 1, d + 1))
            K[a, b] = 1.0
            K[b, a] = -eta[a, a] * eta[b, b]
            basis.append(K)
    if name is None:
        name = f"iso({p},{q})"
    return MatrixAlgebra.from_basis(name, np.array(basis))


def lorentz_algebra(n, name=None):
    """o(1,n) in the (n+1)x(n+1) representation, time coordinate first.

    Basis order: boosts B_1..B_n, then rotations R_ab (1 <= a < b <= n).
    Matches the basis order of iso_algebra(n, 0), so the block-extraction
    map (v, X) is the identity on coordinates.
    """
    basis = []
    for i in range(1, n + 1):
        B = np.zeros((n + 1, n + 1))
        B[0, i] = 1.0
        B[i, 0] = 1.0
        basis.append(B)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            R = np.zeros((n + 1, n + 1))
            R[a, b] = 1.0
            R[b, a] = -1.0
            basis.append(R)
    if name is None:
        name = f"o+(1,{n})"
    return MatrixAlgebra.from_basis(name, np.array(basis))


def affine_algebra(n):
    """Lie algebra of R^n x| GL_n(R): translations then the full gl_n block."""
    basis = []
    for i in range(n):
        T = np.zeros((n + 1, n + 1))
        T[i, n] = 1.0
        basis.append(T)
    for a in range(n):
        for b in range(n):
            E = np.zeros((n + 1, n + 1))
            E[a, b] = 1.0
            basis.append(E)
    return MatrixAlgebra.from_basis(f"aff({n})", np.array(basis))


def sl2xso2_algebra():
    """sl(2,R) (+) so(2) as 4x4 block-diagonal matrices; sl2 block first."""
    H = np.zeros((4, 4))
    H[0, 0], H[1, 1] = 1.0, -1.0
    E = np.zeros((4, 4))
    E[0, 1] = 1.0
    F = np.zeros((4, 4))
    F[1, 0] = 1.0
    J = np.zeros((4, 4))
    J[2, 3], J[3, 2] = 1.0, -1.0
    return MatrixAlgebra.from_basis("sl2xso2", np.array([H, E, F, J]))


# ---------------------------------------------------------------------------
# group retractions

def polar_orthogonal(R):
    u, _, vt = np.linalg.svd(R)
    return u @ vt


def polar_indefinite(M, eta, iters=3):
    """Newton iteration toward M^T eta M = eta (generalized polar factor)."""
    X = np.asarray(M, dtype=float)
    for _ in range(iters):
        X = 0.5 * (X + eta @ np.linalg.inv(X).T @ eta)
    return X


def project_affine(M, eta):
    """Retract onto R^d x| O(p,q): fix the last row, retract the block."""
    M = np.array(M, dtype=float)
    d = M.shape[0] - 1
    if np.allclose(eta, np.eye(d)):
        M[:d, :d] = polar_orthogonal(M[:d, :d])
    else:
        M[:d, :d] = polar_indefinite(M[:d, :d], eta)
    M[d, :d] = 0.0
    M[d, d] = 1.0
    return M


def project_affine_gl(M):
    M = np.array(M, dtype=float)
    d = M.shape[0] - 1
    M[d, :d] = 0.0
    M[d, d] = 1.0
    return M


def project_lorentz(M, n):
    eta = np.diag(np.concatenate([[-1.0], np.ones(n)]))
    M = polar_indefinite(M, eta)
    # stay in the orthochronous component
    if M[0, 0] < 0:
        raise lie_core.NumericalFailure("left the orthochronous component")
    return M


def project_sl2xso2(M):
    M = np.array(M, dtype=float)
    A = M[:2, :2]
    det = np.linalg.det(A)
    if det <= 0:
        raise lie_core.NumericalFailure("SL2 block degenerated")
    M[:2, :2] = A / np.sqrt(det)
    M[2:, 2:] = polar_orthogonal(M[2:, 2:])
    M[:2, 2:] = 0.0
    M[2:, :2] = 0.0
    return M


# ---------------------------------------------------------------------------
# chart domains

@dataclass(frozen=True)
class Domain:
    """Valid chart region: a coordinate box, an optional predicate, and a
    bounded region used when sampling random chart points."""

    box: np.ndarray = None            # (d, 2)
    predicate: object = None          # callable x -> bool, not serialized
    sample_box: np.ndarray = None

    def __post_init__(self):
        if self.box is not None:
            object.__setattr__(self, "box", np.asarray(self.box, dtype=float))
        sb = self.sample_box if self.sample_box is not None else self.box
        if sb is not None:
            object.__setattr__(self, "sample_box", np.asarray(sb, dtype=float))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            return False
        if self.box is not None:
            if np.any(x < self.box[:, 0]) or np.any(x > self.box[:, 1]):
                return False
        if self.predicate is not None and not self.predicate(x):
            return False
        return True

    def sample(self, rng, n=1):
        sb = self.sample_box
        if sb is None:
            raise DomainError("domain has no sampling box")
        out = []
        while len(out) < n:
            x = rng.uniform(sb[:, 0], sb[:, 1])
            if self.contains(x):
                out.append(x)
        return out if n > 1 else out[0]


# ---------------------------------------------------------------------------
# mutation geometries

@dataclass
class MutationGeometry:
    """Connection omega = sigma o (Maurer-Cartan of the bundle group P)."""

    name: str
    bundle_algebra: MatrixAlgebra
    model: ModelPair
    sigma: np.ndarray          # coords Lie(P) -> coords g
    sigma_inv: np.ndarray = None
    klein: bool = False
    base_projection: object = None      # callable p -> base coords
    bundle_project: object = None       # retraction onto P
    model_project: object = None        # retraction onto the model group G
    bundle_H_basis: np.ndarray = field(default=None, repr=False)

    kind = "mutation"

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.sigma_inv is None:
            self.sigma_inv = np.linalg.inv(self.sigma)
        if self.base_projection is None:
            self.base_projection = lambda p: p[:, 0].copy()
        if self.bundle_project is None:
            self.bundle_project = lambda p: p
        if self.model_project is None:
            self.model_project = lambda g: g

    @property
    def algebra(self):
        return self.model.g

    @property
    def dim_m(self):
        return self.model.dim_m

    def identity(self):
        return np.eye(self.bundle_algebra.ambient_dim)

    def point(self, p):
        return self.bundle_project(np.asarray(p, dtype=float))

    def bundle_matrix(self, xi):
        """Matrix in Lie(P) of sigma^-1(xi) for xi in g-coordinates."""
        return self.bundle_algebra.to_matrix(self.sigma_inv @ as_coords(xi))

    def model_matrix(self, xi):
        return self.model.g.to_matrix(as_coords(xi))

    def connection_at(self, p, pdot, tol=1e-6):
        """omega at p applied to the tangent matrix pdot."""
        raw = np.linalg.solve(p, pdot)
        coords_P = self.bundle_algebra.to_coords(raw, tol=tol)
        return self.model.vector(self.sigma @ coords_P)

    def frame_flow(self, p, xi, t):
        """Flow of the frame field omega^-1(xi) for time t, starting at p."""
        return p @ group_exp(t * self.bundle_matrix(xi))

    def h_element(self, theta):
        """Pair (h in P, h in G) generated by h-coordinates theta."""
        full = self.model.embed_h(theta)
        h_G = group_exp(self.model.g.to_matrix(full))
        h_P = group_exp(self.bundle_matrix(full))
        return h_P, h_G

    def random_point(self, rng, scale=0.7):
        coords = rng.standard_normal(self.bundle_algebra.dim) * scale
        p = group_exp(self.bundle_algebra.to_matrix(coords))
        return self.point(p)

    def validate(self, seed=0, tol=1e-9):
        checks = []
        k = self.sigma.shape[0]
        if self.sigma.shape != (self.model.g.dim, self.bundle_algebra.dim):
            raise NotAnIsomorphism("sigma has wrong shape")
        if np.linalg.matrix_rank(self.sigma) < k:
            raise NotAnIsomorphism("sigma is singular")
        inv_res = np.max(np.abs(self.sigma_inv @ self.sigma - np.eye(k)))
        checks.append(lie_core.CheckResult("sigma_isomorphism", inv_res <= 1e-11, inv_res))

        # sigma restricted to the h-preimage is a homomorphism onto h
        hom_res = 0.0
        for i in self.model.h_indices:
            for j in self.model.h_indices:
                Y1 = np.eye(k)[i]
                Y2 = np.eye(k)[j]
                lhs = self.sigma @ self.bundle_algebra.bracket_coords(
                    self.sigma_inv @ Y1, self.sigma_inv @ Y2
                )
                rhs = self.model.g.bracket_coords(Y1, Y2)
                hom_res = max(hom_res, np.max(np.abs(lhs - rhs), initial=0.0))
        checks.append(lie_core.CheckResult("h_homomorphism", hom_res <= tol, hom_res))

        # sigma intertwines Ad_H
        rng = np.random.default_rng(seed)
        ad_res = 0.0
        for _ in range(10):
            theta = rng.standard_normal(self.model.dim_h)
            h_P, h_G = self.h_element(theta)
            for i in range(k):
                xi_P = np.eye(k)[i]
                lhs = self.sigma @ adjoint(h_P, xi_P, self.bundle_algebra).coords
                rhs = adjoint(h_G, self.sigma @ xi_P, self.model.g).coords
                ad_res = max(ad_res, np.max(np.abs(lhs - rhs)))
        checks.append(lie_core.CheckResult("ad_intertwining", ad_res <= tol, ad_res))
        return lie_core.ValidationReport(checks)


def build_mutation(bundle_algebra, model, sigma, name="mutation", **kwargs):
    """Validated MutationGeometry from algebra data and the map sigma."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (model.g.dim, bundle_algebra.dim):
        raise NotAnIsomorphism(
            f"sigma shape {sigma.shape} does not match "
            f"({model.g.dim}, {bundle_algebra.dim})"
        )
    if np.linalg.matrix_rank(sigma) < model.g.dim:
        raise NotAnIsomorphism("sigma is singular")
    geom = MutationGeometry(name, bundle_algebra, model, sigma, **kwargs)
    report = geom.validate()
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise InvalidMutation(f"mutation invariants failed: {failed}")
    return geom


# ---------------------------------------------------------------------------
# gauge geometries

@dataclass(frozen=True)
class GaugePoint:
    """Chart point plus an H-frame for the trivialized bundle."""

    x: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))


class MetricField:
    """Symmetric d x d grid of expression entries with derivatives."""

    def __init__(self, entries, derivative_mode="dual", fd_step=1e-6):
        self.entries = entries
        self.d = len(entries)
        self.derivative_mode = derivative_mode
        self.fd_step = fd_step

    def value(self, x):
        g = np.empty((self.d, self.d))
        for i in range(self.d):
            for j in range(self.d):
                g[i, j] = self.entries[i][j].evaluate(x)
        return g

    def value_and_grad(self, x):
        d = self.d
        g = np.empty((d, d))
        dg = np.empty((d, d, d))   # dg[i,j,k] = d g_ij / d x_k
        if self.derivative_mode == "dual":
            for i in range(d):
                for j in range(d):
                    v, grad = self.entries[i][j].value_and_gradient(x)
                    g[i, j] = v
                    dg[i, j] = grad
        else:
            g = self.value(x)
            for k in range(d):
                h = self.fd_step * max(1.0, abs(x[k]))
                xp = np.array(x, dtype=float)
                xm = np.array(x, dtype=float)
                xp[k] += h
                xm[k] -= h
                dg[:, :, k] = (self.value(xp) - self.value(xm)) / (2 * h)
        return g, dg

    @property
    def sources(self):
        return [[e.source for e in row] for row in self.entries]


def _fix_eigvec_signs(V):
    W = V.copy()
    for j in range(W.shape[1]):
        col = W[:, j]
        i = int(np.argmax(np.abs(col) - 1e-14 * np.arange(len(col))))
        if col[i] < 0:
            W[:, j] = -col
    return W


@dataclass
class GaugeGeometry:
    """Chart-based geometry of type (R^d x| O(p,q), O(p,q))."""

    name: str
    model: ModelPair
    metric: MetricField
    signature: tuple
    domain: Domain
    coframe_fd_step: float = 1e-4

    kind = "gauge"

    def __post_init__(self):
        p, q = self.signature
        self.chart_dim = p + q
        self.eta = signature_matrix(p, q)
        d = self.chart_dim
        g = self.model.g
        # o(p,q) in the small d x d representation, for h-coordinate solves
        self.h_small = np.array(
            [g.basis[i][:d, :d] for i in self.h_indices]
        )
        self.h_small_pinv = np.linalg.pinv(self.h_small.reshape(len(self.h_indices), -1))

    @property
    def algebra(self):
        return self.model.g

    @property
    def dim_m(self):
        return self.model.dim_m

    @property
    def h_indices(self):
        return self.model.h_indices

    def require_in_domain(self, x):
        if not self.domain.contains(x):
            raise OutOfChart(f"chart point {np.asarray(x)} outside domain")

    # -- pointwise frame data -------------------------------------------

    def coframe(self, x):
        """Signature-orthonormal coframe E with g(x) = E^T eta E."""
        g = self.metric.value(x)
        vals, vecs = np.linalg.eigh(g)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]
        vecs = _fix_eigvec_signs(vecs[:, order])
        p, q = self.signature
        if np.any(vals[:p] <= 0) or np.any(vals[p:] >= 0):
            raise SignatureError(
                f"metric eigenvalues {vals} do not match signature {self.signature}"
            )
        if np.min(np.abs(vals)) < 1e-12:
            raise DegenerateMetric("metric is numerically degenerate")
        return (np.sqrt(np.abs(vals))[:, None]) * vecs.T

    def coframe_and_derivative(self, x):
        """E and dE[a,i,k] = d E[a,i] / d x_k by central differences."""
        d = self.chart_dim
        E = self.coframe(x)
        dE = np.empty((d, d, d))
        for k in range(d):
            h = self.coframe_fd_step * max(1.0, abs(x[k]))
            xp = np.array(x, dtype=float)
            xm = np.array(x, dtype=float)
            xp[k] += h
            xm[k] -= h
            dE[:, :, k] = (self.coframe(xp) - self.coframe(xm)) / (2 * h)
        return E, dE

    def christoffel(self, x):
        """Gamma[k,i,j] of the metric's Levi-Civita connection."""
        g, dg = self.metric.value_and_grad(x)
        ginv = np.linalg.inv(g)
        Gamma = 0.5 * (
            np.einsum("kl,lji->kij", ginv, dg)
            + np.einsum("kl,lij->kij", ginv, dg)
            - np.einsum("kl,ijl->kij", ginv, dg)
        )
        return Gamma

    def frame_data(self, x):
        """Coframe E and frame connection W[a,b,i] in one batched pass.

        Evaluates the metric at x and the 2d central-difference points
        once, runs a single stacked eigendecomposition, and derives the
        Christoffel symbols from the same finite differences.  Equivalent
        to coframe(x) / frame_connection(x) up to the O(step^2) gradient
        error, at a fraction of the cost; used by the trajectory
        integrators.
        """
        self.require_in_domain(x)
        d = self.chart_dim
        x = np.asarray(x, dtype=float)
        steps = np.array([self.coframe_fd_step * max(1.0, abs(x[k])) for k in range(d)])
        pts = [x]
        for k in range(d):
            xp = x.copy(); xp[k] += steps[k]
            xm = x.copy(); xm[k] -= steps[k]
            pts.extend((xp, xm))
        B = len(pts)
        gs = np.empty((B, d, d))
        entries = self.metric.entries
        for b, pt in enumerate(pts):
            vals = [float(v) for v in pt]
            for i in range(d):
                for j in range(i, d):
                    gij = entries[i][j].evaluate(vals)
                    gs[b, i, j] = gij
                    gs[b, j, i] = gij
        evals, evecs = np.linalg.eigh(gs)
        p, q = self.signature
        order = np.argsort(-evals, axis=1, kind="stable")
        lv = np.take_along_axis(evals, order, axis=1)
        if np.any(lv[:, :p] <= 0) or np.any(lv[:, p:] >= 0):
            raise SignatureError(
                f"metric eigenvalues do not match signature {self.signature}"
            )
        if np.min(np.abs(lv)) < 1e-12:
            raise DegenerateMetric("metric is numerically degenerate")
        V = np.take_along_axis(evecs, order[:, None, :], axis=2)
        score = np.abs(V) - 1e-14 * np.arange(d)[None, :, None]
        lead = np.argmax(score, axis=1)
        signs = np.where(
            np.take_along_axis(V, lead[:, None, :], axis=1) < 0, -1.0, 1.0
        )
        V = V * signs
        Es = np.sqrt(np.abs(lv))[:, :, None] * np.transpose(V, (0, 2, 1))
        E = Es[0]
        dE = np.empty((d, d, d))
        dg = np.empty((d, d, d))
        for k in range(d):
            inv2h = 1.0 / (2.0 * steps[k])
            dE[:, :, k] = (Es[1 + 2 * k] - Es[2 + 2 * k]) * inv2h
            dg[:, :, k] = (gs[1 + 2 * k] - gs[2 + 2 * k]) * inv2h
        ginv = np.linalg.inv(gs[0])
        Gamma = 0.5 * (
            np.einsum("kl,lji->kij", ginv, dg)
            + np.einsum("kl,lij->kij", ginv, dg)
            - np.einsum("kl,ijl->kij", ginv, dg)
        )
        F = np.linalg.inv(E)
        dF = -np.einsum("ka,abi,bl->kli", F, dE, F)
        W = np.einsum("ak,kbi->abi", E, dF) + np.einsum(
            "ak,kij,jb->abi", E, Gamma, F
        )
        return E, W

    def frame_connection(self, x):
        """W[a,b,i]: the h-connection form omega^a_b(d/dx_i) in the coframe."""
        E, dE = self.coframe_and_derivative(x)
        F = np.linalg.inv(E)
        Gamma = self.christoffel(x)
        # dF from dE: d(E^-1) = -E^-1 dE E^-1
        dF = -np.einsum("ka,abi,bl->kli", F, dE, F)
        W = np.einsum("ak,kbi->abi", E, dF) + np.einsum(
            "ak,kij,jb->abi", E, Gamma, F
        )
        return W

    # -- connection form -------------------------------------------------

    def gauge_value(self, x, u):
        """A_x(u) in full g-coordinates, for a chart tangent u."""
        self.require_in_domain(x)
        u = np.asarray(u, dtype=float)
        E = self.coframe(x)
        W = self.frame_connection(x)
        m_comp = E @ u
        w_small = np.einsum("abi,i->ab", W, u)
        h_comp = self.h_small_pinv.T @ w_small.reshape(-1)
        coords = self.model.embed_m(m_comp) + self.model.embed_h(h_comp)
        return self.model.vector(coords)

    def embed_H(self, h):
        d = self.chart_dim
        out = np.eye(d + 1)
        out[:d, :d] = h
        return out

    def small_h_coords(self, w):
        """Coordinates of a small o(p,q) matrix over the h-subbasis."""
        return self.h_small_pinv.T @ np.asarray(w, dtype=float).reshape(-1)

    def connection_at(self, point, tangent):
        """omega at (x,h) applied to (xdot, hdot)."""
        x, h = point.x, point.h
        xdot, hdot = tangent
        A = self.gauge_value(x, xdot)
        Hbig = self.embed_H(h)
        ad = adjoint(np.linalg.inv(Hbig), A, self.model.g, tol=1e-6)
        vert = self.small_h_coords(np.linalg.solve(h, np.asarray(hdot, dtype=float)))
        return self.model.vector(ad.coords + self.model.embed_h(vert))

    def H_project(self, h):
        if np.allclose(self.eta, np.eye(self.chart_dim)):
            return polar_orthogonal(h)
        return polar_indefinite(h, self.eta)

    def point(self, x, h=None):
        x = np.asarray(x, dtype=float)
        self.require_in_domain(x)
        if h is None:
            h = np.eye(self.chart_dim)
        return GaugePoint(x, self.H_project(np.asarray(h, dtype=float)))

    def direction_from_chart_velocity(self, x, xdot):
        """m-coordinates (compressed) whose geodesic from (x, id) starts
        with chart velocity xdot."""
        return self.coframe(x) @ np.asarray(xdot, dtype=float)

    def random_point(self, rng):
        x = self.domain.sample(rng)
        theta = rng.standard_normal(len(self.h_indices)) * 0.5
        w = np.einsum("k,kab->ab", theta, self.h_small)
        return GaugePoint(x, group_exp(w))

    def model_project(self, gmat):
        return project_affine(gmat, self.eta)


def build_gauge_from_metric(
    metric_entries,
    signature,
    domain,
    name="gauge",
    derivative_mode="dual",
    n_validation_samples=10,
    seed=0,
):
    """GaugeGeometry from a grid of metric expressions.

    `metric_entries` is a d x d grid of ExpressionAst (or strings over
    variables u1..ud).  The coframe comes from a pointwise signature-aware
    Gram factorization; the h-part is the metric-compatible torsion-free
    connection in that coframe.
    """
    d = len(metric_entries)
    variables = [f"u{i+1}" for i in range(d)]
    entries = []
    for row in metric_entries:
        if len(row) != d:
            raise InvalidDimension("metric grid must be square")
        entries.append(
            [
                e if not isinstance(e, str) else parse_expression(e, variables)
                for e in row
            ]
        )
    metric = MetricField(entries, derivative_mode=derivative_mode)
    p, q = signature
    if p + q != d:
        raise SignatureError(f"signature {signature} does not match dimension {d}")
    model_g = iso_algebra(p, q)
    n_rot = model_g.dim - d
    pair = ModelPair(model_g, tuple(range(d, d + n_rot)), tuple(range(d)))
    geom = GaugeGeometry(name, pair, metric, (p, q), domain)

    rng = np.random.default_rng(seed)
    for _ in range(n_validation_samples):
        x = domain.sample(rng)
        g = metric.value(x)
        if np.max(np.abs(g - g.T)) > 1e-10 * max(1.0, np.max(np.abs(g))):
            raise SignatureError(f"metric not symmetric at {x}")
        if abs(np.linalg.det(g)) < 1e-14:
            raise DegenerateMetric(f"metric degenerate at {x}")
        geom.coframe(x)   # raises SignatureError on sign mismatch
    return geom


# ---------------------------------------------------------------------------
# built-in catalog

def _hyperbolic_pair(n):
    g = iso_algebra(n, 0)
    n_rot = g.dim - n
    return ModelPair(g, tuple(range(n, n + n_rot)), tuple(range(n)))


def _hyperbolic(n, klein=False):
    bundle = lorentz_algebra(n)
    if klein:
        n_rot = bundle.dim - n
        pair = ModelPair(bundle, tuple(range(n, n + n_rot)), tuple(range(n)))
        name = f"hyperbolic-klein:{n}"
    else:
        pair = _hyperbolic_pair(n)
        name = f"hyperbolic:{n}"
    sigma = np.eye(bundle.dim)
    geom = build_mutation(
        bundle,
        pair,
        sigma,
        name=name,
        klein=klein,
        base_projection=lambda p: p[:, 0].copy(),
        bundle_project=lambda p: project_lorentz(p, n),
        model_project=(
            (lambda g_: project_lorentz(g_, n))
            if klein
            else (lambda g_: project_affine(g_, np.eye(n)))
        ),
    )
    return geom


def _euclidean(n):
    g = iso_algebra(n, 0)
    pair = _hyperbolic_pair(n)
    geom = build_mutation(
        g,
        pair,
        np.eye(g.dim),
        name=f"euclidean:{n}",
        klein=True,
        base_projection=lambda p: p[:n, n].copy(),
        bundle_project=lambda p: project_affine(p, np.eye(n)),
        model_project=lambda p: project_affine(p, np.eye(n)),
    )
    return geom


def _affine(n):
    g = affine_algebra(n)
    pair = ModelPair(g, tuple(range(n, g.dim)), tuple(range(n)))
    geom = build_mutation(
        g,
        pair,
        np.eye(g.dim),
        name=f"affine:{n}",
        klein=True,
        base_projection=lambda p: p[:n, n].copy(),
        bundle_project=project_affine_gl,
        model_project=project_affine_gl,
    )
    return geom


def _sl2xh():
    g = sl2xso2_algebra()
    pair = ModelPair(g, (3,), (0, 1, 2))
    geom = build_mutation(
        g,
        pair,
        np.eye(4),
        name="sl2xh",
        klein=True,
        base_projection=lambda p: p[:2, :2].reshape(-1).copy(),
        bundle_project=project_sl2xso2,
        model_project=project_sl2xso2,
    )
    return geom


def _sphere2():
    domain = Domain(box=[[0.2, np.pi - 0.2], [-3.0, 3.0]])
    return build_gauge_from_metric(
        [["1", "0"], ["0", "sin(u1)^2"]],
        (2, 0),
        domain,
        name="sphere:2",
    )


def _clifton_pohl():
    big = 1e9
    domain = Domain(
        box=[[-big, big], [-big, big]],
        predicate=lambda x: x[0] ** 2 + x[1] ** 2 > 1e-12,
        sample_box=[[0.4, 2.0], [0.4, 2.0]],
    )
    f = "1/(u1^2+u2^2)"
    return build_gauge_from_metric(
        [["0", f], [f, "0"]],
        (1, 1),
        domain,
        name="clifton-pohl",
    )


CATALOG_NAMES = (
    "euclidean:n",
    "hyperbolic:n",
    "hyperbolic-klein:n",
    "sphere:2",
    "affine:n",
    "sl2xh",
    "clifton-pohl",
)


def catalog(name):
    """Built-in geometry by name, e.g. 'hyperbolic:2' or 'clifton-pohl'."""
    if name == "sl2xh":
        return _sl2xh()
    if name == "clifton-pohl":
        return _clifton_pohl()
    if name == "sphere:2":
        return _sphere2()
    if ":" in name:
        family, _, dim = name.partition(":")
        try:
            n = int(dim)
        except ValueError:
            raise UnknownModel(f"bad dimension in '{name}'") from None
        if n < 2 or n > 6:
            raise UnknownModel(f"dimension out of range in '{name}'")
        if family == "euclidean":
            return _euclidean(n)
        if family == "hyperbolic":
            return _hyperbolic(n)
        if family == "hyperbolic-klein":
            return _hyperbolic(n, klein=True)
        if family == "affine":
            return _affine(n)
    raise UnknownModel(f"unknown model '{name}' (known: {CATALOG_NAMES})")


# ---------------------------------------------------------------------------
# geometry JSON

def geometry_to_dict(geom):
    model = {
        "basis": geom.model.g.basis.tolist(),
        "h_indices": list(geom.model.h_indices),
        "m_indices": list(geom.model.m_indices),
    }
    if geom.kind == "mutation":
        return {
            "kind": "mutation",
            "name": geom.name,
            "model": model,
            "mutation": {
                "bundle_basis": geom.bundle_algebra.basis.tolist(),
                "sigma": geom.sigma.tolist(),
            },
        }
    out = {
        "kind": "gauge",
        "name": geom.name,
        "model": model,
        "gauge": {
            "metric": geom.metric.sources,
            "signature": list(geom.signature),
        },
    }
    if geom.domain.box is not None:
        out["gauge"]["domain"] = {"box": geom.domain.box.tolist()}
    return out


def geometry_from_dict(data):
    model_data = data["model"]
    g = MatrixAlgebra.from_basis(
        data.get("name", "model"), np.array(model_data["basis"])
    )
    pair = ModelPair(
        g, tuple(model_data["h_indices"]), tuple(model_data["m_indices"])
    )
    if data["kind"] == "mutation":
        bundle = MatrixAlgebra.from_basis(
            "bundle", np.array(data["mutation"]["bundle_basis"])
        )
        return build_mutation(
            bundle,
            pair,
            np.array(data["mutation"]["sigma"]),
            name=data.get("name", "mutation"),
        )
    if data["kind"] == "gauge":
        gd = data["gauge"]
        box = gd.get("domain", {}).get("box")
        domain = Domain(box=box) if box is not None else Domain()
        return build_gauge_from_metric(
            gd["metric"],
            tuple(gd["signature"]),
            domain,
            name=data.get("name", "gauge"),
        )
    raise UnknownModel(f"unknown geometry kind '{data['kind']}'")


def save_geometry(geom, path):
    with open(path, "w") as fh:
        json.dump(geometry_to_dict(geom), fh, indent=2)


def load_geometry(path):
    with open(path) as fh:
        return geometry_from_dict(json.load(fh))
