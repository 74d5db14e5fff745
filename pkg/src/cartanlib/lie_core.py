"""Matrix Lie algebra kernel.

Algebras are given by an ordered basis of real square matrices.  Elements
carry two representations: a coordinate vector over the basis (authoritative)
and the assembled matrix (derived).  Brackets go through precomputed
structure constants; round trips between the representations are checked
against a residual tolerance so that results silently leaving the algebra
are caught early.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    InvalidDimension,
    NotInAlgebra,
    NumericalFailure,
    PrincipalLogUndefined,
)

STRUCTURAL_TOL = 1e-10   # closure, Jacobi, antisymmetry
ROUNDTRIP_TOL = 1e-9     # exp/log, adjoint span residuals


def group_exp(X):
    """Matrix exponential (scaling-and-squaring Pade core via scipy)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise InvalidDimension(f"expected a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NumericalFailure("non-finite entries in exponential argument")
    out = scipy.linalg.expm(X)
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("matrix exponential overflowed")
    return out


def group_log(g, tol=ROUNDTRIP_TOL):
    """Principal matrix logarithm.

    Raises PrincipalLogUndefined when the spectrum touches the closed
    negative real axis (the caller may then try a structured branch
    search instead).
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidDimension(f"expected a square matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise NumericalFailure("non-finite entries in logarithm argument")
    eigvals = np.linalg.eigvals(g)
    if np.any(np.abs(eigvals) < 1e-14):
        raise PrincipalLogUndefined("matrix is singular")
    scale = np.max(np.abs(eigvals))
    on_negative_axis = (eigvals.real < 0) & (np.abs(eigvals.imag) <= 1e-12 * scale)
    if np.any(on_negative_axis):
        raise PrincipalLogUndefined("eigenvalue on the negative real axis")
    L = scipy.linalg.logm(g)
    if np.max(np.abs(L.imag)) > 1e-8:
        raise PrincipalLogUndefined("no real principal logarithm")
    L = L.real
    err = np.max(np.abs(group_exp(L) - g))
    if err > tol * max(1.0, np.max(np.abs(g))):
        raise NumericalFailure(f"log round-trip residual {err:.3e}")
    return L


@dataclass(frozen=True)
class MatrixAlgebra:
    """A real matrix Lie algebra with a fixed ordered basis."""

    name: str
    ambient_dim: int
    basis: np.ndarray                 # (k, n, n)
    structure_constants: np.ndarray   # (k, k, k), [b_i,b_j] = sum_k c[i,j,k] b_k
    _pinv: np.ndarray = field(repr=False, default=None)  # (k, n*n)

    @classmethod
    def from_basis(cls, name, basis, tol=STRUCTURAL_TOL):
        basis = np.asarray(basis, dtype=float)
        k, n, n2 = basis.shape
        if n != n2:
            raise InvalidDimension("basis matrices must be square")
        flat = basis.reshape(k, n * n)
        if np.linalg.matrix_rank(flat, tol=1e-12) < k:
            raise NotInAlgebra("basis matrices are linearly dependent")
        pinv = np.linalg.pinv(flat)
        comms = np.einsum("iab,jbc->ijac", basis, basis)
        comms = comms - np.transpose(comms, (1, 0, 2, 3))
        c = comms.reshape(k, k, n * n) @ pinv
        residual = c @ flat - comms.reshape(k, k, n * n)
        if np.max(np.abs(residual)) > tol * max(1.0, np.max(np.abs(basis))) * 10:
            raise NotInAlgebra(
                f"basis of '{name}' is not closed under the commutator "
                f"(residual {np.max(np.abs(residual)):.3e})"
            )
        alg = cls(name, n, basis, c, pinv)
        jac = alg.jacobi_residual()
        if jac > tol:
            raise NotInAlgebra(f"Jacobi identity fails for '{name}' ({jac:.3e})")
        return alg

    @property
    def dim(self):
        return self.basis.shape[0]

    def to_matrix(self, coords):
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise InvalidDimension(
                f"expected {self.dim} coordinates, got shape {coords.shape}"
            )
        return np.tensordot(coords, self.basis, axes=1)

    def to_coords(self, matrix, tol=ROUNDTRIP_TOL):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (self.ambient_dim, self.ambient_dim):
            raise InvalidDimension("matrix has wrong ambient dimension")
        coords = self._pinv.T @ matrix.reshape(-1)
        residual = np.max(np.abs(self.to_matrix(coords) - matrix))
        if residual > tol * max(1.0, np.max(np.abs(matrix))):
            raise NotInAlgebra(
                f"matrix is not in span of '{self.name}' basis "
                f"(residual {residual:.3e})"
            )
        return coords

    def bracket_coords(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def jacobi_residual(self):
        c = self.structure_constants
        # [[b_i,b_j],b_k] summed cyclically, expressed through c twice
        term = np.einsum("ijm,mkl->ijkl", c, c)
        cyc = term + np.transpose(term, (1, 2, 0, 3)) + np.transpose(term, (2, 0, 1, 3))
        return float(np.max(np.abs(cyc)))


@dataclass(frozen=True)
class AlgebraVector:
    """Coordinates of an algebra element over the fixed basis."""

    coords: np.ndarray
    algebra: MatrixAlgebra = None
    pair: "ModelPair" = None

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))

    @property
    def m_part(self):
        return self.pair.m_project(self.coords)

    @property
    def h_part(self):
        return self.pair.h_project(self.coords)

    @property
    def matrix(self):
        return self.algebra.to_matrix(self.coords)

    def __len__(self):
        return len(self.coords)


def as_coords(x):
    return x.coords if isinstance(x, AlgebraVector) else np.asarray(x, dtype=float)


def bracket(algebra, X, Y):
    """Bracket [X, Y] through the structure constants."""
    x, y = as_coords(X), as_coords(Y)
    if x.shape != (algebra.dim,) or y.shape != (algebra.dim,):
        raise InvalidDimension("bracket arguments do not match the algebra")
    return AlgebraVector(algebra.bracket_coords(x, y), algebra)


def adjoint(g, X, algebra, tol=ROUNDTRIP_TOL):
    """Coordinates of Ad_g X = g X g^-1."""
    g = np.asarray(g, dtype=float)
    M = algebra.to_matrix(as_coords(X))
    conj = g @ M @ np.linalg.inv(g)
    return AlgebraVector(algebra.to_coords(conj, tol=tol), algebra)


@dataclass(frozen=True)
class ModelPair:
    """A reductive split g = m (+) h with sampled H for invariance tests."""

    g: MatrixAlgebra
    h_indices: tuple
    m_indices: tuple
    H_generators: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "h_indices", tuple(self.h_indices))
        object.__setattr__(self, "m_indices", tuple(self.m_indices))
        object.__setattr__(self, "H_generators", tuple(self.H_generators))

    @property
    def dim_m(self):
        return len(self.m_indices)

    @property
    def dim_h(self):
        return len(self.h_indices)

    def m_project(self, coords):
        """Zero out the h-components (projection onto m inside g)."""
        out = np.zeros_like(np.asarray(coords, dtype=float))
        idx = list(self.m_indices)
        out[idx] = np.asarray(coords)[idx]
        return out

    def h_project(self, coords):
        out = np.zeros_like(np.asarray(coords, dtype=float))
        idx = list(self.h_indices)
        out[idx] = np.asarray(coords)[idx]
        return out

    def m_coords(self, coords):
        """Compress full coordinates to the m-subbasis ordering."""
        return np.asarray(coords, dtype=float)[list(self.m_indices)]

    def h_coords(self, coords):
        return np.asarray(coords, dtype=float)[list(self.h_indices)]

    def embed_m(self, m_compressed):
        out = np.zeros(self.g.dim)
        out[list(self.m_indices)] = np.asarray(m_compressed, dtype=float)
        return out

    def embed_h(self, h_compressed):
        out = np.zeros(self.g.dim)
        out[list(self.h_indices)] = np.asarray(h_compressed, dtype=float)
        return out

    def vector(self, coords):
        return AlgebraVector(coords, self.g, self)

    def sample_H(self, seed=0, n_random=20, scales=(-1.0, -0.1, 0.1, 1.0)):
        """Group elements of (the identity component of) H.

        Exponentials of the h-basis at fixed scales, seeded random
        h-combinations, and any user-supplied generators.
        """
        out = []
        for i in self.h_indices:
            for s in scales:
                out.append(group_exp(s * self.g.basis[i]))
        rng = np.random.default_rng(seed)
        for _ in range(n_random):
            theta = rng.standard_normal(self.dim_h)
            out.append(group_exp(self.g.to_matrix(self.embed_h(theta))))
        out.extend(np.asarray(h, dtype=float) for h in self.H_generators)
        return out


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def residual(self, name):
        for c in self.checks:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "residual": c.residual}
                for c in self.checks
            ],
        }


def validate_reductive(pair, seed=0):
    """Check the direct-sum, subalgebra, and Ad-invariance requirements."""
    checks = []
    g = pair.g
    all_idx = sorted(pair.h_indices + pair.m_indices)
    direct_sum = (
        all_idx == list(range(g.dim))
        and not set(pair.h_indices) & set(pair.m_indices)
    )
    checks.append(CheckResult("direct_sum", direct_sum, 0.0 if direct_sum else 1.0))

    # [h, h] subset h: the m-components of h-h brackets must vanish
    sub_res = 0.0
    for i in pair.h_indices:
        for j in pair.h_indices:
            br = g.structure_constants[i, j]
            sub_res = max(sub_res, np.max(np.abs(pair.m_project(br)), initial=0.0))
    checks.append(CheckResult("h_subalgebra", sub_res <= STRUCTURAL_TOL, float(sub_res)))

    ad_res = 0.0
    ok = True
    for h in pair.sample_H(seed=seed):
        for i in pair.m_indices:
            try:
                ad = adjoint(h, np.eye(g.dim)[i], g)
            except NotInAlgebra:
                ok = False
                ad_res = np.inf
                continue
            ad_res = max(ad_res, np.max(np.abs(pair.h_project(ad.coords)), initial=0.0))
    checks.append(CheckResult("ad_invariance", ok and ad_res <= 1e-9, float(ad_res)))
    return ValidationReport(checks)
