"""Dirichlet and Neumann problems, interior and exterior, via two-density ansatze.

Each problem is reduced to a rectangular boundary system acting on a pair of
densities and solved by truncated-SVD minimum-norm least squares in the
arclength-weighted inner product.  When the wavenumber sits on an eigenvalue
the system has a cokernel; its span is the obstruction space, and data with
a component along it is flagged as not solvable.

============================  ===============  ===========================
problem                       field            boundary system
============================  ===============  ===========================
interior-dirichlet            w[phi] + v[psi]  [ 1/2 I + W  |  V ]
exterior-dirichlet            w[phi] + v[psi]  [-1/2 I + W  |  V ]
interior-neumann              v[phi] + w[psi]  [-1/2 I + Wt |  T ]
exterior-neumann              v[phi] + w[psi]  [ 1/2 I + Wt |  T ]
============================  ===============  ===========================

Neumann data are always normal derivatives along the outward normal of the
domain, so exterior Neumann data equal ``-du/dnu`` for the exterior normal.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularGeometry, WrongRegion
from .geometry import locate_points
from .nystrom import assemble_all
from .potentials import as_values, layer_potentials, plane_wave, point_source
from .specfun import C2, as_wavenumber

log = logging.getLogger(__name__)

PROBLEMS = ("interior-dirichlet", "exterior-dirichlet", "interior-neumann", "exterior-neumann")
TRUNCATION = 1e-10
KERNEL_TOL = 1e-8
COMPAT_TOL = 1e-6

# (first block, sign of identity, second block, density of the single layer)
_SYSTEMS = {
    "interior-dirichlet": ("W", 0.5, "V"),
    "exterior-dirichlet": ("W", -0.5, "V"),
    "interior-neumann": ("Wt", -0.5, "T"),
    "exterior-neumann": ("Wt", 0.5, "T"),
}
# operator whose kernel dimension bounds the obstruction dimension
_PREDICTOR = {
    "interior-dirichlet": ("Wt", 0.5),
    "exterior-dirichlet": ("W", -0.5),
    "interior-neumann": ("Wt", -0.5),
    "exterior-neumann": ("W", 0.5),
}


def _check_problem(problem):
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; choose from {PROBLEMS}")


def is_dirichlet(problem):
    return problem.endswith("dirichlet")


def is_interior(problem):
    return problem.startswith("interior")


def kernel_dim(matrix, tol=KERNEL_TOL):
    """Number of singular values below ``tol`` times the largest."""
    s = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(s < tol * s[0]))


@dataclass(frozen=True)
class BvpSpec:
    """A boundary value problem: which problem, wavenumber, data and grid."""

    problem: str
    k: complex
    g: np.ndarray
    grid: object

    def __post_init__(self):
        _check_problem(self.problem)
        object.__setattr__(self, "k", as_wavenumber(self.k).k)
        g = as_values(self.grid, self.g)
        if not np.all(np.isfinite(g)):
            raise ValueError("boundary data contain non-finite values")
        object.__setattr__(self, "g", g)


@dataclass(frozen=True, eq=False)
class ObstructionBasis:
    """Orthonormal nodal basis of the obstruction space (may be empty)."""

    problem: str
    grid: object
    vectors: np.ndarray  # shape (N, d)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def coefficients(self, g):
        w = self.grid.weights
        return (np.conj(self.vectors).T * w) @ g

    def project(self, g):
        return self.vectors @ self.coefficients(g)


class BoundarySystem:
    """Assembled stacked operator for one problem, with its weighted SVD."""

    def __init__(self, problem, k, grid, ops=None):
        _check_problem(problem)
        self.problem = problem
        self.k = as_wavenumber(k).k
        self.grid = grid
        first, sign, second = _SYSTEMS[problem]
        if ops is None:
            ops = assemble_all(self.k, grid, (first, second))
        self.ops = ops
        n = grid.size
        self.A1 = sign * np.eye(n) + ops[first].matrix
        self.A2 = ops[second].matrix
        self.A = np.hstack([self.A1, self.A2])
        sw = np.sqrt(grid.weights)
        self.sw = sw
        self.sw2 = np.concatenate([sw, sw])
        Ahat = sw[:, None] * self.A / self.sw2[None, :]
        self.U, self.s, self.Vh = np.linalg.svd(Ahat, full_matrices=False)

    @property
    def cokernel_dim(self):
        return int(np.sum(self.s < KERNEL_TOL * self.s[0]))

    def obstruction(self):
        d = self.cokernel_dim
        vecs = self.U[:, self.s.size - d :] / self.sw[:, None] if d else np.zeros((self.grid.size, 0))
        return ObstructionBasis(self.problem, self.grid, vecs)

    def predicted_dim(self):
        name, sign = _PREDICTOR[self.problem]
        if name not in self.ops:
            self.ops.update(assemble_all(self.k, self.grid, (name,)))
        return kernel_dim(sign * np.eye(self.grid.size) + self.ops[name].matrix)

    def lstsq(self, g):
        """Minimum-norm weighted least-squares densities ``(phi, psi)``."""
        ghat = self.sw * g
        keep = self.s > TRUNCATION * self.s[0]
        coef = (np.conj(self.U[:, keep]).T @ ghat) / self.s[keep]
        y = np.conj(self.Vh[keep]).T @ coef
        x = y / self.sw2
        n = self.grid.size
        return x[:n], x[n:]

    def residual(self, phi, psi, g):
        r = self.A1 @ phi + self.A2 @ psi - g
        gn = np.linalg.norm(self.sw * g)
        rn = np.linalg.norm(self.sw * r)
        return float(rn / gn) if gn > 0 else float(rn)


@dataclass(frozen=True, eq=False)
class Solution:
    """Densities of a solved problem plus diagnostics.

    ``phi`` and ``psi`` are the first and second density blocks.  For
    Dirichlet problems ``u = w[phi] + v[psi]``, for Neumann problems
    ``u = v[phi] + w[psi]``.
    """

    problem: str
    k: complex
    grid: object
    phi: np.ndarray
    psi: np.ndarray
    residual: float
    compatibility_defect: float
    kernel_dim: int
    obstruction: ObstructionBasis = field(repr=False, default=None)

    @property
    def solvable(self):
        return self.compatibility_defect <= COMPAT_TOL

    @property
    def status(self):
        return "SOLVED" if self.solvable else "NOT-SOLVABLE"

    @property
    def ansatz(self):
        return "w[phi] + v[psi]" if is_dirichlet(self.problem) else "v[phi] + w[psi]"

    @property
    def single_density(self):
        return self.psi if is_dirichlet(self.problem) else self.phi

    @property
    def double_density(self):
        return self.phi if is_dirichlet(self.problem) else self.psi

    def _region_ok(self, tags):
        if is_interior(self.problem):
            return tags == "interior"
        return np.char.startswith(tags.astype(str), "exterior")

    def field(self, pts, check=True, gradient=False):
        """Evaluate the reconstructed solution at points.

        Raises ``NearBoundary`` inside the refusal band and ``WrongRegion``
        for points outside the problem's region when ``check`` is set.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if check:
            tags = locate_points(self.grid.domain, pts, self.grid)
            bad = ~self._region_ok(tags) & (tags != "near-boundary")
            if np.any(bad):
                raise WrongRegion(
                    f"point {pts[np.argmax(bad)]} is {tags[np.argmax(bad)]}, "
                    f"outside the region of the {self.problem} problem"
                )
        return layer_potentials(
            self.k, self.grid, pts, self.single_density, self.double_density,
            gradient=gradient, check=check,
        )

    def reconstruct(self, x):
        return complex(self.field(np.asarray(x, dtype=float)[None])[0])

    def field_grid(self, pts):
        """Values and region tags; refused or out-of-region points are ``nan``."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        tags = locate_points(self.grid.domain, pts, self.grid)
        ok = self._region_ok(tags)
        vals = np.full(len(pts), np.nan + 1j * np.nan)
        if np.any(ok):
            vals[ok] = layer_potentials(
                self.k, self.grid, pts[ok], self.single_density, self.double_density, check=False
            )
        return vals, tags

    def farfield(self, theta):
        """Far-field pattern ``u_inf`` with ``u ~ exp(ik|x|)/sqrt|x| u_inf``."""
        if is_interior(self.problem):
            raise WrongRegion("interior solutions have no far field")
        k = self.k
        theta = np.atleast_1d(theta)
        xhat = np.stack([np.cos(theta), np.sin(theta)], -1)
        g = self.grid
        phase = np.exp(-1j * k * (xhat @ g.points.T))
        proj = xhat @ g.normals.T
        integrand = (self.single_density[None, :] - 1j * k * proj * self.double_density[None, :])
        gamma = C2 * np.sqrt(2 / (np.pi * k)) * np.exp(-0.25j * np.pi)
        return gamma * np.sum(integrand * phase * g.weights[None, :], axis=1)


def obstruction_basis(problem, k, grid, system=None):
    """Orthonormal basis of the data space the problem cannot absorb."""
    system = system or BoundarySystem(problem, k, grid)
    return system.obstruction()


def compat_project(problem, k, grid, g, basis=None):
    """Remove the obstruction component of ``g``; returns ``(g_compatible, defect)``."""
    g = as_values(grid, g)
    basis = basis or obstruction_basis(problem, k, grid)
    if basis.dim == 0:
        return g.copy(), 0.0
    pg = basis.project(g)
    gn = grid.norm(g)
    defect = grid.norm(pg) / gn if gn > 0 else 0.0
    return g - pg, float(defect)


def solve(spec, system=None):
    """Solve a ``BvpSpec``.

    The least-squares minimiser is returned even when the data are
    incompatible; inspect ``Solution.solvable``.

    Raises
    ------
    SingularGeometry
        If the stacked system loses more rank than the governing
        second-kind operator predicts, which signals under-resolution.
    """
    system = system or BoundarySystem(spec.problem, spec.k, spec.grid)
    basis = system.obstruction()
    if basis.dim:
        predicted = system.predicted_dim()
        if basis.dim > predicted:
            raise SingularGeometry(
                f"stacked system has {basis.dim} null directions but only {predicted} "
                "are predicted; refine the grid"
            )
    g = spec.g
    _, defect = compat_project(spec.problem, spec.k, spec.grid, g, basis)
    phi, psi = system.lstsq(g)
    res = system.residual(phi, psi, g)
    sol = Solution(spec.problem, spec.k, spec.grid, phi, psi, res, defect, basis.dim, basis)
    log.info(
        "%s k=%s N=%d residual=%.3g defect=%.3g kernel_dim=%d",
        spec.problem, spec.k, spec.grid.size, res, defect, basis.dim,
    )
    return sol


def boundary_data(problem, grid, u, grad):
    """Dirichlet trace or outward normal derivative from field samples at nodes."""
    _check_problem(problem)
    if is_dirichlet(problem):
        return np.asarray(u, dtype=complex)
    return np.sum(np.asarray(grad) * grid.normals, axis=1)


def incident_data(problem, k, grid, kind, param):
    """Boundary data for an incident field.

    ``kind`` is ``"plane"`` (``param`` = direction) or ``"point"`` (``param`` =
    source location).  Exterior problems receive the negated trace so that the
    solution is the scattered field; interior problems receive the trace.
    """
    if kind == "plane":
        u, g = plane_wave(k, param, grid.points)
    elif kind == "point":
        u, g = point_source(k, param, grid.points)
    else:
        raise ValueError(f"unknown incident kind {kind!r}")
    data = boundary_data(problem, grid, u, g)
    return -data if not is_interior(problem) else data


def greens_identity_check(k, grid, u_trace, un_trace, x, u_x, exterior=False):
    """Third Green identity defect at ``x``.

    Interior: ``w[u] - v[du/dnu] - u(x)``.  Exterior (radiating ``u``):
    ``-w[u] + v[du/dnu] - u(x)``.  Normal derivatives use the outward normal
    of the domain.
    """
    x = np.asarray(x, dtype=float)[None]
    sign = -1.0 if exterior else 1.0
    val = layer_potentials(k, grid, x, mu=-sign * as_values(grid, un_trace), psi=sign * as_values(grid, u_trace))
    return complex(val[0] - u_x)
