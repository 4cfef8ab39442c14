"""Eigenvalue scans, eigenfunctions from kernel densities and the map Xi.

Eigenvalues are located as dips of the smallest relative singular value of
the stacked boundary system of the matching problem, then refined by
golden-section search.  ``Xi[phi, psi] = v[phi] + w[psi]`` represents
interior solutions by a single layer density plus a double layer density
taken from the kernel of ``-1/2 I + W``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bvp import KERNEL_TOL, TRUNCATION, BoundarySystem
from .errors import HypothesisViolated, NoConvergence, UnresolvedDip
from .geometry import build_grid, locate_points
from .nystrom import assemble_all
from .potentials import as_values, layer_potentials
from .specfun import as_wavenumber

log = logging.getLogger(__name__)

SCAN_ROLES = {
    "interior-dirichlet": "interior-dirichlet",
    "interior-neumann": "interior-neumann",
    "exterior-dirichlet-bounded": "exterior-dirichlet",
}
ROOT_DEPTH = 1e-4
REFINE_XTOL = 1e-10
XI_FIT_TOL = 1e-5


def sigma_profile(role, grid, k):
    """Singular values of the weighted stacked system, divided by the largest."""
    s = BoundarySystem(SCAN_ROLES[role], k, grid).s
    return s / s[0]


def sigma_min(role, grid, k):
    return float(sigma_profile(role, grid, k)[-1])


@dataclass
class EigenScanResult:
    role: str
    k: np.ndarray
    sigma: np.ndarray
    roots: list = field(default_factory=list)
    dims: list = field(default_factory=list)
    sigma_at_roots: list = field(default_factory=list)

    def as_dict(self):
        return {
            "role": self.role,
            "roots": [float(r) for r in self.roots],
            "dims": [int(d) for d in self.dims],
            "sigma_at_roots": [float(s) for s in self.sigma_at_roots],
        }


def golden_section(f, lo, hi, xtol):
    """Minimise a unimodal function on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def refine_root(role, grid, lo, hi, xtol=REFINE_XTOL):
    """Minimise the smallest relative singular value on ``[lo, hi]``."""
    x, fx = golden_section(lambda k: sigma_min(role, grid, k), lo, hi, xtol)
    return float(x), float(fx)


def eigen_scan(role, grid, k_range, samples=128, workers=1):
    """Scan ``k_range`` for eigenvalues of the given role.

    Parameters
    ----------
    role : {"interior-dirichlet", "interior-neumann", "exterior-dirichlet-bounded"}
    grid : QuadGrid
    k_range : (float, float)
    samples : int
        At least 64 equispaced samples.
    workers : int
        Threads used for the sample sweep.

    Raises
    ------
    UnresolvedDip
        When a dip's minimum runs into its sampling bracket, meaning the
        dip is narrower than the sample spacing.
    """
    if role not in SCAN_ROLES:
        raise ValueError(f"unknown scan role {role!r}; choose from {sorted(SCAN_ROLES)}")
    lo, hi = map(float, k_range)
    if not 0 < lo < hi:
        raise ValueError("k_range must satisfy 0 < k_min < k_max")
    if samples < 64:
        raise ValueError("eigen_scan needs at least 64 samples")
    ks = np.linspace(lo, hi, samples)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            sig = np.array(list(ex.map(lambda k: sigma_min(role, grid, k), ks)))
    else:
        sig = np.array([sigma_min(role, grid, k) for k in ks])
    result = EigenScanResult(role, ks, sig)
    median = float(np.median(sig))
    step = ks[1] - ks[0]
    for i in range(1, samples - 1):
        if not (sig[i] < sig[i - 1] and sig[i] <= sig[i + 1]):
            continue
        root, smin = refine_root(role, grid, ks[i - 1], ks[i + 1])
        if smin >= ROOT_DEPTH * median:
            continue
        if min(root - ks[i - 1], ks[i + 1] - root) < 1e-3 * step:
            raise UnresolvedDip(
                f"dip near k={root:.8f} is narrower than the sample spacing {step:.3g}; "
                "increase the number of samples"
            )
        prof = sigma_profile(role, grid, root)
        dim = int(np.sum(prof < KERNEL_TOL))
        log.info("root %.10f sigma=%.3g dim=%d", root, smin, dim)
        result.roots.append(root)
        result.dims.append(max(dim, 1))
        result.sigma_at_roots.append(smin)
    return result


def _normalize(vecs, grid):
    """Weighted-orthonormal columns, each phased so its largest entry is real positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        v = out[:, j]
        v = v / grid.norm(v)
        i = np.argmax(np.abs(v))
        out[:, j] = v * np.exp(-1j * np.angle(v[i]))
    return out


def operator_kernel(matrix, grid, tol=KERNEL_TOL):
    """Nodal basis of the null space of a square operator (weighted SVD)."""
    sw = np.sqrt(grid.weights)
    _, s, vh = np.linalg.svd(sw[:, None] * matrix / sw[None, :])
    d = int(np.sum(s < tol * s[0]))
    if d == 0:
        return np.zeros((grid.size, 0), dtype=complex)
    return _normalize(np.conj(vh[-d:]).T / sw[:, None], grid)


def dirichlet_kernel(k, grid):
    """Kernel of ``1/2 I + Wt``: normal derivatives of Dirichlet eigenfunctions."""
    wt = assemble_all(k, grid, ("Wt",))["Wt"].matrix
    return operator_kernel(0.5 * np.eye(grid.size) + wt, grid)


def _hole_grids(grid):
    n = max(grid.n_per_curve)
    return [build_grid(d, n) for d in grid.domain.hole_domains()]


def _check_holes(role, k, grid, what):
    for j, hg in enumerate(_hole_grids(grid), start=1):
        if BoundarySystem(role, k, hg).cokernel_dim:
            raise HypothesisViolated(f"k^2 is a {what} eigenvalue of bounded exterior component {j}")


@dataclass(frozen=True, eq=False)
class EigenFunction:
    """``u = -v[mu]`` built from a kernel density of ``1/2 I + Wt``."""

    k: complex
    grid: object
    mu: np.ndarray
    trace_defect: float
    exterior_max: float

    def __call__(self, pts, check=True):
        return layer_potentials(self.k, self.grid, pts, mu=-self.mu, check=check)


def interior_samples(grid, n=24):
    """Points of a regular box grid that lie inside the domain, clear of the boundary."""
    pts = grid.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    cand = np.array([(x, y) for y in ys for x in xs])
    tags = locate_points(grid.domain, cand, grid)
    return cand[tags == "interior"]


def _exterior_probes(grid, m=8):
    d = grid.domain.diameter()
    c = grid.points.mean(axis=0)
    ang = 2 * np.pi * np.arange(m) / m
    return c + 1.5 * d * np.stack([np.cos(ang), np.sin(ang)], -1)


def eigenfunction_from_density(k, grid, mu):
    """Dirichlet eigenfunction ``-v[mu]`` from a kernel density.

    Raises
    ------
    HypothesisViolated
        If ``k^2`` is a Neumann eigenvalue of a hole, where the single layer
        representation of the eigenfunction can fail.
    """
    k = as_wavenumber(k).k
    mu = as_values(grid, mu)
    _check_holes("interior-neumann", k, grid, "Neumann")
    V = assemble_all(k, grid, ("V",))["V"].matrix
    scale = grid.norm(mu)
    trace = grid.norm(V @ mu) / scale if scale else 0.0
    probes = _exterior_probes(grid)
    ext = float(np.max(np.abs(layer_potentials(k, grid, probes, mu=mu)))) / max(scale, 1e-300)
    if trace > 1e-6 or ext > 1e-6:
        log.warning("eigenfunction checks: trace %.3g, exterior %.3g", trace, ext)
    return EigenFunction(k, grid, mu, float(trace), ext)


@dataclass
class HolmgrenReport:
    density_norms: list
    interior_max: list
    gram_rank: int
    gram_cond: float
    conjugate_defect: float

    @property
    def ok(self):
        return (
            all(n > 1e-6 for n in self.density_norms)
            and all(m > 1e-3 for m in self.interior_max)
            and self.gram_rank == len(self.density_norms)
        )


def holmgren_injectivity_check(k, grid, kernel_basis, samples=None):
    """Check that distinct kernel densities give independent eigenfunctions."""
    basis = np.asarray(kernel_basis)
    if basis.ndim == 1:
        basis = basis[:, None]
    d = basis.shape[1]
    if d == 0:
        return HolmgrenReport([], [], 0, 1.0, 0.0)
    pts = interior_samples(grid) if samples is None else samples
    fields = np.stack(
        [layer_potentials(k, grid, pts, mu=-basis[:, j], check=False) for j in range(d)], -1
    )
    gram = np.conj(fields).T @ fields / len(pts)
    s = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(s > KERNEL_TOL * s[0]))
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    # conjugates of kernel densities stay in the kernel span for real k
    w = grid.weights
    coef = (np.conj(basis).T * w) @ np.conj(basis)
    resid = np.conj(basis) - basis @ coef
    conj_def = max(grid.norm(resid[:, j]) / grid.norm(basis[:, j]) for j in range(d))
    return HolmgrenReport(
        [grid.norm(basis[:, j]) for j in range(d)],
        [float(np.max(np.abs(fields[:, j]))) for j in range(d)],
        rank, cond, float(conj_def),
    )


@dataclass(frozen=True, eq=False)
class XiDecomposition:
    """Interior solution written as ``v[phi] + w[psi]``."""

    k: complex
    grid: object
    phi: np.ndarray
    psi: np.ndarray
    error: float
    kernel_dim: int

    def __call__(self, pts, check=True):
        return layer_potentials(self.k, self.grid, pts, mu=self.phi, psi=self.psi, check=check)


def _weighted_lstsq(A, b, grid):
    sw = np.sqrt(grid.weights)
    u, s, vh = np.linalg.svd(sw[:, None] * A / sw[None, :])
    keep = s > TRUNCATION * s[0]
    y = np.conj(vh[keep]).T @ ((np.conj(u[:, keep]).T @ (sw * b)) / s[keep])
    return y / sw


def xi_decompose(k, grid, u_trace, un_trace):
    """Split an interior solution into ``v[phi] + w[psi]``.

    ``phi`` is the minimum-norm solution of ``(-1/2 I + Wt) phi = du/dnu``,
    hence orthogonal to the kernel of that operator; ``psi`` lies in the
    kernel of ``-1/2 I + W`` and absorbs whatever trace ``v[phi]`` misses.

    Raises
    ------
    HypothesisViolated
        If ``k^2`` is a Dirichlet eigenvalue of a hole.
    NoConvergence
        If the kernel fit leaves a relative residual above ``XI_FIT_TOL``.
    """
    k = as_wavenumber(k).k
    u = as_values(grid, u_trace)
    un = as_values(grid, un_trace)
    _check_holes("interior-dirichlet", k, grid, "Dirichlet")
    ops = assemble_all(k, grid, ("V", "W", "Wt"))
    eye = np.eye(grid.size)
    A = -0.5 * eye + ops["Wt"].matrix
    phi = _weighted_lstsq(A, un, grid)
    r = u - ops["V"].matrix @ phi
    K = operator_kernel(-0.5 * eye + ops["W"].matrix, grid)
    if K.shape[1]:
        coef = _weighted_lstsq_rect((0.5 * eye + ops["W"].matrix) @ K, r, grid)
        psi = K @ coef
    else:
        psi = np.zeros(grid.size, dtype=complex)
    fit = ops["V"].matrix @ phi + (0.5 * eye + ops["W"].matrix) @ psi - u
    scale = grid.norm(u)
    err = grid.norm(fit) / scale if scale > 0 else grid.norm(fit)
    if err > XI_FIT_TOL:
        raise NoConvergence(f"Xi fit residual {err:.3g} exceeds {XI_FIT_TOL:g}")
    return XiDecomposition(k, grid, phi, psi, float(err), K.shape[1])


def _weighted_lstsq_rect(B, r, grid):
    sw = np.sqrt(grid.weights)
    coef, *_ = np.linalg.lstsq(sw[:, None] * B, sw * r, rcond=None)
    return coef


def single_layer_condition(k, grid):
    """Condition number of the weighted single layer matrix."""
    V = assemble_all(k, grid, ("V",))["V"].matrix
    sw = np.sqrt(grid.weights)
    return float(np.linalg.cond(sw[:, None] * V / sw[None, :]))
