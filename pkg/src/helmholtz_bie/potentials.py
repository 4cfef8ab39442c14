"""Off-boundary evaluation of single and double layer potentials.

All potentials use the trapezoid rule on the boundary grid, which is
spectrally accurate for points that stay a few node spacings away from
the curves.  Closer points are refused rather than evaluated inaccurately.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import NearBoundary
from .geometry import REFUSAL_SPACINGS, QuadGrid, locate_points
from .specfun import C2, as_wavenumber

log = logging.getLogger(__name__)

_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class Density:
    """Complex nodal samples of a boundary density on ``grid``."""

    grid: QuadGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise ValueError(f"density has shape {v.shape}, grid has {self.grid.size} nodes")
        if not np.all(np.isfinite(v)):
            raise ValueError("density contains non-finite values")
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def as_values(grid, mu):
    """Nodal values from a ``Density``, an array or ``None`` (zero)."""
    if mu is None:
        return np.zeros(grid.size, dtype=complex)
    if isinstance(mu, Density):
        return mu.values
    mu = np.asarray(mu, dtype=complex)
    if mu.shape == ():
        return np.full(grid.size, complex(mu))
    if mu.shape != (grid.size,):
        raise ValueError(f"density has shape {mu.shape}, grid has {grid.size} nodes")
    return mu


def radial_kernels(k, r, outgoing=True):
    """``S``, ``S'`` and ``S''`` as functions of the radius.

    With ``outgoing=False`` the incoming kernel (Hankel function of the
    second kind) is returned instead; it is used only as a negative control
    for the radiation condition.
    """
    j0, j1, y0, y1 = _accel.bessel01(np.asarray(k * r, dtype=complex))
    s = 1j if outgoing else -1j
    h0 = j0 + s * y0
    h1 = j1 + s * y1
    d0 = C2 * h0
    d1 = -C2 * k * h1
    d2 = -C2 * k * k * (h0 - h1 / (k * r))
    return d0, d1, d2


def refused_mask(grid, pts):
    """True where a point lies inside the refusal band of any curve."""
    pts = np.atleast_2d(pts)
    mask = np.zeros(len(pts), dtype=bool)
    for c, s in enumerate(grid.slices):
        nodes = grid.points[s]
        d2 = (pts[:, None, 0] - nodes[None, :, 0]) ** 2 + (pts[:, None, 1] - nodes[None, :, 1]) ** 2
        mask |= d2.min(axis=1) < (REFUSAL_SPACINGS * grid.spacing(c)) ** 2
    return mask


def _check_band(grid, pts):
    bad = refused_mask(grid, pts)
    if np.any(bad):
        p = np.atleast_2d(pts)[np.argmax(bad)]
        raise NearBoundary(
            f"point ({p[0]:.6g}, {p[1]:.6g}) lies within {REFUSAL_SPACINGS:g} node spacings "
            "of the boundary; refine the grid or move the point"
        )


def layer_potentials(k, grid, pts, mu=None, psi=None, gradient=False, check=True, outgoing=True):
    """Evaluate ``v[mu] + w[psi]`` (and optionally its gradient) at points.

    Parameters
    ----------
    k : complex or Wavenumber
    grid : QuadGrid
    pts : array_like, shape (M, 2)
    mu, psi : Density, array or None
        Single and double layer densities; ``None`` means zero.
    gradient : bool
        Also return the gradient, shape ``(M, 2)``.
    check : bool
        Raise ``NearBoundary`` for points inside the refusal band.

    Returns
    -------
    ndarray or tuple of ndarray
    """
    k = as_wavenumber(k).k
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if check:
        _check_band(grid, pts)
    a = as_values(grid, mu) * grid.weights
    b = as_values(grid, psi) * grid.weights
    use_w = np.any(b != 0)
    use_v = np.any(a != 0)
    out = np.zeros(len(pts), dtype=complex)
    grad = np.zeros((len(pts), 2), dtype=complex)
    if not (use_v or use_w):
        return (out, grad) if gradient else out
    y = grid.points
    nu = grid.normals
    step = max(1, _CHUNK // grid.size)
    for lo in range(0, len(pts), step):
        p = pts[lo : lo + step]
        dx = p[:, None, 0] - y[None, :, 0]
        dy = p[:, None, 1] - y[None, :, 1]
        r = np.hypot(dx, dy)
        s0, s1, s2 = radial_kernels(k, r, outgoing)
        ex, ey = dx / r, dy / r
        en = ex * nu[None, :, 0] + ey * nu[None, :, 1]
        if use_v:
            out[lo : lo + step] += s0 @ a
        if use_w:
            # d/dnu_y S(x - y) = -S'(r) (x - y).nu(y) / r
            out[lo : lo + step] -= (s1 * en) @ b
        if gradient:
            g = s1 / r
            if use_v:
                grad[lo : lo + step, 0] += (s1 * ex) @ a
                grad[lo : lo + step, 1] += (s1 * ey) @ a
            if use_w:
                # -Hess S(x - y) nu(y)
                hx = (s2 - g) * en * ex + g * nu[None, :, 0]
                hy = (s2 - g) * en * ey + g * nu[None, :, 1]
                grad[lo : lo + step, 0] -= hx @ b
                grad[lo : lo + step, 1] -= hy @ b
    return (out, grad) if gradient else out


def single_layer_field(k, grid, mu, x):
    """Single layer potential ``v[mu](x)`` at one point."""
    return complex(layer_potentials(k, grid, np.asarray(x, dtype=float)[None], mu=mu)[0])


def double_layer_field(k, grid, psi, x):
    """Double layer potential ``w[psi](x)`` at one point."""
    return complex(layer_potentials(k, grid, np.asarray(x, dtype=float)[None], psi=psi)[0])


@dataclass(frozen=True)
class FieldSample:
    point: tuple
    value: complex
    region: str


def field_on_points(k, grid, pts, mu=None, psi=None, scale_mu=1.0, scale_psi=1.0):
    """Batch evaluation that marks refused points instead of raising.

    Returns ``(values, regions)``; refused points carry ``nan`` values and
    the region tag ``"near-boundary"``.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    regions = locate_points(grid.domain, pts, grid)
    ok = regions != "near-boundary"
    vals = np.full(len(pts), np.nan + 1j * np.nan)
    if np.any(ok):
        m = None if mu is None else scale_mu * as_values(grid, mu)
        p = None if psi is None else scale_psi * as_values(grid, psi)
        vals[ok] = layer_potentials(k, grid, pts[ok], m, p, check=False)
    return vals, regions


def radiation_residual(k, grid, mu=None, psi=None, radii=(10.0, 100.0), n_angles=64, incoming=False):
    """Sommerfeld defect ``max_theta sqrt(r) |du/dr - i k u|`` per radius.

    ``u = v[mu] + w[psi]``.  Set ``incoming=True`` to use the conjugate
    (incoming) kernel, whose defect does not decay.
    """
    k = as_wavenumber(k).k
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    xhat = np.stack([np.cos(theta), np.sin(theta)], -1)
    res = []
    for rad in radii:
        pts = rad * xhat
        u, g = layer_potentials(k, grid, pts, mu, psi, gradient=True, check=False, outgoing=not incoming)
        ur = np.sum(g * xhat, axis=1)
        res.append(float(np.sqrt(rad) * np.max(np.abs(ur - 1j * k * u))))
    return res


def plane_wave(k, d, x):
    """``exp(i k x.d)`` and its gradient for unit direction ``d``."""
    k = as_wavenumber(k).k
    d = np.asarray(d, dtype=float)
    d = d / np.hypot(*d)
    x = np.atleast_2d(x)
    u = np.exp(1j * k * (x @ d))
    return u, 1j * k * u[:, None] * d[None, :]


def point_source(k, x0, x):
    """``S(x - x0)`` and its gradient in ``x``."""
    k = as_wavenumber(k).k
    diff = np.atleast_2d(x) - np.asarray(x0, dtype=float)
    r = np.hypot(diff[:, 0], diff[:, 1])
    s0, s1, _ = radial_kernels(k, r)
    return s0, (s1 / r)[:, None] * diff


def traces(grid, field):
    """Dirichlet and normal-derivative traces of ``field(points) -> (u, grad)``."""
    u, g = field(grid.points)
    return u, np.sum(g * grid.normals, axis=1)
