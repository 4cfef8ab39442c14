"""Shared numerical helpers for the test suite."""

import numpy as np

from helmholtz_bie.geometry import build_grid
from helmholtz_bie.potentials import layer_potentials

DISTANCES = (0.2, 0.1, 0.05)
FINE_DISTANCES = (0.04, 0.03, 0.02, 0.01, 0.005)
FINE_N = 8192


def analytic_density(seed=0, modes=5):
    """A random trigonometric polynomial in the curve parameter."""
    rng = np.random.default_rng(seed)
    m = np.arange(-modes, modes + 1)
    c = (rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)) * np.exp(-0.3 * np.abs(m))
    return lambda t: np.exp(1j * np.outer(np.atleast_1d(t), m)) @ c


def extrapolate(distances, values):
    """Polynomial extrapolation to distance zero through all samples."""
    d = np.asarray(distances)
    A = np.vander(d, len(d), increasing=True)
    return np.linalg.solve(A, np.asarray(values))[0]


def normal_limits(k, grid, nodes, mu_fn, kind, side, fine_n=1024, distances=DISTANCES):
    """Richardson limits of a layer quantity approaching boundary nodes.

    ``kind``: "w" (double layer value), "dw" (its normal derivative) or
    "dv" (normal derivative of the single layer).  ``side`` is "interior"
    (approach against the normal) or "exterior".
    """
    fine = build_grid(grid.domain, fine_n)
    dens = mu_fn(fine.t)
    x = grid.points[nodes]
    nu = grid.normals[nodes]
    sgn = -1.0 if side == "interior" else 1.0
    vals = []
    for d in distances:
        pts = x + sgn * d * nu
        if kind == "w":
            vals.append(layer_potentials(k, fine, pts, psi=dens))
            continue
        mu, psi = (dens, None) if kind == "dv" else (None, dens)
        _, g = layer_potentials(k, fine, pts, mu=mu, psi=psi, gradient=True)
        vals.append(np.sum(g * nu, axis=1))
    return extrapolate(distances, vals)
