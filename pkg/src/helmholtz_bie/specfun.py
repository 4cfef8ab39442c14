"""Bessel and Hankel functions of orders 0 and 1, and the outgoing
fundamental solution of the two-dimensional Helmholtz operator.

Sign convention: the fundamental solution returned here is

    S(x) = (1 / 4i) H0^(1)(k |x|),

which satisfies ``(Delta + k^2) S = delta``.  This is the negative of the
frequently used Green's function ``(i/4) H0^(1)``, which solves
``(Delta + k^2) G = -delta``.  All layer potentials in this package are
built on ``S``, so near the origin ``S(x) ~ log|x| / (2 pi)`` like the
Laplace kernel with the same sign convention.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import BranchCut, InvalidWavenumber, OriginSingularity

C2 = 1.0 / 4j


@dataclass(frozen=True)
class Wavenumber:
    """Complex wavenumber ``k`` with ``Im k >= 0`` and ``k`` off ``(-inf, 0]``."""

    k: complex

    def __post_init__(self):
        k = complex(self.k)
        if not (np.isfinite(k.real) and np.isfinite(k.imag)):
            raise InvalidWavenumber(f"non-finite wavenumber {k!r}")
        if k.imag < 0:
            raise InvalidWavenumber(f"Im k must be >= 0, got {k!r}")
        if k.imag == 0 and k.real <= 0:
            raise InvalidWavenumber(f"k lies on the excluded half-line (-inf, 0]: {k!r}")
        object.__setattr__(self, "k", k)

    @property
    def lam(self):
        """The spectral parameter ``lambda = k**2``."""
        return self.k * self.k

    def __complex__(self):
        return self.k


def as_wavenumber(k):
    return k if isinstance(k, Wavenumber) else Wavenumber(k)


def _k(k):
    return as_wavenumber(k).k


def _check_order(order):
    if order not in (0, 1):
        raise ValueError(f"only orders 0 and 1 are supported, got {order!r}")


def _check_branch(z):
    z = np.asarray(z, dtype=np.complex128)
    bad = (z.imag == 0) & (z.real <= 0)
    if np.any(bad):
        raise BranchCut("argument on the branch cut (-inf, 0]")
    return z


def _scalarize(z, out):
    return out[()] if np.ndim(z) == 0 else out


def bessel_j(order, z):
    """Bessel function of the first kind ``J_order(z)``, order 0 or 1."""
    _check_order(order)
    za = np.asarray(z, dtype=np.complex128)
    vals = _accel.bessel01(za)
    return _scalarize(z, vals[order])


def bessel_y(order, z):
    """Bessel function of the second kind ``Y_order(z)`` (principal branch).

    Raises
    ------
    BranchCut
        If any ``z`` lies on ``(-inf, 0]``.
    """
    _check_order(order)
    za = _check_branch(z)
    vals = _accel.bessel01(za)
    return _scalarize(z, vals[2 + order])


def hankel1(order, z):
    """Hankel function of the first kind ``H_order^(1)(z) = J + iY``."""
    _check_order(order)
    za = _check_branch(z)
    vals = _accel.bessel01(za)
    return _scalarize(z, vals[order] + 1j * vals[2 + order])


def hankel01(z):
    """``(H0^(1)(z), H1^(1)(z), J0(z), J1(z))`` in a single kernel pass.

    No branch-cut check; callers guarantee ``z = k r`` with ``r > 0``.
    """
    j0, j1, y0, y1 = _accel.bessel01(np.asarray(z, dtype=np.complex128))
    return j0 + 1j * y0, j1 + 1j * y1, j0, j1


def _radii(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of size 2")
    r = np.hypot(x[..., 0], x[..., 1])
    if np.any(r == 0):
        raise OriginSingularity("fundamental solution is singular at x = 0")
    return x, r


def fundamental_solution(k, x):
    """Outgoing fundamental solution ``S(x) = H0^(1)(k|x|) / (4i)``.

    ``x`` is a point difference of shape ``(2,)`` or ``(..., 2)``.
    """
    k = _k(k)
    x, r = _radii(x)
    h0, _, _, _ = hankel01(k * r)
    return _scalarize(r, C2 * h0)


def fundamental_radial(k, r):
    """``S(r)`` and ``S'(r)`` for radii ``r > 0`` (no checks)."""
    h0, h1, _, _ = hankel01(k * r)
    return C2 * h0, -C2 * k * h1


def fundamental_gradient(k, x):
    """Gradient ``DS(x) = -C2 k H1^(1)(k|x|) x/|x|``; shape ``(..., 2)``."""
    k = _k(k)
    x, r = _radii(x)
    _, ds = fundamental_radial(k, r)
    return (ds / r)[..., None] * x


def fundamental_hessian(k, x):
    """Second derivatives ``D^2 S(x)``; shape ``(..., 2, 2)``."""
    k = _k(k)
    x, r = _radii(x)
    h0, h1, _, _ = hankel01(k * r)
    d1 = -C2 * k * h1
    d2 = -C2 * k * k * (h0 - h1 / (k * r))
    xh = x / r[..., None]
    outer = xh[..., :, None] * xh[..., None, :]
    eye = np.eye(2)
    return d2[..., None, None] * outer + (d1 / r)[..., None, None] * (eye - outer)
