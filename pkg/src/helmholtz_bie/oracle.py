"""Analytic reference solutions on the disk.

Used as ground truth by the tests and the CLI ``oracle`` command.  Apart
from the order 0 and 1 functions in ``specfun`` nothing here touches the
solver modules.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_j, bessel_y

MAX_ORDER = 200


def _miller_start(nmax, z):
    return 2 * ((max(nmax, int(abs(z))) + int(abs(z)) + 40) // 2)


def bessel_jn_all(nmax, z):
    """``J_0(z) .. J_nmax(z)`` by Miller's downward recurrence.

    Normalised with ``J_0 + 2 (J_2 + J_4 + ...) = 1``.
    """
    z = complex(z)
    out = np.zeros(nmax + 1, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    start = _miller_start(nmax, z)
    vals = np.zeros(start + 2, dtype=complex)
    vals[start] = 1e-30
    for n in range(start, 0, -1):
        vals[n - 1] = (2 * n / z) * vals[n] - vals[n + 1]
        if abs(vals[n - 1]) > 1e250:
            vals[n - 1 :] *= 1e-250
    norm = vals[0] + 2 * np.sum(vals[2 : start + 1 : 2])
    # J_0 from the series in specfun fixes the overall scale more accurately
    # when the normalisation sum suffers cancellation (large imaginary part).
    j0 = complex(bessel_j(0, z))
    scale = j0 / vals[0] if abs(vals[0]) > 1e-3 * abs(norm) else 1.0 / norm
    out[:] = vals[: nmax + 1] * scale
    return out


def bessel_yn_all(nmax, z):
    """``Y_0(z) .. Y_nmax(z)`` by upward recurrence (stable for ``Y``)."""
    z = complex(z)
    out = np.zeros(nmax + 1, dtype=complex)
    out[0] = bessel_y(0, z)
    if nmax >= 1:
        out[1] = bessel_y(1, z)
    for n in range(1, nmax):
        out[n + 1] = (2 * n / z) * out[n] - out[n - 1]
    return out


def bessel_jn(m, z):
    """``J_m(z)`` for any integer order ``m``."""
    v = bessel_jn_all(abs(m), z)[abs(m)]
    return (-1) ** m * v if m < 0 else v


def bessel_yn(m, z):
    v = bessel_yn_all(abs(m), z)[abs(m)]
    return (-1) ** m * v if m < 0 else v


def hankel_n(m, z):
    return bessel_jn(m, z) + 1j * bessel_yn(m, z)


def _derivative(vals, m):
    """``f_m'`` from ``f_{m-1}`` and ``f_{m+1}`` for nonnegative ``m``."""
    lower = -vals[1] if m == 0 else vals[m - 1]
    return 0.5 * (lower - vals[m + 1])


def bessel_jn_prime(m, z):
    m = abs(m)
    d = _derivative(bessel_jn_all(m + 1, z), m)
    return d


@dataclass(frozen=True)
class MieSolution:
    """Plane wave scattered by a sound-soft disk of radius ``a`` at the origin.

    ``coefficients[m + M]`` multiplies ``H_m(k r) exp(i m (theta - alpha))``.
    """

    k: complex
    a: float
    d: tuple
    order: int
    coefficients: np.ndarray
    tail: float

    def scattered(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.hypot(x[:, 0], x[:, 1])
        if np.any(r <= self.a):
            raise ValueError("Mie series is evaluated outside the disk only")
        theta = np.arctan2(x[:, 1], x[:, 0])
        alpha = math.atan2(self.d[1], self.d[0])
        M = self.order
        out = np.zeros(len(x), dtype=complex)
        for i, (ri, ti) in enumerate(zip(r, theta)):
            h = bessel_jn_all(M, self.k * ri) + 1j * bessel_yn_all(M, self.k * ri)
            ms = np.arange(-M, M + 1)
            hm = np.where(ms < 0, (-1.0) ** np.abs(ms), 1.0) * h[np.abs(ms)]
            out[i] = np.sum(self.coefficients * hm * np.exp(1j * ms * (ti - alpha)))
        return out

    def total(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = np.asarray(self.d)
        return np.exp(1j * self.k * (x @ d)) + self.scattered(x)


def mie_solution(k, a=1.0, d=(1.0, 0.0), tol=1e-13):
    """Build the Mie series, growing the order until the coefficients fall below ``tol``."""
    k = complex(k)
    d = np.asarray(d, dtype=float)
    d = tuple(d / np.hypot(*d))
    M = int(abs(k) * a) + 8
    while True:
        jn = bessel_jn_all(M, k * a)
        yn = bessel_yn_all(M, k * a)
        ms = np.arange(-M, M + 1)
        sign = np.where(ms < 0, (-1.0) ** np.abs(ms), 1.0)
        jm = sign * jn[np.abs(ms)]
        hm = sign * (jn[np.abs(ms)] + 1j * yn[np.abs(ms)])
        coef = -(1j ** ms) * jm / hm
        tail = float(np.max(np.abs(coef[[0, -1]])))
        if tail < tol or M >= MAX_ORDER:
            return MieSolution(k, float(a), d, M, coef, tail)
        M += 8


def mie_exterior_dirichlet(k, a, d, x):
    """Scattered field of a sound-soft disk so that ``u_s + exp(ik x.d) = 0`` on ``|x| = a``."""
    return mie_solution(k, a, d).scattered(x)


_KINDS = {"J0": (0, False), "J1": (1, False), "J0'": (0, True), "J1'": (1, True), "J2'": (2, True)}


def _bessel_fn(m, prime):
    if prime:
        return lambda x: bessel_jn_prime(m, x).real
    return lambda x: bessel_jn(m, x).real


def bessel_zero(kind, index, tol=1e-12):
    """``index``-th positive zero of ``J_m`` or ``J_m'`` by bracketing and bisection.

    ``kind`` is ``"J0"``, ``"J1"``, ``"J0'"``, ``"J1'"``, ``"J2'"`` or any
    ``"Jm"`` / ``"Jm'"`` with integer ``m``.
    """
    if index < 1:
        raise ValueError("index starts at 1")
    if kind in _KINDS:
        m, prime = _KINDS[kind]
    else:
        prime = kind.endswith("'")
        m = int(kind[1:-1] if prime else kind[1:])
    f = _bessel_fn(m, prime)
    step = 0.05
    x = 1e-3
    fx = f(x)
    found = 0
    while True:
        y = x + step
        fy = f(y)
        if fx == 0 or fx * fy < 0:
            found += 1
            if found == index:
                a, b, fa = x, y, fx
                while b - a > tol:
                    c = 0.5 * (a + b)
                    fc = f(c)
                    if fa * fc <= 0:
                        b = c
                    else:
                        a, fa = c, fc
                return 0.5 * (a + b)
        x, fx = y, fy


def disk_eigenfunction(kind, m, index, x):
    """``J_m(k r) exp(i m theta)`` for the ``index``-th Dirichlet or Neumann eigenvalue of the unit disk."""
    if kind not in ("dirichlet", "neumann"):
        raise ValueError("kind must be 'dirichlet' or 'neumann'")
    k = bessel_zero(f"J{abs(m)}'" if kind == "neumann" else f"J{abs(m)}", index)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.hypot(x[:, 0], x[:, 1])
    theta = np.arctan2(x[:, 1], x[:, 0])
    vals = np.array([bessel_jn(m, k * ri) for ri in r])
    out = vals * np.exp(1j * m * theta)
    return out if len(out) > 1 else out[0]


def disk_eigenvalue(kind, m, index):
    return bessel_zero(f"J{abs(m)}'" if kind == "neumann" else f"J{abs(m)}", index)
