"""Hot kernel: simultaneous evaluation of J0, J1, Y0, Y1 at complex arguments.

Two interchangeable back ends compute the same three-branch algorithm:

* ``|z| <= SERIES_MAX``: ascending power series (with the logarithmic
  series for Y).
* ``SERIES_MAX < |z| <= ASYMPTOTIC_MIN``: Miller's downward recurrence for
  J_n, normalised by ``J0 + 2 sum J_2k = 1``, and Neumann series for Y0, Y1.
* ``|z| > ASYMPTOTIC_MIN``: Hankel asymptotic expansion.

The numba back end is used when numba is importable and the environment
variable ``HELMBIE_DISABLE_NUMBA`` is unset or ``0``. The pure-numpy back end
is fully vectorised and is always available as ``bessel01_numpy``.
"""

import cmath
import math
import os

import numpy as np

SERIES_MAX = 8.0
ASYMPTOTIC_MIN = 25.0
EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 40
_ASYMPTOTIC_TERMS = 40
_TWO_OVER_PI = 2.0 / math.pi


def _numba_requested():
    flag = os.environ.get("HELMBIE_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


try:  # pragma: no cover - exercised implicitly depending on environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def _miller_order(absz):
    return 2 * ((int(absz) + 40) // 2)


# ---------------------------------------------------------------------------
# scalar reference (compiled by numba when available)
# ---------------------------------------------------------------------------
def _bessel01_scalar(z):
    absz = abs(z)
    if absz <= SERIES_MAX:
        q = -0.25 * z * z
        t0 = 1.0 + 0.0j  # (q^k)/(k!)^2
        t1 = 1.0 + 0.0j  # (q^k)/(k!(k+1)!)
        j0 = t0
        s1 = t1
        harm = 0.0
        y0s = 0.0 + 0.0j
        psi_k1 = -EULER_GAMMA
        psi_k2 = 1.0 - EULER_GAMMA
        y1s = (psi_k1 + psi_k2) * t1
        for k in range(1, _SERIES_TERMS):
            t0 = t0 * q / (k * k)
            t1 = t1 * q / (k * (k + 1))
            harm += 1.0 / k
            j0 += t0
            s1 += t1
            y0s += harm * t0
            psi_k1 = psi_k2
            psi_k2 = psi_k2 + 1.0 / (k + 1)
            y1s += (psi_k1 + psi_k2) * t1
            if abs(t0) < 1e-17 * abs(j0) and abs(t1) < 1e-17 * abs(s1):
                break
        j1 = 0.5 * z * s1
        if absz == 0.0:
            return j0, j1, complex(-math.inf, 0.0), complex(-math.inf, 0.0)
        lg = cmath.log(0.5 * z)
        y0 = _TWO_OVER_PI * ((lg + EULER_GAMMA) * j0 - y0s)
        y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * lg * j1 - (0.5 * z / math.pi) * y1s
        return j0, j1, y0, y1
    if absz <= ASYMPTOTIC_MIN:
        m = 2 * ((int(absz) + 40) // 2)
        jn = np.zeros(m + 2, dtype=np.complex128)
        jn[m] = 1e-30
        for n in range(m, 0, -1):
            jn[n - 1] = (2.0 * n / z) * jn[n] - jn[n + 1]
        norm = jn[0]
        for k in range(1, m // 2 + 1):
            norm += 2.0 * jn[2 * k]
        j0 = jn[0] / norm
        j1 = jn[1] / norm
        s0 = 0.0 + 0.0j
        s1 = 0.0 + 0.0j
        sign = -1.0
        for k in range(1, m // 2):
            s0 += sign * jn[2 * k] / k
            s1 += sign * (jn[2 * k - 1] - jn[2 * k + 1]) / k
            sign = -sign
        s0 /= norm
        s1 /= norm
        lg = cmath.log(0.5 * z) + EULER_GAMMA
        y0 = _TWO_OVER_PI * (lg * j0 - 2.0 * s0)
        y1 = _TWO_OVER_PI * (lg * j1 - j0 / z + s1)
        return j0, j1, y0, y1
    # Hankel asymptotics, orders 0 and 1 together
    pre = cmath.sqrt(_TWO_OVER_PI / z)
    e1 = cmath.exp(1j * (z - 0.25 * math.pi))
    e2 = cmath.exp(-1j * (z - 0.25 * math.pi))
    p0 = 1.0 + 0.0j
    q0 = 1.0 + 0.0j
    p1 = 1.0 + 0.0j
    q1 = 1.0 + 0.0j
    a0 = 1.0 + 0.0j
    a1 = 1.0 + 0.0j
    last0 = 1e300
    last1 = 1e300
    live0 = True
    live1 = True
    ik = 1.0 + 0.0j
    for k in range(1, _ASYMPTOTIC_TERMS):
        c = (2.0 * k - 1.0) ** 2
        a0 = a0 * (0.0 - c) / (k * 8.0 * z)
        a1 = a1 * (4.0 - c) / (k * 8.0 * z)
        ik = ik * 1j
        if live0:
            if abs(a0) > last0:
                live0 = False
            else:
                p0 += ik * a0
                q0 += ik.conjugate() * a0
                last0 = abs(a0)
        if live1:
            if abs(a1) > last1:
                live1 = False
            else:
                p1 += ik * a1
                q1 += ik.conjugate() * a1
                last1 = abs(a1)
        if (not live0 and not live1) or (last0 < 1e-17 and last1 < 1e-17):
            break
    h10 = pre * e1 * p0
    h20 = pre * e2 * q0
    # order one picks up an extra phase of -pi/2 (resp. +pi/2)
    h11 = pre * e1 * (-1j) * p1
    h21 = pre * e2 * (1j) * q1
    j0 = 0.5 * (h10 + h20)
    j1 = 0.5 * (h11 + h21)
    y0 = (h10 - h20) / 2j
    y1 = (h11 - h21) / 2j
    return j0, j1, y0, y1


def _make_loop_jit():
    scalar = numba.njit(cache=True)(_bessel01_scalar)

    @numba.njit(cache=True)
    def loop(z, j0, j1, y0, y1):
        for i in range(z.size):
            a, b, c, d = scalar(z[i])
            j0[i] = a
            j1[i] = b
            y0[i] = c
            y1[i] = d

    return loop


_loop_jit = _make_loop_jit() if HAVE_NUMBA else None


def bessel01_numba(z):
    """Numba back end. ``z`` is any complex array; returns four arrays."""
    z = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(z.ravel())
    out = [np.empty_like(flat) for _ in range(4)]
    _loop_jit(flat, *out)
    return tuple(o.reshape(z.shape) for o in out)


# ---------------------------------------------------------------------------
# vectorised numpy back end
# ---------------------------------------------------------------------------
def _series_np(z):
    q = -0.25 * z * z
    t0 = np.ones_like(z)
    t1 = np.ones_like(z)
    j0 = t0.copy()
    s1 = t1.copy()
    y0s = np.zeros_like(z)
    harm = 0.0
    psi_k1 = -EULER_GAMMA
    psi_k2 = 1.0 - EULER_GAMMA
    y1s = (psi_k1 + psi_k2) * t1
    for k in range(1, _SERIES_TERMS):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        harm += 1.0 / k
        j0 = j0 + t0
        s1 = s1 + t1
        y0s = y0s + harm * t0
        psi_k1 = psi_k2
        psi_k2 = psi_k2 + 1.0 / (k + 1)
        y1s = y1s + (psi_k1 + psi_k2) * t1
        if np.all(np.abs(t0) < 1e-17 * np.abs(j0)) and np.all(np.abs(t1) < 1e-17 * np.abs(s1)):
            break
    j1 = 0.5 * z * s1
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log(0.5 * z)
        y0 = _TWO_OVER_PI * ((lg + EULER_GAMMA) * j0 - y0s)
        y1 = -_TWO_OVER_PI / z + _TWO_OVER_PI * lg * j1 - (0.5 * z / math.pi) * y1s
    zero = z == 0
    if np.any(zero):
        y0 = np.where(zero, -np.inf + 0j, y0)
        y1 = np.where(zero, -np.inf + 0j, y1)
    return j0, j1, y0, y1


def _miller_np(z):
    m = _miller_order(float(np.max(np.abs(z))))
    jn = np.zeros((m + 2,) + z.shape, dtype=np.complex128)
    jn[m] = 1e-30
    for n in range(m, 0, -1):
        jn[n - 1] = (2.0 * n / z) * jn[n] - jn[n + 1]
    norm = jn[0] + 2.0 * jn[2 : m + 1 : 2].sum(axis=0)
    k = np.arange(1, m // 2)
    sign = np.where(k % 2 == 1, -1.0, 1.0)
    shape = (-1,) + (1,) * z.ndim
    wk = (sign / k).reshape(shape)
    s0 = (wk * jn[2 * k]).sum(axis=0) / norm
    s1 = (wk * (jn[2 * k - 1] - jn[2 * k + 1])).sum(axis=0) / norm
    j0 = jn[0] / norm
    j1 = jn[1] / norm
    lg = np.log(0.5 * z) + EULER_GAMMA
    y0 = _TWO_OVER_PI * (lg * j0 - 2.0 * s0)
    y1 = _TWO_OVER_PI * (lg * j1 - j0 / z + s1)
    return j0, j1, y0, y1


def _asymptotic_np(z):
    pre = np.sqrt(_TWO_OVER_PI / z)
    e1 = np.exp(1j * (z - 0.25 * math.pi))
    e2 = np.exp(-1j * (z - 0.25 * math.pi))
    p0 = np.ones_like(z)
    q0 = np.ones_like(z)
    p1 = np.ones_like(z)
    q1 = np.ones_like(z)
    a0 = np.ones_like(z)
    a1 = np.ones_like(z)
    last0 = np.full(z.shape, 1e300)
    last1 = np.full(z.shape, 1e300)
    live0 = np.ones(z.shape, dtype=bool)
    live1 = np.ones(z.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        c = (2.0 * k - 1.0) ** 2
        a0 = a0 * (0.0 - c) / (k * 8.0 * z)
        a1 = a1 * (4.0 - c) / (k * 8.0 * z)
        ik = 1j**k
        live0 &= np.abs(a0) <= last0
        live1 &= np.abs(a1) <= last1
        p0 = np.where(live0, p0 + ik * a0, p0)
        q0 = np.where(live0, q0 + np.conj(ik) * a0, q0)
        p1 = np.where(live1, p1 + ik * a1, p1)
        q1 = np.where(live1, q1 + np.conj(ik) * a1, q1)
        last0 = np.where(live0, np.abs(a0), last0)
        last1 = np.where(live1, np.abs(a1), last1)
        if not (live0 & (last0 >= 1e-17)).any() and not (live1 & (last1 >= 1e-17)).any():
            break
    h10 = pre * e1 * p0
    h20 = pre * e2 * q0
    h11 = pre * e1 * (-1j) * p1
    h21 = pre * e2 * (1j) * q1
    return 0.5 * (h10 + h20), 0.5 * (h11 + h21), (h10 - h20) / 2j, (h11 - h21) / 2j


def bessel01_numpy(z):
    """Pure-numpy back end with the same branch layout as the numba kernel."""
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    flat = z.ravel()
    out = [np.empty_like(flat) for _ in range(4)]
    absz = np.abs(flat)
    branches = (
        (absz <= SERIES_MAX, _series_np),
        ((absz > SERIES_MAX) & (absz <= ASYMPTOTIC_MIN), _miller_np),
        (absz > ASYMPTOTIC_MIN, _asymptotic_np),
    )
    for mask, fn in branches:
        if mask.any():
            vals = fn(flat[mask])
            for o, v in zip(out, vals):
                o[mask] = v
    return tuple(o.reshape(shape) for o in out)


def bessel01(z):
    """J0, J1, Y0, Y1 at ``z`` using the selected back end."""
    if USE_NUMBA:
        return bessel01_numba(z)
    return bessel01_numpy(z)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
