"""Nyström discretization of the boundary operators V, W, Wt and T.

Same-curve blocks split each kernel as ``K1 * log(4 sin^2((t - s)/2)) + K2``
and integrate the logarithmic part with trigonometric product weights,
which keeps the rule spectrally accurate.  Cross-curve blocks are smooth
and use the plain trapezoid rule.  ``T`` is obtained from ``V`` through a
Maue-type integration by parts with a spectral differentiation matrix.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _accel
from ._accel import EULER_GAMMA
from .specfun import C2, as_wavenumber

log = logging.getLogger(__name__)

ROLES = ("V", "W", "Wt", "T")
_MAGIC = b"HLMZOP01"


@dataclass(frozen=True, eq=False)
class BoundaryOperator:
    """Dense matrix of a boundary operator acting on nodal density values."""

    matrix: np.ndarray
    grid: object
    role: str
    k: complex

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown operator role {self.role!r}")
        n = self.grid.size
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {n} nodes")

    def __matmul__(self, other):
        return self.matrix @ np.asarray(other)

    @property
    def shape(self):
        return self.matrix.shape


def kress_weights(n):
    """Product weights for ``log(4 sin^2((t_i - t_j)/2))`` indexed by ``(i - j) mod n``."""
    if n % 2:
        raise ValueError("Kress weights need an even node count")
    m = np.arange(1, n // 2)
    d = 2 * np.pi * np.arange(n) / n
    r = -(4 * np.pi / n) * np.sum(np.cos(np.outer(d, m)) / m, axis=1)
    r -= (4 * np.pi / n**2) * np.cos(np.pi * np.arange(n))
    return r


def diff_matrix(n):
    """Spectral differentiation matrix for ``n`` equispaced periodic nodes (``n`` even)."""
    i = np.arange(n)
    d = (i[:, None] - i[None, :]) % n
    with np.errstate(divide="ignore"):
        mat = 0.5 * (-1.0) ** d / np.tan(np.pi * d / n)
    mat[d == 0] = 0.0
    return mat


class _Pairs:
    """Pairwise geometry and Bessel values shared by all operators."""

    def __init__(self, k, grid):
        self.k = k
        self.grid = grid
        x = grid.points
        self.dx = x[:, None, 0] - x[None, :, 0]
        self.dy = x[:, None, 1] - x[None, :, 1]
        ci = grid.curve_index
        self.same = ci[:, None] == ci[None, :]
        self.diag = np.eye(grid.size, dtype=bool)
        r = np.hypot(self.dx, self.dy)
        r[self.diag] = 1.0
        self.r = r
        j0, j1, y0, y1 = _accel.bessel01(np.asarray(k * r, dtype=complex))
        self.j0, self.j1 = j0, j1
        self.h0 = j0 + 1j * y0
        self.h1 = j1 + 1j * y1
        # Kress weights and the log factor on same-curve blocks
        self.R = np.zeros((grid.size, grid.size))
        self.logf = np.zeros((grid.size, grid.size))
        for s, n in zip(grid.slices, grid.n_per_curve):
            idx = np.arange(n)
            delta = (idx[:, None] - idx[None, :]) % n
            self.R[s, s] = kress_weights(n)[delta]
            with np.errstate(divide="ignore"):
                self.logf[s, s] = np.log(4 * np.sin(np.pi * delta / n) ** 2)
        self.logf[self.diag] = 0.0
        self.h = grid.h[None, :]
        self.speed = grid.speeds[None, :]
        d1, d2 = grid.d1, grid.d2
        self.curv = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / (4 * np.pi * grid.speeds**2)

    def combine(self, K, K1, diag_K1, diag_K2):
        """Apply the split rule; ``K`` and ``K1`` include the speed factor."""
        K1 = np.where(self.same, K1, 0.0)
        K1[self.diag] = diag_K1
        K2 = K - K1 * self.logf
        K2[self.diag] = diag_K2
        return self.R * K1 + self.h * K2


def _assemble_V(p):
    k = p.k
    sp = p.speed
    K = C2 * p.h0 * sp
    K1 = p.j0 * sp / (4 * np.pi)
    spd = p.grid.speeds
    d_k1 = spd / (4 * np.pi)
    d_k2 = spd * (-0.25j + (np.log(k / 2) + EULER_GAMMA + np.log(spd)) / (2 * np.pi))
    return p.combine(K, K1, d_k1, d_k2)


def _assemble_W(p, transpose):
    k = p.k
    nu = p.grid.normals
    if transpose:
        proj = (p.dx * nu[:, None, 0] + p.dy * nu[:, None, 1]) / p.r
        K = (0.25j * k) * p.h1 * proj * p.speed
        K1 = -(k / (4 * np.pi)) * p.j1 * proj * p.speed
    else:
        proj = (p.dx * nu[None, :, 0] + p.dy * nu[None, :, 1]) / p.r
        K = (-0.25j * k) * p.h1 * proj * p.speed
        K1 = (k / (4 * np.pi)) * p.j1 * proj * p.speed
    return p.combine(K, K1, 0.0, p.curv)


def _assemble_T(p, Vmat):
    grid = p.grid
    D = np.zeros((grid.size, grid.size))
    for s, n in zip(grid.slices, grid.n_per_curve):
        D[s, s] = diff_matrix(n)
    Ds = D / grid.speeds[:, None]
    nn = grid.normals @ grid.normals.T
    return Ds @ Vmat @ Ds + p.k**2 * (Vmat * nn)


def assemble_all(k, grid, roles=ROLES):
    """Assemble several operators sharing one pass of Bessel evaluations.

    Returns a dict ``role -> BoundaryOperator``.
    """
    k = as_wavenumber(k).k
    roles = tuple(roles)
    p = _Pairs(k, grid)
    out = {}
    V = None
    if "V" in roles or "T" in roles:
        V = _assemble_V(p)
    if "V" in roles:
        out["V"] = BoundaryOperator(V, grid, "V", k)
    if "W" in roles:
        out["W"] = BoundaryOperator(_assemble_W(p, False), grid, "W", k)
    if "Wt" in roles:
        out["Wt"] = BoundaryOperator(_assemble_W(p, True), grid, "Wt", k)
    if "T" in roles:
        out["T"] = BoundaryOperator(_assemble_T(p, V), grid, "T", k)
    return out


def assemble_V(k, grid):
    """Boundary single layer operator."""
    return assemble_all(k, grid, ("V",))["V"]


def assemble_W(k, grid):
    """Boundary double layer operator (principal value)."""
    return assemble_all(k, grid, ("W",))["W"]


def assemble_Wt(k, grid):
    """Transposed double layer, assembled directly from its own kernel."""
    return assemble_all(k, grid, ("Wt",))["Wt"]


def assemble_T(k, grid):
    """Hypersingular operator, the normal derivative of the double layer."""
    return assemble_all(k, grid, ("T",))["T"]


def duality_defect(W, Wt):
    """Relative mismatch of ``w_i W_ij`` and ``w_j Wt_ji``."""
    w = W.grid.weights
    a = w[:, None] * W.matrix
    b = (w[:, None] * Wt.matrix).T
    return float(np.max(np.abs(a - b)) / np.max(np.abs(a)))


def dump_operator(op, path):
    """Write ``op`` as a 16-byte header plus row-major little-endian complex128."""
    role = ROLES.index(op.role)
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<II", op.matrix.shape[0], role))
        fh.write(np.ascontiguousarray(op.matrix, dtype="<c16").tobytes())


def load_operator(path):
    """Read a dump written by ``dump_operator``; returns ``(matrix, role)``."""
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError("not an operator dump")
    n, role = struct.unpack("<II", raw[8:16])
    mat = np.frombuffer(raw[16:], dtype="<c16")
    if mat.size != n * n:
        raise ValueError("truncated operator dump")
    return mat.reshape(n, n).astype(complex), ROLES[role]
