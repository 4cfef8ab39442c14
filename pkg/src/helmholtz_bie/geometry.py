"""Analytic closed curves, multiply connected domains and quadrature grids.

Orientation convention: every curve is traversed with the domain on its
left.  Outer boundaries are counterclockwise, holes clockwise, and the
normal ``nu = (y', -x') / |x'|`` (right of travel) is then the outward
normal of the domain on every component.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CurveTooClose, GeometryError, OddN

KINDS = ("circle", "ellipse", "kite", "fourier")
_ALLOWED_FIELDS = {
    "circle": {"kind", "center", "radius", "orientation"},
    "ellipse": {"kind", "center", "semi_axes", "rotation", "orientation"},
    "kite": {"kind", "center", "scale", "orientation"},
    "fourier": {"kind", "center", "radius", "cos", "sin", "orientation"},
}
_REQUIRED_FIELDS = {
    "circle": {"radius"},
    "ellipse": {"semi_axes"},
    "kite": set(),
    "fourier": {"radius"},
}

REFUSAL_SPACINGS = 2.0
SEPARATION_SPACINGS = 2.0


@dataclass(frozen=True)
class Curve:
    """A smooth closed 2*pi-periodic parametric curve.

    ``params`` holds the shape parameters for ``kind``; see ``KINDS``.
    ``orientation`` is ``"ccw"`` (outer boundary) or ``"cw"`` (hole).
    """

    kind: str
    params: tuple
    orientation: str = "ccw"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GeometryError(f"unknown curve kind {self.kind!r}")
        if self.orientation not in ("ccw", "cw"):
            raise GeometryError(f"orientation must be 'ccw' or 'cw', got {self.orientation!r}")

    @property
    def p(self):
        return dict(self.params)

    @property
    def center(self):
        return np.asarray(self.p.get("center", (0.0, 0.0)), dtype=float)

    def _base(self, t):
        """Counterclockwise parametrization and its first two derivatives."""
        p = self.p
        c = self.center
        ct, st = np.cos(t), np.sin(t)
        if self.kind == "circle":
            r = p["radius"]
            x = np.stack([c[0] + r * ct, c[1] + r * st], -1)
            d1 = np.stack([-r * st, r * ct], -1)
            d2 = np.stack([-r * ct, -r * st], -1)
        elif self.kind == "ellipse":
            a, b = p["semi_axes"]
            rot = p.get("rotation", 0.0)
            u = np.stack([a * ct, b * st], -1)
            du = np.stack([-a * st, b * ct], -1)
            ddu = -u
            R = np.array([[math.cos(rot), -math.sin(rot)], [math.sin(rot), math.cos(rot)]])
            x = c + u @ R.T
            d1 = du @ R.T
            d2 = ddu @ R.T
        elif self.kind == "kite":
            s = p.get("scale", 1.0)
            c2, s2 = np.cos(2 * t), np.sin(2 * t)
            x = np.stack([c[0] + s * (ct + 0.65 * c2 - 0.65), c[1] + s * 1.5 * st], -1)
            d1 = np.stack([s * (-st - 1.3 * s2), s * 1.5 * ct], -1)
            d2 = np.stack([s * (-ct - 2.6 * c2), -s * 1.5 * st], -1)
        else:  # fourier radial function
            r, dr, ddr = self._radial(t)
            x = np.stack([c[0] + r * ct, c[1] + r * st], -1)
            d1 = np.stack([dr * ct - r * st, dr * st + r * ct], -1)
            d2 = np.stack(
                [ddr * ct - 2 * dr * st - r * ct, ddr * st + 2 * dr * ct - r * st], -1
            )
        return x, d1, d2

    def _radial(self, t):
        p = self.p
        r = np.full_like(t, float(p["radius"]), dtype=float)
        dr = np.zeros_like(r)
        ddr = np.zeros_like(r)
        for m, a in enumerate(p.get("cos", ()), start=1):
            r += a * np.cos(m * t)
            dr -= m * a * np.sin(m * t)
            ddr -= m * m * a * np.cos(m * t)
        for m, b in enumerate(p.get("sin", ()), start=1):
            r += b * np.sin(m * t)
            dr += m * b * np.cos(m * t)
            ddr -= m * m * b * np.sin(m * t)
        return r, dr, ddr

    def evaluate(self, t):
        """Points, first and second derivatives at parameters ``t``."""
        t = np.asarray(t, dtype=float)
        if self.orientation == "ccw":
            return self._base(t)
        x, d1, d2 = self._base(-t)
        return x, -d1, d2

    def signed_area(self, n=2048):
        t = 2 * np.pi * np.arange(n) / n
        x, d1, _ = self.evaluate(t)
        return 0.5 * np.sum(x[:, 0] * d1[:, 1] - x[:, 1] * d1[:, 0]) * (2 * np.pi / n)

    def arc_length(self, n=2048):
        t = 2 * np.pi * np.arange(n) / n
        _, d1, _ = self.evaluate(t)
        return np.sum(np.hypot(d1[:, 0], d1[:, 1])) * (2 * np.pi / n)

    def reversed(self):
        """Same point set traversed the other way."""
        return Curve(self.kind, self.params, "cw" if self.orientation == "ccw" else "ccw")

    def to_dict(self):
        d = {"kind": self.kind}
        for key, val in self.params:
            d[key] = list(val) if isinstance(val, tuple) else val
        d["orientation"] = self.orientation
        return d


def _freeze(v):
    if isinstance(v, (list, tuple)):
        return tuple(float(a) for a in v)
    return float(v)


def make_curve(kind, orientation="ccw", **params):
    """Build a ``Curve`` from keyword parameters, validating field names."""
    if kind not in KINDS:
        raise GeometryError(f"unknown curve kind {kind!r}")
    allowed = _ALLOWED_FIELDS[kind] - {"kind", "orientation"}
    unknown = set(params) - allowed
    if unknown:
        raise GeometryError(f"unknown fields for {kind}: {sorted(unknown)}")
    missing = _REQUIRED_FIELDS[kind] - set(params)
    if missing:
        raise GeometryError(f"missing fields for {kind}: {sorted(missing)}")
    frozen = tuple(sorted((k, _freeze(v)) for k, v in params.items()))
    curve = Curve(kind, frozen, orientation)
    if kind == "fourier":
        r, _, _ = curve._radial(np.linspace(0, 2 * np.pi, 1024, endpoint=False))
        if np.min(r) <= 0:
            raise GeometryError("fourier radial function must stay positive")
    if kind == "circle" and curve.p["radius"] <= 0:
        raise GeometryError("circle radius must be positive")
    if kind == "ellipse" and min(curve.p["semi_axes"]) <= 0:
        raise GeometryError("ellipse semi-axes must be positive")
    return curve


def circle(radius=1.0, center=(0.0, 0.0), orientation="ccw"):
    return make_curve("circle", orientation, radius=radius, center=center)


def kite(center=(0.0, 0.0), scale=1.0, orientation="ccw"):
    return make_curve("kite", orientation, center=center, scale=scale)


def ellipse(a, b, center=(0.0, 0.0), rotation=0.0, orientation="ccw"):
    return make_curve("ellipse", orientation, semi_axes=(a, b), center=center, rotation=rotation)


def _winding(curve, p, n=1024):
    t = 2 * np.pi * np.arange(n) / n
    x, d1, _ = curve.evaluate(t)
    p = np.atleast_2d(np.asarray(p, dtype=float))
    dx = x[None, :, 0] - p[:, 0, None]
    dy = x[None, :, 1] - p[:, 1, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = (dx * d1[None, :, 1] - dy * d1[None, :, 0]) / (dx * dx + dy * dy)
    return integrand.sum(axis=1) / n


@dataclass(frozen=True)
class Domain:
    """Bounded open set whose boundary is a finite union of disjoint curves.

    Outer curves are counterclockwise, hole curves clockwise.  ``kappa_plus``
    counts connected components of the domain, ``kappa_minus`` the bounded
    components of its exterior.
    """

    curves: tuple

    def __post_init__(self):
        curves = tuple(self.curves)
        object.__setattr__(self, "curves", curves)
        if not curves:
            raise GeometryError("a domain needs at least one curve")
        for c in curves:
            area = c.signed_area()
            if (area > 0) != (c.orientation == "ccw"):
                raise GeometryError(
                    f"{c.kind} curve flagged {c.orientation!r} has signed area {area:.3g}"
                )
        if not self.outer_curves:
            raise GeometryError("at least one counterclockwise outer curve is required")
        for i, c in enumerate(curves):
            probe = c.evaluate(np.array([0.0]))[0]
            for j, other in enumerate(curves):
                if i == j:
                    continue
                inside = abs(_winding(other, probe)[0]) > 0.5
                if inside and other.orientation == "cw":
                    raise GeometryError("curves nested inside a hole are not supported")
                if inside and c.orientation == "ccw":
                    raise GeometryError("outer curves may not be nested")
            if c.orientation == "cw":
                hosts = [o for o in self.outer_curves if abs(_winding(o, probe)[0]) > 0.5]
                if not hosts:
                    raise GeometryError("every hole must lie inside an outer curve")

    @property
    def outer_curves(self):
        return tuple(c for c in self.curves if c.orientation == "ccw")

    @property
    def hole_curves(self):
        return tuple(c for c in self.curves if c.orientation == "cw")

    @property
    def kappa_plus(self):
        return len(self.outer_curves)

    @property
    def kappa_minus(self):
        return len(self.hole_curves)

    def hole_domains(self):
        """Each bounded exterior component as a stand-alone simply connected domain."""
        return [Domain((h.reversed(),)) for h in self.hole_curves]

    def diameter(self, n=512):
        pts = np.concatenate(
            [c.evaluate(2 * np.pi * np.arange(n) / n)[0] for c in self.curves]
        )
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(*span))

    def to_dict(self):
        return {"curves": [c.to_dict() for c in self.curves]}


def domain_from_dict(data):
    """Parse the JSON geometry schema ``{"curves": [...]}``."""
    if not isinstance(data, dict) or set(data) != {"curves"}:
        raise GeometryError('geometry must be an object with the single key "curves"')
    curves = []
    for entry in data["curves"]:
        entry = dict(entry)
        kind = entry.pop("kind", None)
        if kind not in KINDS:
            raise GeometryError(f"unknown curve kind {kind!r}")
        unknown = set(entry) - (_ALLOWED_FIELDS[kind] - {"kind"})
        if unknown:
            raise GeometryError(f"unknown fields for {kind}: {sorted(unknown)}")
        orientation = entry.pop("orientation", "ccw")
        curves.append(make_curve(kind, orientation, **entry))
    return Domain(tuple(curves))


def load_domain(path):
    return domain_from_dict(json.loads(Path(path).read_text()))


def unit_disk():
    return Domain((circle(1.0),))


def annulus(r_outer=2.0, r_inner=1.0):
    return Domain((circle(r_outer), circle(r_inner, orientation="cw")))


@dataclass(frozen=True, eq=False)
class QuadGrid:
    """Equispaced parameter nodes on every curve of a domain.

    Arrays are concatenated curve by curve; ``slices[c]`` selects curve ``c``.
    """

    domain: Domain
    n_per_curve: tuple
    t: np.ndarray
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    normals: np.ndarray
    speeds: np.ndarray
    curve_index: np.ndarray
    slices: tuple = field(default=())

    @property
    def size(self):
        return self.t.size

    @property
    def h(self):
        """Parameter step per node."""
        return 2 * np.pi / np.asarray(self.n_per_curve)[self.curve_index]

    @property
    def weights(self):
        """Trapezoid arclength weights ``|x'(t_j)| * 2pi/N``."""
        return self.speeds * self.h

    def spacing(self, c):
        """Largest arclength gap between consecutive nodes on curve ``c``."""
        return float(np.max(self.weights[self.slices[c]]))

    @property
    def max_spacing(self):
        return max(self.spacing(c) for c in range(len(self.slices)))

    def inner(self, a, b):
        """Arclength inner product with conjugation on the second slot."""
        return np.sum(self.weights * a * np.conj(b))

    def pairing(self, a, b):
        """Bilinear arclength pairing (no conjugation)."""
        return np.sum(self.weights * a * b)

    def norm(self, a):
        return float(np.sqrt(np.real(self.inner(a, a))))


def build_grid(domain, n_per_curve):
    """Place ``n_per_curve`` equispaced parameter nodes on every curve.

    Raises
    ------
    OddN
        If the node count is odd.
    CurveTooClose
        If two curves come within ``SEPARATION_SPACINGS`` node spacings.
    """
    n = int(n_per_curve)
    if n != n_per_curve or n % 2:
        raise OddN(f"node count per curve must be even, got {n_per_curve!r}")
    if n < 4:
        raise ValueError("need at least 4 nodes per curve")
    ts, xs, d1s, d2s, idx, slices = [], [], [], [], [], []
    start = 0
    for ci, curve in enumerate(domain.curves):
        fine = 2 * np.pi * np.arange(4 * n) / (4 * n)
        _, dfine, _ = curve.evaluate(fine)
        if np.min(np.hypot(dfine[:, 0], dfine[:, 1])) <= 0:
            raise GeometryError("curve has a vanishing tangent (cusp)")
        t = np.pi * np.arange(n) / (n // 2)
        x, d1, d2 = curve.evaluate(t)
        ts.append(t)
        xs.append(x)
        d1s.append(d1)
        d2s.append(d2)
        idx.append(np.full(n, ci))
        slices.append(slice(start, start + n))
        start += n
    d1 = np.concatenate(d1s)
    speeds = np.hypot(d1[:, 0], d1[:, 1])
    normals = np.stack([d1[:, 1], -d1[:, 0]], -1) / speeds[:, None]
    grid = QuadGrid(
        domain=domain,
        n_per_curve=tuple(n for _ in domain.curves),
        t=np.concatenate(ts),
        points=np.concatenate(xs),
        d1=d1,
        d2=np.concatenate(d2s),
        normals=normals,
        speeds=speeds,
        curve_index=np.concatenate(idx),
        slices=tuple(slices),
    )
    _check_separation(grid)
    return grid


def _check_separation(grid):
    nc = len(grid.slices)
    if nc < 2:
        return
    limit = SEPARATION_SPACINGS * grid.max_spacing
    for a in range(nc):
        for b in range(a + 1, nc):
            pa = grid.points[grid.slices[a]]
            pb = grid.points[grid.slices[b]]
            d = np.min(np.hypot(*(pa[:, None, :] - pb[None, :, :]).transpose(2, 0, 1)))
            if d <= limit:
                raise CurveTooClose(
                    f"curves {a} and {b} are {d:.3g} apart; need > {limit:.3g} "
                    f"({SEPARATION_SPACINGS:g} node spacings)"
                )


def with_n(grid, n):
    """Same domain, different node count per curve."""
    return build_grid(grid.domain, n)


def resample(grid, values, n):
    """Trigonometric interpolation of nodal values onto ``n`` nodes per curve."""
    values = np.asarray(values)
    out = []
    for s, n_old in zip(grid.slices, grid.n_per_curve):
        coef = np.fft.fft(values[s]) / n_old
        new = np.zeros(n, dtype=complex)
        half = n_old // 2
        m = min(half, n // 2)
        new[:m] = coef[:m]
        new[n - m + 1 :] = coef[n_old - m + 1 :]
        if m == half and n > n_old:
            # split the Nyquist coefficient symmetrically
            new[m] = 0.5 * coef[half]
            new[n - m] = 0.5 * coef[half]
        out.append(np.fft.ifft(new) * n)
    res = np.concatenate(out)
    return res if np.iscomplexobj(values) else res.real


def point_location(domain, x, grid=None):
    """Classify a point relative to the domain.

    Returns one of ``"interior"``, ``"exterior-unbounded"``,
    ``"exterior-bounded-j"`` (``j`` is the 1-based hole index) or
    ``"near-boundary"`` when ``x`` is closer than ``REFUSAL_SPACINGS`` node
    spacings to a node of ``grid`` (default: 64 nodes per curve).
    """
    return locate_points(domain, np.asarray(x, dtype=float)[None, :], grid)[0]


def locate_points(domain, pts, grid=None):
    """Vectorised ``point_location`` for an ``(M, 2)`` array."""
    if grid is None:
        grid = build_grid(domain, 64)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    tags = np.empty(len(pts), dtype=object)
    near = np.zeros(len(pts), dtype=bool)
    for c, s in enumerate(grid.slices):
        nodes = grid.points[s]
        d = np.hypot(pts[:, None, 0] - nodes[None, :, 0], pts[:, None, 1] - nodes[None, :, 1])
        near |= d.min(axis=1) < REFUSAL_SPACINGS * grid.spacing(c)
    total = np.zeros(len(pts))
    hole_of = np.zeros(len(pts), dtype=int)
    hole_no = 0
    for curve in domain.curves:
        w = _winding(curve, pts, n=max(1024, 4 * max(grid.n_per_curve)))
        total += w
        if curve.orientation == "cw":
            hole_no += 1
            hole_of[np.abs(w) > 0.5] = hole_no
    for i in range(len(pts)):
        if near[i]:
            tags[i] = "near-boundary"
        elif np.isfinite(total[i]) and round(total[i]) == 1:
            tags[i] = "interior"
        elif hole_of[i]:
            tags[i] = f"exterior-bounded-{hole_of[i]}"
        else:
            tags[i] = "exterior-unbounded"
    return tags
