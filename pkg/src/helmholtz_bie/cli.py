"""Command line front end: solve, field, scan, verify and oracle jobs.

Exit codes: 0 success, 2 data not solvable (compatibility defect above
tolerance), 1 any other error.
"""

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import _accel
from .bvp import PROBLEMS, BvpSpec, compat_project, incident_data, is_interior, solve
from .errors import HelmholtzBIEError
from .geometry import build_grid, load_domain, unit_disk
from .nystrom import assemble_all, duality_defect, dump_operator
from .specfun import Wavenumber

log = logging.getLogger("helmholtz_bie")

EXIT_OK, EXIT_ERROR, EXIT_NOT_SOLVABLE = 0, 1, 2
JUMP_TOL = 1e-6
DEFAULTS = {
    "n": 128,
    "out": ".",
    "farfield_angles": 64,
    "samples": 200,
    "role": "interior-dirichlet",
    "k_range": "2,4",
    "suite": "jumps",
    "k": "2,0",
}


class UsageError(Exception):
    pass


def parse_complex(text):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    if len(parts) != 2:
        raise UsageError(f"k must be given as 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise UsageError(f"k must be two floats, got {text!r}") from exc


def parse_floats(text, count, what):
    parts = str(text).split(",") if not isinstance(text, (list, tuple)) else list(text)
    if len(parts) != count:
        raise UsageError(f"{what} needs {count} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"{what}: cannot parse {text!r}") from exc


def parse_incident(text):
    kind, _, rest = str(text).partition(":")
    if kind not in ("plane", "point"):
        raise UsageError("incident must be 'plane:dx,dy' or 'point:x,y'")
    return kind, parse_floats(rest, 2, "incident")


def parse_field_grid(text):
    xmin, xmax, ymin, ymax, nx, ny = parse_floats(text, 6, "field grid")
    if nx < 1 or ny < 1 or nx != int(nx) or ny != int(ny):
        raise UsageError("field grid counts must be positive integers")
    xs = np.linspace(xmin, xmax, int(nx))
    ys = np.linspace(ymin, ymax, int(ny))
    return np.array([(x, y) for y in ys for x in xs])


def read_node_data(path, size):
    """Read ``node,re,im`` (optionally with a ``t`` column) CSV boundary data."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    vals = np.zeros(size, dtype=complex)
    seen = set()
    for row in rows:
        i = int(row["node"])
        if not 0 <= i < size:
            raise UsageError(f"node index {i} out of range for {size} nodes")
        vals[i] = float(row["re"]) + 1j * float(row["im"])
        seen.add(i)
    if len(seen) != size:
        raise UsageError(f"data file covers {len(seen)} of {size} nodes")
    return vals


def _fmt(x):
    return repr(float(x))


def write_density(path, grid, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "t", "re", "im"])
        for i, (t, v) in enumerate(zip(grid.t, values)):
            w.writerow([i, _fmt(t), _fmt(v.real), _fmt(v.imag)])


def write_field(path, pts, values, regions):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "re", "im", "region"])
        for p, v, r in zip(pts, values, regions):
            if np.isfinite(v):
                w.writerow([_fmt(p[0]), _fmt(p[1]), _fmt(v.real), _fmt(v.imag), r])
            else:
                w.writerow([_fmt(p[0]), _fmt(p[1]), "", "", r])


def write_farfield(path, theta, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "re", "im"])
        for t, v in zip(theta, values):
            w.writerow([_fmt(t), _fmt(v.real), _fmt(v.imag)])


def _merge(args, job, keys):
    """Flags override the job file, which overrides the defaults."""
    cfg = {}
    for key in keys:
        val = getattr(args, key, None)
        if val is None:
            val = job.get(key, job.get(key.replace("_", "-")))
        if val is None:
            val = DEFAULTS.get(key)
        cfg[key] = val
    return cfg


def _load_job(path):
    if not path:
        return {}, Path(".")
    p = Path(path)
    if not p.exists():
        raise UsageError(f"job file {path} does not exist")
    data = json.loads(p.read_text())
    if not isinstance(data, dict):
        raise UsageError("job file must hold a JSON object")
    return data, p.parent


def _domain(path, base):
    if path is None:
        return unit_disk()
    p = Path(path)
    if not p.is_absolute() and not p.exists():
        p = base / p
    if not p.exists():
        raise UsageError(f"geometry file {path} does not exist")
    return load_domain(p)


def _n(value):
    n = int(value)
    if n != float(value) or n % 2:
        raise UsageError(f"N must be an even integer, got {value!r}")
    return n


def cmd_solve(args, require_field=False):
    job, base = _load_job(args.job)
    cfg = _merge(
        args, job,
        ["geometry", "problem", "k", "n", "incident", "data", "out", "field_grid",
         "farfield_angles", "project", "dump_operators"],
    )
    if cfg["geometry"] is None:
        raise UsageError("--geometry is required")
    if cfg["problem"] not in PROBLEMS:
        raise UsageError(f"--problem must be one of {', '.join(PROBLEMS)}")
    if require_field and cfg["field_grid"] is None:
        raise UsageError("--field-grid is required for the field command")
    k = Wavenumber(parse_complex(cfg["k"])).k
    n = _n(cfg["n"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    grid = build_grid(_domain(cfg["geometry"], base), n)
    problem = cfg["problem"]
    if cfg["data"] is not None:
        g = read_node_data(cfg["data"], grid.size)
    elif cfg["incident"] is not None:
        kind, param = parse_incident(cfg["incident"])
        g = incident_data(problem, k, grid, kind, param)
    else:
        raise UsageError("boundary data needed: --incident or --data")
    if cfg["project"]:
        g, _ = compat_project(problem, k, grid, g)
    sol = solve(BvpSpec(problem, k, g, grid))
    if not require_field:
        write_density(out / "density.csv", grid, sol.phi)
        write_density(out / "density_psi.csv", grid, sol.psi)
        if not is_interior(problem):
            nf = int(cfg["farfield_angles"])
            theta = 2 * np.pi * np.arange(nf) / nf
            write_farfield(out / "farfield.csv", theta, sol.farfield(theta))
    if cfg["field_grid"] is not None:
        pts = parse_field_grid(cfg["field_grid"])
        vals, tags = sol.field_grid(pts)
        write_field(out / "field.csv", pts, vals, tags)
    if cfg["dump_operators"]:
        for role, op in assemble_all(k, grid).items():
            dump_operator(op, out / f"operator_{role}.bin")
    summary = {
        "k": [k.real, k.imag],
        "N": n,
        "problem": problem,
        "residual": sol.residual,
        "compatibility_defect": sol.compatibility_defect,
        "kernel_dim": sol.kernel_dim,
        "status": sol.status,
        "nodes": grid.size,
        "backend": _accel.backend_name(),
        "wall_time_ms": 1000.0 * (time.perf_counter() - t0),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps({k_: summary[k_] for k_ in ("problem", "status", "residual", "compatibility_defect", "kernel_dim")}))
    return EXIT_OK if sol.solvable else EXIT_NOT_SOLVABLE


def cmd_scan(args):
    from .spectra import eigen_scan

    job, base = _load_job(args.job)
    cfg = _merge(args, job, ["geometry", "role", "k_range", "samples", "n", "out"])
    lo, hi = parse_floats(cfg["k_range"], 2, "k range")
    n = _n(cfg["n"] if args.n is not None or "n" in job else 64)
    grid = build_grid(_domain(cfg["geometry"], base), n)
    res = eigen_scan(cfg["role"], grid, (lo, hi), int(cfg["samples"]))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scan.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "sigma_min"])
        for kk, s in zip(res.k, res.sigma):
            w.writerow([_fmt(kk), _fmt(s)])
    summary = res.as_dict()
    summary["N"] = n
    (out / "roots.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return EXIT_OK


def _inside_point(grid):
    from .spectra import interior_samples

    # classify on a fine grid so coarse grids do not swallow every candidate in the refusal band
    cand = interior_samples(build_grid(grid.domain, max(128, max(grid.n_per_curve))), 30)
    d = np.min(np.hypot(cand[:, None, 0] - grid.points[None, :, 0], cand[:, None, 1] - grid.points[None, :, 1]), axis=1)
    return cand[np.argmax(d)]


def jump_defects(k, grid):
    """Calderón identity defects for two exact solutions plus the W/Wt duality defect."""
    from .potentials import point_source

    ops = assemble_all(k, grid)
    eye = np.eye(grid.size)
    V, W, Wt, T = (ops[r].matrix for r in ("V", "W", "Wt", "T"))
    outside = grid.points.mean(axis=0) + np.array([1.5 * grid.domain.diameter(), 0.3])
    inside = _inside_point(grid)
    out = {}
    for name, src, sign in (("interior", outside, -1.0), ("exterior", inside, 1.0)):
        u, g = point_source(k, src, grid.points)
        un = np.sum(g * grid.normals, axis=1)
        d1 = (sign * 0.5 * eye + W) @ u - V @ un
        d2 = (-sign * 0.5 * eye + Wt) @ un - T @ u
        out[f"{name}_dirichlet"] = grid.norm(d1) / grid.norm(u)
        out[f"{name}_neumann"] = grid.norm(d2) / grid.norm(un)
    out["duality"] = duality_defect(ops["W"], ops["Wt"])
    return out


def _specfun_defects(seed=0):
    from .specfun import bessel_j, bessel_y, fundamental_solution

    rng = np.random.default_rng(seed)
    z = rng.uniform(0.1, 50.0, 100)
    wr = bessel_j(0, z) * bessel_y(1, z) - bessel_j(1, z) * bessel_y(0, z)
    wdef = float(np.max(np.abs(wr + 2 / (np.pi * z)) / (2 / (np.pi * z))))
    h = 1e-4
    x = np.array([2.0, 0.0])
    stencil = [x + h * np.array(e) for e in ((1, 0), (-1, 0), (0, 1), (0, -1))]
    lap = (sum(fundamental_solution(1.0, p) for p in stencil) - 4 * fundamental_solution(1.0, x)) / h**2
    pde = abs(lap + fundamental_solution(1.0, x))
    return {"wronskian": wdef, "pde_residual": float(pde)}


def _mie_defect(n=128, k=2.0):
    from .oracle import mie_solution

    grid = build_grid(unit_disk(), n)
    sol = solve(BvpSpec("exterior-dirichlet", k, incident_data("exterior-dirichlet", k, grid, "plane", (1, 0)), grid))
    th = 2 * np.pi * np.arange(64) / 64
    pts = 2 * np.stack([np.cos(th), np.sin(th)], -1)
    ref = mie_solution(k).total(pts)
    tot = sol.field(pts) + np.exp(1j * k * pts[:, 0])
    return {"mie_relative_error": float(np.max(np.abs(tot - ref)) / np.max(np.abs(ref)))}


def cmd_verify(args):
    job, base = _load_job(args.job)
    cfg = _merge(args, job, ["suite", "geometry", "k", "n"])
    suite = cfg["suite"]
    if suite == "jumps":
        k = Wavenumber(parse_complex(cfg["k"])).k
        grid = build_grid(_domain(cfg["geometry"], base), _n(cfg["n"]))
        defects = jump_defects(k, grid)
        tol = {key: JUMP_TOL for key in defects}
    elif suite == "specfun":
        defects = _specfun_defects()
        tol = {"wronskian": 1e-10, "pde_residual": 1e-5}
    elif suite == "mie":
        defects = _mie_defect()
        tol = {"mie_relative_error": 1e-7}
    else:
        raise UsageError("suite must be jumps, specfun or mie")
    worst = max(defects.values())
    passed = all(defects[key] < tol[key] for key in defects)
    print(json.dumps({"suite": suite, "defects": defects, "max_defect": worst, "pass": passed}))
    return EXIT_OK if passed else EXIT_ERROR


def cmd_oracle(args):
    from . import oracle

    if args.what == "zero":
        print(json.dumps({"kind": args.kind, "index": args.index, "value": oracle.bessel_zero(args.kind, args.index)}))
        return EXIT_OK
    k = parse_complex(args.k or DEFAULTS["k"])
    th = 2 * np.pi * np.arange(args.angles) / args.angles
    pts = args.radius * np.stack([np.cos(th), np.sin(th)], -1)
    if args.what == "mie":
        vals = oracle.mie_solution(k, args.a, parse_floats(args.direction, 2, "direction")).total(pts)
    else:
        vals = oracle.disk_eigenfunction(args.kind_ef, args.m, args.index, pts)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["theta", "re", "im"])
    for t, v in zip(th, np.atleast_1d(vals)):
        w.writerow([_fmt(t), _fmt(v.real), _fmt(v.imag)])
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="helmbie", description="2D Helmholtz boundary integral solver")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--job", help="JSON job file; flags override its entries")
        sp.add_argument("--geometry", help="geometry JSON file")
        sp.add_argument("--n", type=float, help="nodes per curve (even)")
        sp.add_argument("--out", help="output directory")

    for name in ("solve", "field"):
        sp = sub.add_parser(name, help="solve a boundary value problem" if name == "solve" else "solve and sample the field on a grid")
        common(sp)
        sp.add_argument("--problem", choices=PROBLEMS)
        sp.add_argument("--k", help="wavenumber as re,im")
        sp.add_argument("--incident", help="plane:dx,dy or point:x,y")
        sp.add_argument("--data", help="CSV with node,re,im boundary data")
        sp.add_argument("--field-grid", dest="field_grid", help="xmin,xmax,ymin,ymax,nx,ny")
        sp.add_argument("--farfield-angles", dest="farfield_angles", type=int)
        sp.add_argument("--project", action="store_const", const=True, help="solve with compatibility-projected data")
        sp.add_argument("--dump-operators", dest="dump_operators", action="store_const", const=True)

    sp = sub.add_parser("scan", help="scan for eigenvalues")
    common(sp)
    sp.add_argument("--role", choices=("interior-dirichlet", "interior-neumann", "exterior-dirichlet-bounded"))
    sp.add_argument("--k-range", dest="k_range", help="kmin,kmax")
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp)
    sp.add_argument("--suite", choices=("jumps", "specfun", "mie"))
    sp.add_argument("--k", help="wavenumber as re,im")

    sp = sub.add_parser("oracle", help="dump analytic reference values")
    sp.add_argument("what", choices=("zero", "mie", "eigenfunction"))
    sp.add_argument("--kind", default="J0", help="zero kind, e.g. J0, J1, J1'")
    sp.add_argument("--index", type=int, default=1)
    sp.add_argument("--k", help="wavenumber as re,im (mie)")
    sp.add_argument("--a", type=float, default=1.0, help="disk radius (mie)")
    sp.add_argument("--direction", default="1,0")
    sp.add_argument("--radius", type=float, default=2.0, help="sampling circle radius")
    sp.add_argument("--angles", type=int, default=64)
    sp.add_argument("--kind-ef", dest="kind_ef", default="dirichlet", choices=("dirichlet", "neumann"))
    sp.add_argument("--m", type=int, default=0)
    return p


_VALUE_FLAGS = ("--field-grid", "--k", "--k-range", "--incident", "--direction")


def _glue_values(argv):
    """Attach values such as ``-3,3,-3,3,10,10`` to their flag so argparse keeps them."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handlers = {
        "solve": cmd_solve,
        "field": lambda a: cmd_solve(a, require_field=True),
        "scan": cmd_scan,
        "verify": cmd_verify,
        "oracle": cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (UsageError, HelmholtzBIEError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())
