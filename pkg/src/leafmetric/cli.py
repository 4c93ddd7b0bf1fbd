"""Command-line drivers: ``python -m leafmetric <command> [flags]``.

Every command writes ``report.json`` (plus command-specific CSVs) to the
output directory. CSV files start with one ``#`` comment line carrying a
timestamp; everything below it is deterministic for a given config.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import fixtures
from .beltrami import BeltramiError, gaussian_mu, solve_beltrami
from .covers import cover_eta
from .eta import (EtaEstimate, ORACLE, eta_lower, holder_scan, mln_fit,
                  shell_directions, write_holder_csv)
from .flow import FlowError, estimate_field_constants, flow, write_trace_csv
from .parser import FieldSyntaxError, parse_field
from .polynomial import CPoint, format_field, jacobian, one_jet, blow_up_pullback
from .projection import (ProjectionError, arc_length, chain_projections, project_time,
                         transverse_partner, write_chain_csv)
from .projective import infinity_singularities
from .singular import find_singularities


@dataclasses.dataclass
class ScanConfig:
    field_source: str = "fixture:radial"
    chart_center: tuple = (0j, 0j)
    chart_radius: float | None = None
    brody_A: float = 10.0
    eps0: float = 0.05
    eps1: float = 0.02
    seed: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        self.chart_center = tuple(complex(c) for c in self.chart_center)
        if not self.eps1 < self.eps0 < 1:
            raise ValueError("need eps1 < eps0 < 1")
        if not self.brody_A > 0:
            raise ValueError("Brody constant must be positive")

    @property
    def fixture_name(self) -> str | None:
        return self.field_source[len("fixture:"):] if self.field_source.startswith("fixture:") else None

    def radius(self) -> float:
        if self.chart_radius is not None:
            return float(self.chart_radius)
        return fixtures.CHART_RADIUS.get(self.fixture_name, 0.5)

    def load_field(self):
        name = self.fixture_name
        if name is not None:
            return fixtures.get_fixture(name)
        return parse_field(Path(self.field_source).read_text().strip())

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["chart_center"] = [[c.real, c.imag] for c in self.chart_center]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ScanConfig":
        d = dict(d)
        if "chart_center" in d:
            d["chart_center"] = tuple(complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                                      for c in d["chart_center"])
        return cls(**d)


def parse_point(text: str) -> np.ndarray:
    """'0.1+0.2j, -0.3' -> complex vector; a trailing 'i' is accepted for 'j'."""
    return np.array([complex(s.strip().replace("i", "j")) for s in text.split(",")])


# -- output helpers -----------------------------------------------------------
def _stamp() -> str:
    return f"generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}"


def _jsonable(obj):
    if isinstance(obj, complex) or isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, CPoint):
        return obj.to_json()
    return obj


class Run:
    """Collects report entries, per-row errors and assertion outcomes for one command."""

    def __init__(self, config: ScanConfig, command: str):
        self.config = config
        self.command = command
        self.out = Path(config.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.report = {"command": command, "config": config.to_json()}
        self.errors = []
        self.checks = {}

    def check(self, name: str, ok: bool):
        self.checks[name] = bool(ok)

    def csv(self, name: str, header, rows):
        with open(self.out / name, "w", newline="") as fh:
            fh.write(f"# {_stamp()}\n")
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    def finish(self) -> int:
        self.report["checks"] = self.checks
        self.report["passed"] = all(self.checks.values())
        with open(self.out / "report.json", "w") as fh:
            json.dump(_jsonable(self.report), fh, indent=2)
        self.csv("errors.csv", ["command", "index", "message"],
                 [(self.command, i, msg) for i, msg in self.errors])
        for name, ok in self.checks.items():
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
        return 0 if self.report["passed"] else 1


def _eta_source(cfg: ScanConfig, X, constants):
    """Exact eta on fixtures with closed-form covers, the chart lower bound otherwise."""
    p = fixtures.DIAGONAL_POWER.get(cfg.fixture_name)
    if p is not None and np.allclose(cfg.chart_center, 0):
        rho = cfg.radius()

        def exact(pt):
            v = cover_eta(pt, p, rho)
            return EtaEstimate(CPoint(tuple(pt)), v, v, ORACLE)
        return exact, ORACLE
    return (lambda pt: eta_lower(X, pt, constants, cfg.brody_A)), "bounds"


# -- commands -----------------------------------------------------------------
def cmd_classify(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "classify")
    X = cfg.load_field()
    pts = find_singularities(X, args.box_radius, center=np.array(cfg.chart_center))
    run.report["field"] = format_field(X)
    run.report["singularities"] = [s.to_json() for s in pts]
    degs = {c.degree() for c in X.components}
    homogeneous = all(c == c.homogeneous_part(c.degree()) for c in X.components if c)
    run.report["homogeneous_degree"] = degs.pop() if homogeneous and len(degs) == 1 else None
    if X.num_vars == 2:
        inf = infinity_singularities(X)
        run.report["infinity"] = inf.to_json()
        print(f"{len(pts)} affine singularities; {len(inf.points)} at infinity")
        if run.report["homogeneous_degree"] is not None:
            print(f"field is homogeneous of degree {run.report['homogeneous_degree']}")
    else:
        print(f"{len(pts)} affine singularities")
    for s in pts:
        print("  ", s.location.coords, "eigenvalues", s.eigenvalues,
              "non-degenerate" if s.non_degenerate else "degenerate",
              f"resonant {s.resonance_witness}" if s.resonant else "")
    run.check("zeros verified", all(np.linalg.norm(X(s.coords)) <= 1e-10 for s in pts))
    return run.finish()


def linear_part_at_origin(X):
    return jacobian(X, np.zeros(X.num_vars))


def proportional(A, B, tol=1e-12) -> bool:
    return bool(np.linalg.matrix_rank(np.column_stack([A.ravel(), B.ravel()]), tol=tol) <= 1)


def cmd_blowup(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "blowup")
    X = cfg.load_field()
    XL = one_jet(X)
    PX, PL = blow_up_pullback(X), blow_up_pullback(XL)
    A, B = linear_part_at_origin(PX), linear_part_at_origin(PL)
    witness = not proportional(A, B)
    run.report.update({"pullback": format_field(PX), "pullback_linear_part": format_field(PL),
                       "linear_part_pullback": A, "linear_part_pullback_of_jet": B,
                       "non_linearizable_witness": witness})
    print(f"pi*X     = {format_field(PX)}")
    print(f"pi*X_lin = {format_field(PL)}")
    print(f"linear parts proportional: {not witness}")
    run.check("pullbacks polynomial", True)
    return run.finish()


def _constants(cfg, X):
    return estimate_field_constants(X, cfg.radius(), center=np.array(cfg.chart_center), seed=cfg.seed)


def cmd_flow(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "flow")
    X = cfg.load_field()
    z = parse_point(args.z)
    t = complex(args.t.replace("i", "j"))
    seg = flow(X, z, t, tol=args.tol, record_trace=True)
    write_trace_csv(seg, run.out / "flow_trace.csv", _stamp())
    run.report.update({"start": seg.start, "time": seg.time, "end": seg.end,
                       "first_derivative": seg.first_derivative, "error_estimate": seg.error_estimate,
                       "steps_taken": seg.steps_taken})
    print("end", seg.end)
    run.check("phi' = X(end)", np.linalg.norm(seg.first_derivative - X(seg.end)) <= 1e-12 * (1 + np.linalg.norm(seg.end)))
    return run.finish()


def cmd_project(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "project")
    X = cfg.load_field()
    x = parse_point(args.x)
    y = parse_point(args.y)
    t = complex(args.t.replace("i", "j"))
    pr = project_time(X, x, y, t)
    run.report.update({"x": x, "y": y, "t": pr.t, "u": pr.u, "g_residual": pr.g_residual,
                       "jac_u": pr.jac_u, "newton_iters": pr.newton_iters, "projected": pr.y_u})
    print(f"u = {pr.u}  iterations {pr.newton_iters}  jac_u {pr.jac_u:.6g}")
    run.check("jac_u > 0", pr.jac_u > 0)
    return run.finish()


def _partner(cfg, X, x, args):
    if args.y:
        return parse_point(args.y)
    return transverse_partner(X, x, args.separation * np.linalg.norm(x - np.array(cfg.chart_center)))


def cmd_chain(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "chain")
    X = cfg.load_field()
    E = [s.coords for s in find_singularities(X, cfg.radius(), center=np.array(cfg.chart_center))]
    constants = _constants(cfg, X)
    eta, _ = _eta_source(cfg, X, constants)
    x = parse_point(args.x)
    y = _partner(cfg, X, x, args)
    chain = chain_projections(X, x, y, cfg.eps0, args.R, E, lambda p: eta(p).eta_lo, eps1=cfg.eps1)
    write_chain_csv(chain, run.out / "chain.csv", _stamp())
    step_err = [abs(arc_length(X, chain.x[j], chain.times[j + 1] - chain.times[j]) - chain.step_lengths[j])
                for j in range(chain.N)]
    run.report.update({"N": chain.N, "poincare_length": chain.poincare_length[-1],
                       "break_index": chain.break_index, "break_reason": chain.break_reason,
                       "max_step_error": max(step_err, default=0.0)})
    print(f"N = {chain.N}, Poincare length {chain.poincare_length[-1]:.4f}, break: {chain.break_reason}")
    run.check("step rule within 1e-6", max(step_err, default=0.0) <= 1e-6)
    return run.finish()


def cmd_eta(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "eta")
    X = cfg.load_field()
    center = np.array(cfg.chart_center)
    constants = _constants(cfg, X)
    d_range = (args.d_min, args.d_max)
    radial = cfg.fixture_name == "radial"
    fit = mln_fit(X, center, d_range, samples=args.samples, constants=constants,
                  normalizer="log-rho" if radial else "log*", seed=cfg.seed)
    run.csv("eta.csv", ["d", "eta_lo"], [(repr(float(d)), repr(float(e))) for d, e in zip(fit.distances, fit.etas)])
    run.report.update({"constants": constants.to_json(), "c_lo": fit.c_lo, "c_hi": fit.c_hi,
                       "slope": fit.slope, "normalizer": fit.normalizer})
    print(f"band [{fit.c_lo:.4f}, {fit.c_hi:.4f}], slope {fit.slope:.4f} ({fit.normalizer})")
    run.check("eta_lo positive", bool(np.all(fit.etas > 0)))
    if radial:
        run.check("radial band [1, 1]", abs(fit.c_lo - 1) <= 0.01 and abs(fit.c_hi - 1) <= 0.01)
        run.check("radial slope 1", abs(fit.slope - 1) <= 0.02)
    return run.finish()


def holder_pairs(rng, center, count, d_range=(1e-4, 1e-1), ratio=(0.001, 0.2)):
    n = center.size
    pairs = []
    for _ in range(count):
        d = 10 ** rng.uniform(np.log10(d_range[0]), np.log10(d_range[1]))
        u = shell_directions(n, 1, int(rng.integers(2**31)))[0]
        v = shell_directions(n, 1, int(rng.integers(2**31)))[0]
        x = center + d * u
        pairs.append((x, x + d * rng.uniform(*ratio) * v))
    return pairs


def cmd_holder(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "holder")
    X = cfg.load_field()
    center = np.array(cfg.chart_center)
    E = [s.coords for s in find_singularities(X, cfg.radius(), center=center)]
    constants = None if cfg.fixture_name in fixtures.DIAGONAL_POWER else _constants(cfg, X)
    eta, mode = _eta_source(cfg, X, constants)
    rng = np.random.default_rng(cfg.seed)
    hi = min(args.d_max, 0.5 * cfg.radius())
    pairs = holder_pairs(rng, center, args.pairs, (args.d_min, hi))
    scan = holder_scan(pairs, E, eta, mode=mode)
    run.errors.extend(scan.skipped)
    write_holder_csv(scan, run.out / "holder.csv", _stamp())
    run.report.update({"C": scan.C, "alpha": scan.alpha, "mode": mode, "samples": len(scan.samples),
                       "skipped": len(scan.skipped), "fraction_satisfied": scan.fraction_satisfied})
    print(f"C = {scan.C:.6g}, alpha = {scan.alpha:.4f}, satisfied {100 * scan.fraction_satisfied:.1f}%")
    run.check("all samples satisfy the fitted bound", scan.fraction_satisfied == 1.0)
    run.check("alpha > 0", scan.alpha > 0)
    return run.finish()


def cmd_beltrami(cfg: ScanConfig, args) -> int:
    run = Run(cfg, "beltrami")
    rows, kappas = [], []
    last = None
    for amp in args.amplitudes:
        try:
            mu = gaussian_mu(amp, sigma=args.sigma, N=args.grid, L=args.L, support_radius=0.9 * args.L)
            q = solve_beltrami(mu)
        except BeltramiError as exc:
            run.errors.append((amp, str(exc)))
            continue
        kappa = q.deviation() / mu.c1_norm
        kappas.append(kappa)
        rows.append((repr(amp), repr(q.residual), q.iterations, repr(q.deviation()), repr(mu.c1_norm), repr(kappa)))
        last = q
    run.csv("beltrami.csv", ["amplitude", "residual", "iterations", "deviation", "c1_norm", "kappa"], rows)
    if last is not None:
        last.write(run.out / "grid.csv", run.out / "grid.json")
    run.report.update({"kappas": kappas})
    print("kappa per amplitude:", ", ".join(f"{k:.4f}" for k in kappas))
    run.check("all solves succeeded", not run.errors)
    run.check("residual <= 1e-6", all(float(r[1]) <= 1e-6 for r in rows))
    run.check("kappa stable within factor 2", bool(kappas) and max(kappas) <= 2 * min(kappas))
    return run.finish()


def cmd_fixtures(cfg: ScanConfig, args) -> int:
    for name, text in fixtures.FIXTURES.items():
        print(f"{name:12s} {text}")
    return 0


COMMANDS = {
    "classify": cmd_classify, "blowup": cmd_blowup, "flow": cmd_flow, "project": cmd_project,
    "chain": cmd_chain, "eta": cmd_eta, "holder": cmd_holder, "beltrami": cmd_beltrami,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--field", help="file containing a vector-field expression")
    src.add_argument("--fixture", choices=sorted(fixtures.FIXTURES))
    common.add_argument("--config", help="flat JSON config; flags override its keys")
    common.add_argument("--chart-center", help="comma-separated complex coordinates")
    common.add_argument("--chart-radius", type=float)
    common.add_argument("--brody-A", type=float)
    common.add_argument("--eps0", type=float)
    common.add_argument("--eps1", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="leafmetric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common])
    p.add_argument("--box-radius", type=float, default=3.0)
    sub.add_parser("blowup", parents=[common])
    p = sub.add_parser("flow", parents=[common])
    p.add_argument("--z", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p = sub.add_parser("project", parents=[common])
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--t", default="0")
    p = sub.add_parser("chain", parents=[common])
    p.add_argument("--x", required=True)
    p.add_argument("--y")
    p.add_argument("--separation", type=float, default=1e-3, help="relative transverse offset when --y is absent")
    p.add_argument("--R", type=float, default=1.0)
    p = sub.add_parser("eta", parents=[common])
    p.add_argument("--d-min", type=float, default=1e-4)
    p.add_argument("--d-max", type=float, default=1e-1)
    p.add_argument("--samples", type=int, default=9)
    p = sub.add_parser("holder", parents=[common])
    p.add_argument("--pairs", type=int, default=2000)
    p.add_argument("--d-min", type=float, default=1e-4)
    p.add_argument("--d-max", type=float, default=1e-1)
    p = sub.add_parser("beltrami", parents=[common])
    p.add_argument("--amplitudes", type=float, nargs="+", default=[0.02, 0.05, 0.1])
    p.add_argument("--sigma", type=float, default=0.4)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--L", type=float, default=2.0)
    sub.add_parser("fixtures", parents=[common])
    return parser


def make_config(args) -> ScanConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
    if args.field:
        data["field_source"] = args.field
    elif args.fixture:
        data["field_source"] = f"fixture:{args.fixture}"
    if args.chart_center:
        data["chart_center"] = tuple(parse_point(args.chart_center))
    for flag, key in [("chart_radius", "chart_radius"), ("brody_A", "brody_A"), ("eps0", "eps0"),
                      ("eps1", "eps1"), ("seed", "seed"), ("out", "output_dir")]:
        v = getattr(args, flag)
        if v is not None:
            data[key] = v
    return ScanConfig.from_json(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except FieldSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FlowError, ProjectionError, BeltramiError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
