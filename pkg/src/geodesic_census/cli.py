"""Command-line interface.

Subcommands:
    census build | census info
    constants
    stats avg|var|clt|llt|wordstats|mgf
    pressure

Reports are written as JSON plus CSV tables with fixed column orders (see
reports.py), and matplotlib figures rendered alongside unless --no-figures.
The default output root is $GEODESIC_CENSUS_DIR, falling back to the
current directory.  Exit codes: 0 success, 2 data integrity, 3 statistical
precondition, 4 numerical failure.  Failures print one machine-readable
JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import census as census_mod
from . import figures, reports, stats, thermo
from .errors import GeodesicCensusError
from .hyperbolic import octagon_representation, schottky_representation
from .words import SurfacePresentation


@dataclass
class RunConfig:
    """Validated run inputs: exactly one system source."""

    system: str | None = None       # octagon | schottky | file:PATH
    census_path: str | None = None
    separation: float = 3.0
    n_max: int | None = None
    workers: int = 0
    out: Path = Path(".")
    fmt: str = "csv"
    figures: bool = True

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.workers <= 0:
            self.workers = os.cpu_count() or 1


def _out_root(args) -> Path:
    root = getattr(args, "out", None) or os.environ.get(
        "GEODESIC_CENSUS_DIR") or "."
    p = Path(root)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _parse_grid(text: str) -> np.ndarray:
    lo, hi, step = (float(v) for v in text.split(":"))
    if step <= 0:
        raise ValueError("grid step must be positive")
    return np.arange(lo, hi + step * 0.5, step)


def _system_source(args):
    name = args.system
    if name is None:
        return None
    if name.startswith("builtin:"):
        name = name.split(":", 1)[1]
    if name == "octagon":
        return "octagon"
    if name == "schottky":
        return "schottky"
    if name.startswith("file:"):
        return Path(name.split(":", 1)[1])
    return Path(name)


def _build_group_census(source, args):
    cfg = RunConfig(system=str(source), n_max=args.n_max,
                    workers=args.workers or 0)
    if source == "octagon":
        rep = octagon_representation()
        pres = SurfacePresentation(genus=2)
    else:
        rep = schottky_representation(args.separation)
        pres = SurfacePresentation(free_rank=2)
    return census_mod.build_census(pres, rep, cfg.n_max, workers=cfg.workers)


def _census_from_args(args, required=True):
    if getattr(args, "census", None):
        return census_mod.load_census(args.census)
    source = _system_source(args)
    if source is None:
        if required:
            raise ValueError("need --census or --system")
        return None
    if source in ("octagon", "schottky"):
        if args.n_max is None:
            raise ValueError("--n-max required to build a census")
        return _build_group_census(source, args)
    system = thermo.MarkovChainSystem.from_json(source)
    if args.n_max is None:
        raise ValueError("--n-max required to build a census")
    return census_mod.build_census_from_system(system, args.n_max,
                                               workers=args.workers or 1)


def _census_info_rows(census):
    rows = []
    table = census.m_table()
    for n in sorted(table):
        mask = census.n == n
        rows.append({"n": n, "count": int(mask.sum()),
                     "primes": int((mask & census.prime).sum()),
                     "min_ell": table[n]})
    return rows


def _print_census_summary(census):
    print(f"presentation   {census.presentation}")
    print(f"representation {census.representation}")
    print(f"records        {len(census)}")
    print(f"n_max          {census.n_max}")
    print(f"alpha_hat      {census.alpha_hat:.6g}")
    print(f"T_cert         {census.T_cert:.6g}")
    print(f"checksum       {census.checksum():016x}")
    print("  n   classes    primes    m(n)       m(n)/n")
    for row in _census_info_rows(census):
        print(f"{row['n']:3d} {row['count']:9d} {row['primes']:9d} "
              f"{row['min_ell']:10.6f} {row['min_ell'] / row['n']:10.6f}")


def cmd_census(args) -> int:
    out = _out_root(args)
    if args.action == "build":
        census = _census_from_args(args)
        path = args.census or out / _census_name(census)
        census_mod.save_census(census, path)
        _print_census_summary(census)
        print(f"wrote {path}")
        return 0
    census = census_mod.load_census(args.census)
    _print_census_summary(census)
    rows = _census_info_rows(census)
    if args.figures:
        figures.save_figure(figures.figure_for("census_info", rows),
                            out / "census_info.png")
    reports.write_csv("census_info", rows, out / "census_info.csv")
    return 0


def _census_name(census) -> str:
    kind = {"surface": "octagon", "free": "schottky", "sft": "sft"}
    return f"census_{kind[census.mode_kind]}_n{census.n_max}.csv"


def _constants_for(args, census=None):
    if getattr(args, "constants", None):
        with open(args.constants) as fh:
            doc = json.load(fh)
        body = doc.get("report", doc)
        return thermo.ThermoConstants(
            h=body["h"], A=body["A"], sigma2=body["sigma2"], D=body["D"],
            A_tilde=body["A_tilde"], degenerate=body["degenerate"],
            quasi_power=body.get("quasi_power", {}),
            residuals=body.get("residuals", {}),
            method=body.get("method", {}))
    source = _system_source(args)
    if source is not None and source not in ("octagon", "schottky"):
        system = thermo.MarkovChainSystem.from_json(source)
        return thermo.thermo_constants(
            thermo.PressureEvaluator(system=system))
    if census is None:
        raise ValueError("need --constants, --census, or a synthetic "
                         "--system file to derive constants")
    window = None
    if getattr(args, "window", None):
        lo, hi = (int(v) for v in args.window.split(":"))
        window = tuple(range(lo, hi + 1))
    pe = thermo.PressureEvaluator(census=census, fit_window=window)
    return thermo.thermo_constants(pe)


def cmd_constants(args) -> int:
    out = _out_root(args)
    census = None
    if args.census or _system_source(args) in ("octagon", "schottky"):
        census = _census_from_args(args)
    tc = _constants_for(args, census)
    body = tc.to_dict()
    if census is not None and census.representation == "octagon":
        # exploratory: boundary-length heuristic for A on the octagon model
        from .hyperbolic import OCTAGON_GENERATOR_LENGTH

        body["exploratory_boundary_A"] = float(
            4 * OCTAGON_GENERATOR_LENGTH / (np.pi**2 * 2))
    payload = reports.report_payload("constants", body, census)
    path = out / "constants.json"
    reports.write_json(payload, path)
    print(json.dumps({k: body[k] for k in
                      ("h", "A", "sigma2", "D", "A_tilde", "degenerate")},
                     indent=2, sort_keys=True))
    print(f"wrote {path}")
    return 0


def cmd_stats(args) -> int:
    out = _out_root(args)
    census = _census_from_args(args)
    tc = _constants_for(args, census)
    kind = args.statistic
    base = f"{kind}"
    if kind == "avg":
        Ts = _parse_grid(args.T_grid) if args.T_grid else [args.T]
        rows = []
        for T in Ts:
            r = stats.average_word_length(census, float(T), tc)
            rows.append({"T": r.T, "pi": r.pi_T,
                         "empirical_mean": r.empirical_mean,
                         "model_value": r.model_value, "ratio": r.ratio,
                         "elementary_model": r.elementary_model})
        payload = reports.report_payload("average", {"rows": rows}, census, tc)
        _emit(args, out, base, "average", payload, rows, rows)
    elif kind == "var":
        grid = (_parse_grid(args.T_grid) if args.T_grid
                else stats.default_variance_grid(census))
        rep = stats.variance_word_length(census, grid, weights=args.weights)
        payload = reports.report_payload("variance", rep, census, tc)
        _emit(args, out, base, "variance", payload, rep.rows(), rep)
    elif kind == "clt":
        rep = stats.clt_empirical(census, args.T, tc.A, tc.sigma2)
        payload = reports.report_payload("clt", rep, census, tc)
        _emit(args, out, base, "clt", payload, rep.rows(), rep)
        print(f"KS = {rep.ks:.6f} (classical {rep.ks_classical:.6f}) at "
              f"T={args.T:g}, pi={rep.pi_T}")
    elif kind == "llt":
        grid = _parse_grid(args.x_grid) if args.x_grid else None
        rep = stats.llt_profile(census, args.T, tc.A, tc.sigma2, grid)
        payload = reports.report_payload("llt", rep, census, tc)
        _emit(args, out, base, "llt", payload, rep.rows(), rep)
    elif kind == "wordstats":
        rep = stats.word_ordered_stats(census, args.n, tc)
        payload = reports.report_payload("wordstats", rep, census, tc)
        _emit(args, out, base, "wordstats", payload, rep.rows(), rep)
    elif kind == "mgf":
        zs = _parse_grid(args.z_grid) if args.z_grid else [args.z]
        rows = []
        for z in zs:
            if args.T is not None:
                v = stats.moment_generating(census, float(z), T=args.T)
                rows.append({"key": "log_C_z", "z": float(z), "log_value": v})
            else:
                v = stats.moment_generating(census, float(z), n=args.n)
                rows.append({"key": "log_E_z", "z": float(z), "log_value": v})
        payload = reports.report_payload("mgf", {"rows": rows}, census, tc)
        _emit(args, out, base, "mgf", payload, rows, rows)
    else:
        raise ValueError(f"unknown statistic {kind!r}")
    return 0


def _emit(args, out: Path, base: str, kind: str, payload, rows, fig_input):
    json_path = out / f"{base}.json"
    reports.write_json(payload, json_path)
    wrote = [str(json_path)]
    if args.format != "json":
        csv_path = out / f"{base}.csv"
        reports.write_csv(kind, rows, csv_path)
        wrote.append(str(csv_path))
    if args.figures:
        png = out / f"{base}.png"
        figures.save_figure(figures.figure_for(kind, fig_input), png)
        wrote.append(str(png))
    print("wrote " + " ".join(wrote))


def cmd_pressure(args) -> int:
    out = _out_root(args)
    source = _system_source(args)
    pe = None
    census = None
    if args.census:
        census = census_mod.load_census(args.census)
        pe = thermo.PressureEvaluator(census=census)
    elif source is not None and source not in ("octagon", "schottky"):
        pe = thermo.PressureEvaluator(
            system=thermo.MarkovChainSystem.from_json(source))
    else:
        raise ValueError("pressure needs --census or a synthetic --system")
    s_grid = _parse_grid(args.s_grid)
    z_grid = _parse_grid(args.z_grid) if args.z_grid else [args.z]
    rows = []
    for z in z_grid:
        for s in s_grid:
            P, se = pe.pressure_with_stderr(float(s), float(z))
            rows.append({"s": float(s), "z": float(z), "P": P, "stderr": se})
    payload = reports.report_payload("pressure", {"rows": rows}, census)
    _emit(args, out, "pressure", "pressure", payload, rows, rows)
    return 0


def _add_common(p, census_opt=True):
    p.add_argument("--system", help="octagon | schottky | file:SPEC.json")
    p.add_argument("--separation", type=float, default=3.0,
                   help="Schottky translation length (default 3.0)")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--workers", type=int, default=0,
                   help="enumeration worker processes (default: all cores)")
    if census_opt:
        p.add_argument("--census", help="census CSV path")
    p.add_argument("--out", help="output directory "
                                 "(default $GEODESIC_CENSUS_DIR or .)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-figures", dest="figures", action="store_false",
                   help="skip matplotlib figure output")
    p.add_argument("--constants", help="constants JSON from `constants`")
    p.add_argument("--window", help="census pressure fit window lo:hi")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="geodesic-census",
        description="Closed-geodesic censuses, thermodynamic constants, "
                    "and limit-theorem statistics")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("census", help="build or inspect a census")
    pc.add_argument("action", choices=("build", "info"))
    _add_common(pc)
    pc.set_defaults(fn=cmd_census)

    pk = sub.add_parser("constants", help="thermodynamic constants")
    _add_common(pk)
    pk.set_defaults(fn=cmd_constants)

    ps = sub.add_parser("stats", help="census statistics")
    ps.add_argument("statistic",
                    choices=("avg", "var", "clt", "llt", "wordstats", "mgf"))
    _add_common(ps)
    ps.add_argument("--T", type=float)
    ps.add_argument("--T-grid", dest="T_grid", help="lo:hi:step")
    ps.add_argument("--n", type=int)
    ps.add_argument("--z", type=float, default=0.0)
    ps.add_argument("--z-grid", dest="z_grid", help="lo:hi:step")
    ps.add_argument("--x-grid", dest="x_grid", help="lo:hi:step")
    ps.add_argument("--weights", choices=("unit", "pi"), default="unit")
    ps.set_defaults(fn=cmd_stats)

    pp = sub.add_parser("pressure", help="pressure grid dump")
    _add_common(pp)
    pp.add_argument("--s-grid", dest="s_grid", required=True, help="lo:hi:step")
    pp.add_argument("--z", type=float, default=0.0)
    pp.add_argument("--z-grid", dest="z_grid", help="lo:hi:step")
    pp.set_defaults(fn=cmd_pressure)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GeodesicCensusError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "exit_code": exc.exit_code}), file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "exit_code": 1}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
