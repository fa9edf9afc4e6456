"""Command-line front end: sweeps, walks, boundaries, oracles, export.

One verb per procedure:

``solve``
    Seed a periodic-instanton solution and walk it to requested knobs.
``sweep``
    Grid over theta (or eps) at fixed T lines; one CSV row per point.
``walk``
    Follow a list of (T, theta, eps) waypoints from the seed.
``boundary``
    Classical-shooting E_0(N) and the tau-limit boundary estimate.
``oracle-1d``
    Analytic 1D relation T(E, eps) and the WKB exponent over a grid.
``schrodinger``
    Exact coupled-channel suppression exponent with lam-ladder
    extrapolation.
``export``
    Figure-ready TSV (and a rendered PNG) from a results table.

Configuration is a single JSON document (``--print-default-config`` shows
all defaults); results are CSV with a fixed column order and 17 significant
digits so that identical runs produce identical tables.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic1d import BranchLabel, exact_T_of_E, fig6_branches, wkb_exponent
from .classical import find_E0, tint_phase_scan
from .errors import TunnexError
from .model import ModelParams
from .bvp import walk_to
from .pipelines import boundary_from_tau_limit, instanton_start
from .qoracle import f_exact
from .types import SaddleSolution

__all__ = ["main", "default_config", "RESULT_COLUMNS"]

RESULT_COLUMNS = ("T", "theta", "eps", "E", "N", "F", "T_int", "topology",
                  "residual_norm", "newton_iters", "wall_time_s")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SEED = 3
EXIT_PARTIAL = 4


def default_config() -> dict:
    """Full configuration with documented defaults for every subcommand."""
    return {
        "model": {"omega": 0.5},
        "contour": {"t_left": -20.0, "t_right": 16.0, "n_ab": 480,
                    "n_cd": 400, "h_bc": 0.035},
        "solver": {"tol": 1e-10, "max_step": 0.1},
        "seed": {"T": 5.6},
        "solve": {"T": 5.6, "theta": 0.0, "eps": 0.0},
        "sweep": {"axis": "theta", "start": 0.0, "stop": 0.5, "steps": 11,
                  "T_values": [5.6], "eps": 0.002},
        "walk": {"waypoints": [[5.6, 0.0, 0.0]]},
        "boundary": {"N_values": [3.72], "tau_over_vartheta": 2.923,
                     "tau_seq": [140.0, 200.0, 280.0, 380.0], "eps": 0.001},
        "oracle1d": {"E_start": 0.3, "E_stop": 1.2, "steps": 10,
                     "eps": 0.0},
        "schrodinger": {"E_resc": 0.8, "N_resc": 0.1,
                        "lambdas": [0.2, 0.15, 0.1], "exact_ladder": False},
        "export": {"figure": "fig6", "results": "results.csv",
                   "E_start": 0.05, "E_stop": 0.95, "steps": 60,
                   "eps": 0.0, "fixed_N": 0.1, "E": 1.05, "N": 0.43,
                   "n_phi": 128},
    }


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: Optional[str]) -> dict:
    """Defaults merged with the JSON document at ``path`` (if given)."""
    cfg = default_config()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = _merge(cfg, json.load(fh))
    return cfg


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return "" if value is None else str(value)


@dataclass
class ResultRow:
    """One solve outcome; failures carry an error code in ``topology``."""

    T: float
    theta: float
    eps: float
    E: Optional[float] = None
    N: Optional[float] = None
    F: Optional[float] = None
    T_int: Optional[float] = None
    topology: Optional[str] = None
    residual_norm: Optional[float] = None
    newton_iters: Optional[int] = None
    wall_time_s: Optional[float] = None

    @classmethod
    def from_solution(cls, sol: SaddleSolution, wall: float) -> "ResultRow":
        topo = sol.topology.value if sol.topology is not None else ""
        return cls(T=sol.T, theta=sol.theta, eps=sol.eps, E=sol.E, N=sol.N,
                   F=sol.F, T_int=sol.T_int, topology=topo,
                   residual_norm=sol.residual_norm,
                   newton_iters=sol.newton_iters, wall_time_s=wall)

    @classmethod
    def failed(cls, T: float, theta: float, eps: float, exc: Exception,
               wall: float) -> "ResultRow":
        return cls(T=T, theta=theta, eps=eps,
                   topology=f"ERROR:{type(exc).__name__}", wall_time_s=wall)

    def values(self):
        return [getattr(self, col) for col in RESULT_COLUMNS]


def write_rows(path: str, rows) -> None:
    """CSV with fixed columns, LF endings, 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_rows(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _write_table(path: str, header: list[str], rows, comment: str = "") -> None:
    """Generic delimited table (CSV for results, TSV for figure data)."""
    sep = "\t" if path.endswith(".tsv") else ","
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(sep.join(header) + "\n")
        for row in rows:
            fh.write(sep.join(_fmt(v) for v in row) + "\n")


def _model(cfg: dict, eps: float = 0.0) -> ModelParams:
    return ModelParams(omega=cfg["model"]["omega"], epsilon=eps)


def _seed(cfg: dict) -> SaddleSolution:
    c = cfg["contour"]
    return instanton_start(cfg["seed"]["T"], _model(cfg),
                           t_left=c["t_left"], t_right=c["t_right"],
                           n_ab=c["n_ab"], n_cd=c["n_cd"], h_bc=c["h_bc"],
                           tol=cfg["solver"]["tol"])


def cmd_solve(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    target = cfg["solve"]
    params = _model(cfg)
    t0 = time.perf_counter()
    try:
        seed = _seed(cfg)
    except TunnexError as exc:
        print(f"seed failure: {exc}", file=sys.stderr)
        return EXIT_SEED
    try:
        sol = walk_to(seed, params, T=target["T"], theta=target["theta"],
                      eps=target["eps"], max_step=cfg["solver"]["max_step"],
                      tol=cfg["solver"]["tol"])
        rows = [ResultRow.from_solution(sol, time.perf_counter() - t0)]
        code = EXIT_OK
    except TunnexError as exc:
        rows = [ResultRow.failed(target["T"], target["theta"], target["eps"],
                                 exc, time.perf_counter() - t0)]
        code = EXIT_PARTIAL
    write_rows(out, rows)
    return code


def _sweep_line(args):
    """One fixed-T line of a sweep (runs in a worker process)."""
    cfg, t_value = args
    sw = cfg["sweep"]
    grid = np.linspace(sw["start"], sw["stop"], sw["steps"])
    params = _model(cfg)
    rows = []
    seed = _seed(cfg)
    t0 = time.perf_counter()
    try:
        cur = walk_to(seed, params, T=t_value, eps=sw["eps"],
                      max_step=cfg["solver"]["max_step"])
    except TunnexError as exc:
        wall = time.perf_counter() - t0
        return [ResultRow.failed(t_value, g, sw["eps"], exc, wall)
                for g in grid]
    for g in grid:
        t0 = time.perf_counter()
        try:
            cur = walk_to(cur, params, theta=g,
                          max_step=cfg["solver"]["max_step"])
            rows.append(ResultRow.from_solution(
                cur, time.perf_counter() - t0))
        except TunnexError as exc:
            rows.append(ResultRow.failed(
                t_value, g, sw["eps"], exc, time.perf_counter() - t0))
    return rows


def cmd_sweep(cfg: dict, out: str, resume: bool, workers: int) -> int:
    sw = cfg["sweep"]
    if sw["steps"] < 1 or not sw["T_values"]:
        print("empty sweep range", file=sys.stderr)
        return EXIT_CONFIG
    if sw["axis"] != "theta":
        print(f"unsupported sweep axis {sw['axis']!r}", file=sys.stderr)
        return EXIT_CONFIG
    if resume and os.path.exists(out):
        have = read_rows(out)
        if len(have) == sw["steps"] * len(sw["T_values"]):
            return EXIT_OK
    jobs = [(cfg, t) for t in sw["T_values"]]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            lines = list(pool.map(_sweep_line, jobs))
    else:
        lines = [_sweep_line(job) for job in jobs]
    rows = [row for line in lines for row in line]
    rows.sort(key=lambda r: (r.T, r.theta, r.eps))
    write_rows(out, rows)
    failed = sum(1 for r in rows if r.topology and r.topology.startswith("ERROR"))
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_walk(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    params = _model(cfg)
    try:
        cur = _seed(cfg)
    except TunnexError as exc:
        print(f"seed failure: {exc}", file=sys.stderr)
        return EXIT_SEED
    rows = []
    code = EXIT_OK
    for T, theta, eps in cfg["walk"]["waypoints"]:
        t0 = time.perf_counter()
        try:
            cur = walk_to(cur, params, T=T, theta=theta, eps=eps,
                          max_step=cfg["solver"]["max_step"])
            rows.append(ResultRow.from_solution(cur, time.perf_counter() - t0))
        except TunnexError as exc:
            rows.append(ResultRow.failed(T, theta, eps, exc,
                                         time.perf_counter() - t0))
            code = EXIT_PARTIAL
            break
    write_rows(out, rows)
    return code


def cmd_boundary(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    bc = cfg["boundary"]
    params = _model(cfg)
    rows = []
    for n_val in bc["N_values"]:
        e0 = find_E0(n_val, params)
        rows.append(("shooting", n_val, e0))
    try:
        lim = boundary_from_tau_limit(
            bc["tau_over_vartheta"], params, tau_seq=bc["tau_seq"],
            eps=bc["eps"])
        rows.append(("tau_limit", lim["N"], lim["E"]))
        rows.append(("tau_limit_check", lim["N"], lim["E0_classical"]))
    except TunnexError as exc:
        print(f"tau-limit failure: {exc}", file=sys.stderr)
        _write_table(out, ["method", "N", "E0"], rows)
        return EXIT_PARTIAL
    _write_table(out, ["method", "N", "E0"], rows)
    return EXIT_OK


def cmd_oracle_1d(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    oc = cfg["oracle1d"]
    grid = np.linspace(oc["E_start"], oc["E_stop"], oc["steps"])
    rows = []
    for e_val in grid:
        t_of_e = exact_T_of_E(float(e_val), oc["eps"])
        f_wkb = wkb_exponent(float(e_val)) if e_val < 1.0 else 0.0
        rows.append((float(e_val), t_of_e, f_wkb))
    _write_table(out, ["E", "T", "F_wkb"],
                 rows, comment=f"eps={oc['eps']:g}")
    return EXIT_OK


def cmd_schrodinger(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    sc = cfg["schrodinger"]
    f0, diag = f_exact(sc["E_resc"], sc["N_resc"], lambdas=sc["lambdas"],
                       omega=cfg["model"]["omega"],
                       exact_ladder=sc["exact_ladder"])
    rows = [(lam, f_lam, int(n)) for lam, f_lam, n in
            zip(diag["lambdas"], diag["F_values"], diag["N_values"])]
    rows.append((0.0, f0, -1))
    _write_table(out, ["lambda", "F", "N_channel"], rows,
                 comment=f"E_resc={sc['E_resc']:g} N_resc={sc['N_resc']:g} "
                         "(lambda=0 row is the extrapolation)")
    return EXIT_OK


def _render_png(path: str, xs, ys_list, labels, xlabel: str, ylabel: str,
                title: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for x, y, lab in zip(xs, ys_list, labels):
        ax.plot(x, y, label=lab)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if labels and any(labels):
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_export(cfg: dict, out: str, resume: bool) -> int:
    if resume and os.path.exists(out):
        return EXIT_OK
    ex = cfg["export"]
    fig_id = ex["figure"]
    png = os.path.splitext(out)[0] + ".png"
    if fig_id == "fig6":
        branches = fig6_branches()
        rows = [(b.label.value, b.E, b.T_half) for b in branches]
        _write_table(out, ["branch", "E", "T_half"], rows,
                     comment="five 1D solution branches")
        xs, ys, labels = [], [], []
        for label in BranchLabel:
            pts = [(b.E, b.T_half) for b in branches if b.label is label]
            xs.append(np.array([p[0] for p in pts]))
            ys.append(np.array([p[1] for p in pts]))
            labels.append(label.value)
        _render_png(png, xs, ys, labels, "E", "T/2", "1D solution branches")
        return EXIT_OK
    if fig_id == "fig15a":
        data = read_rows(ex["results"])
        sel = [(float(r["E"]), float(r["T"])) for r in data
               if r["E"] and abs(float(r["N"]) - ex["fixed_N"]) < 5e-3]
        if not sel:
            print(f"results file has no rows near N={ex['fixed_N']:g}",
                  file=sys.stderr)
            return EXIT_CONFIG
        sel.sort()
        _write_table(out, ["E", "T"], sel,
                     comment=f"T(E) at N={ex['fixed_N']:g}")
        e_arr = np.array([s[0] for s in sel])
        t_arr = np.array([s[1] for s in sel])
        _render_png(png, [e_arr], [t_arr], [""], "E", "T",
                    f"T(E) at N={ex['fixed_N']:g}")
        return EXIT_OK
    if fig_id == "fig20":
        params = _model(cfg)
        phis, tints, phi_star, t_min = tint_phase_scan(
            ex["E"], ex["N"], params, n_phi=ex["n_phi"])
        rows = list(zip(phis, tints))
        _write_table(out, ["phi", "T_int"], rows,
                     comment=f"E={ex['E']:g} N={ex['N']:g} "
                             f"phi*={phi_star:.6f} T_int_min={t_min:.6f}")
        _render_png(png, [phis], [tints], [""], "phi", "T_int",
                    f"interaction time, E={ex['E']:g}, N={ex['N']:g}")
        return EXIT_OK
    print(f"unknown figure id {fig_id!r}", file=sys.stderr)
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunnex",
        description="Semiclassical tunneling suppression toolkit")
    parser.add_argument("--config", help="JSON config path")
    parser.add_argument("--out", default="results.csv",
                        help="output table path")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for sweeps")
    parser.add_argument("--resume", action="store_true",
                        help="skip work whose output already exists")
    parser.add_argument("--print-default-config", action="store_true",
                        help="print the full default config and exit")
    parser.add_argument("command", nargs="?",
                        choices=["solve", "sweep", "walk", "boundary",
                                 "oracle-1d", "schrodinger", "export"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.print_default_config:
        print(json.dumps(default_config(), indent=2))
        return EXIT_OK
    if args.command is None:
        print("no command given", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "solve":
            return cmd_solve(cfg, args.out, args.resume)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.resume, args.workers)
        if args.command == "walk":
            return cmd_walk(cfg, args.out, args.resume)
        if args.command == "boundary":
            return cmd_boundary(cfg, args.out, args.resume)
        if args.command == "oracle-1d":
            return cmd_oracle_1d(cfg, args.out, args.resume)
        if args.command == "schrodinger":
            return cmd_schrodinger(cfg, args.out, args.resume)
        if args.command == "export":
            return cmd_export(cfg, args.out, args.resume)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
