"""``predwave`` command line.

Option values are layered: built-in defaults < ``--config`` file < environment
(``PREDWAVE_<OPTION>``) < command-line flags. Every successful command writes
its result file and a ``manifest.json`` into ``--out``.

Exit codes: 0 success, 1 numerical blow-up, 2 invalid input, 3 undetermined
classification.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import __version__
from . import cli_io
from .cartography import (CURVE_COLUMNS, SWEEP_COLUMNS, SweepSpec, h_crit, hcrit_vs_d,
                          sweep_plane)
from .errors import NumericalBlowupError, PredwaveError
from .kinetics import Params
from .ode_analysis import integrate_ode, steady_states
from .pde_sim import (Grid, InitialProfile, SimConfig, classify, determinism_hash,
                      observe_front, read_history, simulate, write_history, write_snapshot)
from .pde_sim.runner import reference_level, thresholds_for, upper_state
from .wave_thresholds import threshold_set

log = logging.getLogger("predwave")

EXIT_OK, EXIT_BLOWUP, EXIT_INVALID, EXIT_UNDETERMINED = 0, 1, 2, 3


def _float_list(s: str) -> list[float]:
    return [float(x) for x in str(s).replace(";", ",").split(",") if x.strip()]


def _range3(s: str) -> tuple[float, float, int]:
    parts = _float_list(s)
    if len(parts) != 3:
        raise ValueError(f"expected lo,hi,steps, got {s!r}")
    return parts[0], parts[1], int(parts[2])


def _opt_float(s):
    return None if s in (None, "", "none", "None") else float(s)


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    return str(s).strip().lower() in ("1", "true", "yes", "on")


# (name, converter, default, help)
PARAM_OPTS = {
    "E": (float, None, "dimensionless encounter rate"),
    "h": (float, None, "dimensionless handling time"),
    "alpha": (float, 0.0, "conversion rate"),
    "r": (float, 1.0, "relative predator growth rate"),
    "d": (float, 1.0, "relative predator diffusion"),
}
GRID_OPTS = {
    "L": (float, 400.0, "domain length"),
    "nx": (int, 4096, "number of nodes"),
    "dt": (_opt_float, None, "time step (default: chosen from the grid)"),
    "t_end": (float, 2000.0, "time horizon"),
    "sample_dt": (float, 5.0, "sampling interval"),
    "x0": (_opt_float, None, "initial front position (default L/2)"),
    "k": (float, 1.0, "initial front steepness"),
    "eps": (float, 1e-6, "extinction threshold"),
    "front_level": (_opt_float, None, "front detection level (default half plateau)"),
    "scheme": (str, "auto", "diffusion scheme: auto, explicit or imex"),
}
SWEEP_GRID = {"nx": (int, 1024, GRID_OPTS["nx"][2]), "t_end": (float, 800.0, GRID_OPTS["t_end"][2])}


def _pick(table: dict, *names) -> dict:
    return {n: table[n] for n in names}


COMMANDS: dict[str, dict] = {
    "thresholds": _pick(PARAM_OPTS, "E", "alpha"),
    "steady": _pick(PARAM_OPTS, "E", "h", "alpha", "r"),
    "ode": {**_pick(PARAM_OPTS, "E", "h", "alpha", "r"),
            "u0": (float, 0.9, "initial prey"), "v0": (float, 1.0, "initial predator"),
            "t_end": (float, 2000.0, "time horizon")},
    "simulate": {**PARAM_OPTS, **GRID_OPTS,
                 "snapshots": (str, "final", "snapshot times, comma separated; 'final' = last")},
    "classify": {**PARAM_OPTS, **GRID_OPTS,
                 "history": (str, None, "history archive written by simulate")},
    "hcrit": {**_pick(PARAM_OPTS, "E", "alpha", "r", "d"), **GRID_OPTS, **SWEEP_GRID,
              "tol": (float, 1e-3, "bisection tolerance in h"),
              "d_list": (_float_list, None, "comma-separated d values for an h_crit(d) curve"),
              "workers": (int, 1, "worker processes")},
    "sweep": {**_pick(PARAM_OPTS, "alpha", "r", "d"), **GRID_OPTS, **SWEEP_GRID,
              "E_range": (_range3, None, "lo,hi,steps"), "h_range": (_range3, None, "lo,hi,steps"),
              "refine": (_bool, False, "rerun boundary cells at full resolution"),
              "workers": (int, 1, "worker processes")},
}
REQUIRED = {"thresholds": ("E",), "steady": ("E", "h"), "ode": ("E", "h"),
            "simulate": ("E", "h"), "classify": ("E", "h", "history"),
            "hcrit": ("E",), "sweep": ("E_range", "h_range")}


class UsageError(PredwaveError, ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="predwave", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"predwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        sp = sub.add_parser(name)
        for key, (_, default, help_) in opts.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                            help=f"{help_} (default: {default})")
        _common(sp)
    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    _common(rp)
    return parser


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", default=None, help="output directory (default: current)")
    sp.add_argument("--format", choices=("csv", "json"), default=None)
    sp.add_argument("--config", default=None, help="key = value file; flags win")
    sp.add_argument("--log-level", default="WARNING")


def resolve_options(command: str, cli: dict, config: Optional[dict] = None,
                    environ: Optional[dict] = None) -> dict:
    """Merge defaults, config file, environment and flags, then convert types."""
    opts = COMMANDS[command]
    known = set(opts) | {"out", "format"}
    config = config or {}
    unknown = set(config) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    merged: dict[str, Any] = {k: d for k, (_, d, _) in opts.items()}
    merged.update({"out": ".", "format": "json"})
    merged.update(config)
    merged.update(cli_io.env_overrides(known, environ))
    merged.update({k: v for k, v in cli.items() if v is not None and k in known})
    for key, (conv, default, _) in opts.items():
        val = merged[key]
        if val is None or val == default:
            continue
        try:
            merged[key] = conv(val) if isinstance(val, str) else val
        except ValueError as exc:
            raise UsageError(f"--{key.replace('_', '-')}: cannot parse {val!r}: {exc}") from exc
    if merged["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {merged['format']!r}")
    missing = [k for k in REQUIRED[command] if merged.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m for m in missing))
    return merged


def sim_config(o: dict) -> SimConfig:
    return SimConfig(grid=Grid(L=o["L"], nx=o["nx"]), dt=o["dt"], t_end=o["t_end"],
                     front_level=o["front_level"], extinction_eps=o["eps"],
                     ic=InitialProfile(x0=o["x0"], k=o["k"]), scheme=o["scheme"],
                     sample_dt=o["sample_dt"])


def _params(o: dict, h: Optional[float] = None) -> Params:
    return Params(E=o["E"], h=o["h"] if h is None else h, alpha=o["alpha"],
                  r=o.get("r", 1.0), d=o.get("d", 1.0))


class Outcome:
    """What a command produced: records to print, files written, exit status."""

    def __init__(self, records: list[dict], name: str, columns=None, single=True,
                 files: Sequence[Path] = (), status: int = EXIT_OK, hash_: Optional[str] = None,
                 cfg: Optional[SimConfig] = None):
        self.records, self.name, self.columns, self.single = records, name, columns, single
        self.files, self.status, self.hash, self.cfg = list(files), status, hash_, cfg


def cmd_thresholds(o, out: Path) -> Outcome:
    ts = threshold_set(o["E"], o["alpha"])
    return Outcome([ts.as_dict()], "thresholds")


def cmd_steady(o, out: Path) -> Outcome:
    states = steady_states(o["E"], o["h"], o["alpha"], o["r"])
    return Outcome([s.as_dict() for s in states], "steady", single=False)


def cmd_ode(o, out: Path) -> Outcome:
    p = _params(o)
    traj = integrate_ode(p, o["u0"], o["v0"], o["t_end"])
    return Outcome([traj.as_dict()], "ode")


def _report_record(p: Params, rep, front) -> dict:
    d = rep.as_dict()
    d["params"] = p.as_dict()
    d["fitted_speed"] = d.pop("front_speed")
    d["front_level"] = front.level
    return d


def _status(rep) -> int:
    return EXIT_UNDETERMINED if rep.regime == "undetermined" else EXIT_OK


def cmd_simulate(o, out: Path) -> Outcome:
    p = _params(o)
    cfg = sim_config(o)
    res = simulate(p, cfg)
    x = cfg.grid.x
    files = []
    wanted = [s.strip() for s in str(o["snapshots"]).split(",") if s.strip()]
    for w in wanted:
        if w == "final":
            f = res.final
        else:
            t = float(w)
            f = min(res.history, key=lambda g: abs(g.t - t))
        files.append(write_snapshot(out / f"snapshot_t{f.t:.6g}.csv", f, x))
    files.append(write_history(out / "history.npz", res.history))
    rec = _report_record(p, res.report, res.front)
    return Outcome([rec], "report", files=files, status=_status(res.report),
                   hash_=res.hash, cfg=cfg)


def cmd_classify(o, out: Path) -> Outcome:
    p = _params(o)
    cfg = sim_config(o)
    try:
        history = read_history(o["history"])
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read history {o['history']}: {exc}") from exc
    if history[0].u.shape != (cfg.grid.nx,):
        raise UsageError(f"history has {history[0].u.size} nodes, --nx is {cfg.grid.nx}")
    u_ref = reference_level(p)
    level = cfg.front_level if cfg.front_level is not None else 0.5 * u_ref
    front = observe_front(history, cfg.grid, level, cfg.buffer_frac)
    rep = classify(p, history, thresholds_for(p.E, p.alpha), cfg, u_ref, upper_state(p), front)
    return Outcome([_report_record(p, rep, front)], "classification", status=_status(rep),
                   hash_=determinism_hash(history[-1]), cfg=cfg)


def cmd_hcrit(o, out: Path) -> Outcome:
    cfg = sim_config(o)
    if o["d_list"]:
        curve = hcrit_vs_d(o["E"], o["alpha"], o["r"], o["d_list"], cfg, o["tol"], o["workers"])
        recs = curve.rows()
        if o["format"] == "json":
            recs = [{"E": curve.E, "alpha": curve.alpha, "r": curve.r, "shape": curve.shape,
                     "curve": recs, "points": [p.as_dict() for p in curve.points]}]
            return Outcome(recs, "hcrit_curve", cfg=cfg)
        return Outcome(recs, "hcrit_curve", columns=list(CURVE_COLUMNS), single=False, cfg=cfg)
    res = h_crit(o["E"], o["alpha"], o["r"], o["d"], cfg, o["tol"], o["workers"])
    return Outcome([res.as_dict()], "hcrit", cfg=cfg)


def cmd_sweep(o, out: Path) -> Outcome:
    cfg = sim_config(o)
    spec = SweepSpec(o["E_range"], o["h_range"], o["alpha"], o["r"], o["d"], cfg,
                     refine_cfg=cfg.with_(grid=Grid(L=o["L"], nx=4096), t_end=2000.0)
                     if o["refine"] else None)
    labels = sweep_plane(spec, workers=o["workers"])
    rows = [z.row(spec.alpha, spec.r, spec.d) for z in labels]
    return Outcome(rows, "sweep", columns=list(SWEEP_COLUMNS), single=False, cfg=cfg)


HANDLERS: dict[str, Callable[[dict, Path], Outcome]] = {
    "thresholds": cmd_thresholds, "steady": cmd_steady, "ode": cmd_ode,
    "simulate": cmd_simulate, "classify": cmd_classify, "hcrit": cmd_hcrit, "sweep": cmd_sweep,
}


def execute(command: str, o: dict, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    out = Path(o["out"])
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    res = HANDLERS[command](o, out)
    text = cli_io.encode(res.records, o["format"], res.columns, res.single)
    result_path = out / f"{res.name}.{o['format']}"
    result_path.write_text(text)
    stdout.write(text)
    files = res.files + [result_path]
    manifest = {
        "tool": "predwave", "version": __version__, "command": command,
        "options": {k: v for k, v in o.items() if k != "out"},
        "params": {k: o[k] for k in ("E", "h", "alpha", "r", "d") if k in o},
        "sim_config": res.cfg.as_dict() if res.cfg is not None else None,
        "wall_time_s": time.perf_counter() - t0,
        "outputs": {f.name: cli_io.sha256_file(f) for f in files},
        "determinism_hash": res.hash,
        "exit_status": res.status,
    }
    cli_io.write_manifest(out, manifest)
    return res.status


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            m = cli_io.read_manifest(args.manifest)
            command, opts = m["command"], dict(m["options"])
            if command not in COMMANDS:
                raise UsageError(f"manifest names unknown command {command!r}")
            opts["out"] = args.out or "."
            if args.format:
                opts["format"] = args.format
            return execute(command, opts, stdout)
        cli = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}
        config = cli_io.read_config_file(args.config) if args.config else None
        opts = resolve_options(args.command, cli, config)
        return execute(args.command, opts, stdout)
    except NumericalBlowupError as exc:
        print(f"predwave: numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (PredwaveError, ValueError) as exc:
        print(f"predwave: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
