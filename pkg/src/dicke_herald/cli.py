"""Command-line front end: ``simulate``, ``montecarlo`` and ``scan``.

Exit codes: 0 success, 2 config error, 3 geometry infeasible,
4 destructive interference, 5 I/O error.

Files written to ``--out`` (default: the config's ``output.dir``):

* ``simulate``   -> ``state.csv`` (basis, real, imag) and ``simulate.json``
* ``montecarlo`` -> ``montecarlo.json``
* ``scan``       -> ``scan.csv`` (columns in ``SCAN_COLUMNS``) and ``scan.json``
* any failure    -> ``error.json`` with ``status``, ``kind``, ``message``, ``exit_code``

Set ``DICKE_HERALD_WORKERS`` to evaluate Monte Carlo samples in parallel.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import ScanPoint, scan_parameter
from .config import RunConfig
from .detection import DestructiveInterferenceError, run_protocol
from .errors import ConfigError, GeometryInfeasibleError
from .geometry import phase_matrix
from .state import fidelity, make_dicke_state

log = logging.getLogger("dicke_herald")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_INTERFERENCE = 4
EXIT_IO = 5

STATE_COLUMNS = ("basis", "real", "imag")
SCAN_COLUMNS = (
    "axis", "value", "seed", "status", "num_samples", "num_failures",
    "mean_fidelity", "fidelity_stddev", "fidelity_stderr",
    "q05", "q50", "q95", "mean_relative_rate", "first_order_fidelity", "error",
)


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _dump_json(path: Path, record: dict):
    path.write_text(json.dumps(record, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _load(args):
    cfg = RunConfig.load(args.config)
    return cfg.with_overrides(seed=args.seed, samples=args.samples, engine=args.engine, out=args.out)


def cmd_simulate(cfg) -> int:
    geom = cfg.geometry()
    detectors = cfg.detectors(geom)
    phases = phase_matrix(geom, detectors)
    result = run_protocol(
        cfg.num_emitters,
        phases,
        cfg.polarizers,
        cfg.emission(),
        interpretation=cfg.interpretation,
        engine=cfg.engine,
    )
    target = cfg.target()
    fid = None
    if target.num_qubits == cfg.num_emitters:
        fid = fidelity(result.final_state, make_dicke_state(target))
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "state.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATE_COLUMNS)
        for key in sorted(result.final_state.amplitudes, reverse=True):
            amp = result.final_state[key]
            writer.writerow((key, fmt(amp.real), fmt(amp.imag)))
    _dump_json(out / "simulate.json", {
        "command": "simulate",
        "status": "ok",
        "fidelity": fid,
        "relative_rate": result.relative_rate,
        "squared_norm": result.squared_norm,
        "interpretation": result.interpretation.value,
        "target": {"num_qubits": target.num_qubits, "two_m": target.spin_projection_times_two},
        "detector_angles": [d.angle for d in detectors],
        "config": cfg.echo(),
    })
    log.info("heralded %d-term state, fidelity %s", len(result.final_state), fid)
    return EXIT_OK


def cmd_montecarlo(cfg) -> int:
    report = cfg.setup().run(config_echo=cfg.echo())
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(out / "montecarlo.json", {"command": "montecarlo", "status": "ok"} | report.to_dict())
    log.info("mean fidelity %.6f +- %.6f", report.mean_fidelity, report.fidelity_stderr)
    return EXIT_OK


def _scan_row(axis: str, point: ScanPoint) -> list:
    r = point.report
    if r is None:
        return [axis, fmt(point.value), point.seed, "error"] + [""] * 10 + [point.error]
    return [
        axis, fmt(point.value), point.seed, "ok", r.num_samples, r.num_failures,
        fmt(r.mean_fidelity), fmt(r.fidelity_stddev), fmt(r.fidelity_stderr),
        *(fmt(q) for q in r.quantiles), fmt(r.mean_relative_rate),
        fmt(r.first_order_fidelity), "",
    ]


def cmd_scan(cfg) -> int:
    scan = cfg.raw.get("scan")
    if scan is None:
        raise ConfigError("scan: the config has no 'scan' block")
    points = scan_parameter(scan["axis"], scan["values"], cfg.setup(), echo=cfg.echo())
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scan.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for p in points:
            writer.writerow(_scan_row(scan["axis"], p))
    _dump_json(out / "scan.json", {
        "command": "scan",
        "axis": scan["axis"],
        "config": cfg.echo(),
        "points": [
            {"value": p.value, "seed": p.seed, "error": p.error,
             "report": None if p.report is None else p.report.to_dict()}
            for p in points
        ],
    })
    if not any(p.report is not None for p in points):
        # every point failed; surface the first failure's category
        return EXIT_GEOMETRY if "GeometryInfeasible" in (points[0].error or "") else EXIT_CONFIG
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "montecarlo": cmd_montecarlo, "scan": cmd_scan}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, GeometryInfeasibleError):
        return EXIT_GEOMETRY
    if isinstance(exc, DestructiveInterferenceError):
        return EXIT_INTERFERENCE
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-herald",
        description="Heralded symmetric Dicke states from far-field photodetection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--samples", type=int, help="override num_samples")
        p.add_argument("--engine", choices=["sequential", "permanent"])
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out) if args.out else None
    try:
        cfg = _load(args)
        out = cfg.out_dir
        return COMMANDS[args.command](cfg)
    except (ValueError, ArithmeticError, OSError) as exc:
        code = _exit_code(exc)
        record = {
            "status": "error",
            "command": args.command,
            "kind": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
        print(json.dumps(record), file=sys.stderr)
        if out is not None and code != EXIT_IO:
            try:
                out.mkdir(parents=True, exist_ok=True)
                _dump_json(out / "error.json", record)
            except OSError:
                pass
        return code


if __name__ == "__main__":
    sys.exit(main())
