"""Command-line front end: ``cmetric analyze|generate|eval|export``.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 bad configuration.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from .centrality import compute_series
from .config import Config, read_config_file
from .errors import CMetricError, ConfigError
from .evaluation import AnnotationSet, compute_tde
from .graph import build_frame_graph
from .ingest import format_for_path, parse_trajectories, write_csv, write_json
from .signal import sie, sle
from .styles import StyleReport, classify, smooth_rows
from .synth import KINDS, Scenario, generate, truth_to_dict

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CONFIG = 0, 2, 3, 4

SERIES = ("closeness", "degree", "sle0", "sle1", "sie0", "sie1")


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML or JSON file with parameter overrides")
    p.add_argument("--mu", type=float, help="proximity threshold in metres")
    p.add_argument("--window", type=int, help="smoothing window in frames (odd)")
    p.add_argument("--poly-degree", type=int, dest="poly_degree")
    p.add_argument("--epsilon", type=int, help="sharpness neighbourhood in frames")
    p.add_argument("--zero-tol", type=float, dest="zero_tol")
    p.add_argument("--fps", type=float, help="frame rate in Hz (overrides the input file)")
    p.add_argument("--interval", type=int, nargs=2, metavar=("START", "END"),
                   help="restrict analysis to frames START..END inclusive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmetric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify driving styles in a trajectory file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="report path (default: stdout)")
    _add_config_flags(p)

    p = sub.add_parser("generate", help="write a synthetic scenario and its ground truth")
    p.add_argument("--scenario", required=True, choices=KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int)
    p.add_argument("--fps", type=float)
    p.add_argument("--out", required=True, help="trajectory path (.csv or .json)")
    p.add_argument("--truth", help="ground-truth JSON path")

    p = sub.add_parser("eval", help="time deviation error of a report against ground truth")
    p.add_argument("--report", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--fps", type=float)
    p.add_argument("--out", help="machine-readable JSON result path")

    p = sub.add_parser("export", help="dump one frame graph or one agent's series")
    p.add_argument("--input", required=True)
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--graph", type=int, metavar="FRAME")
    what.add_argument("--series", choices=SERIES)
    p.add_argument("--agent")
    p.add_argument("--out", help="output path (default: stdout)")
    _add_config_flags(p)
    return parser


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path, text: str, stdout) -> None:
    if path is None:
        stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


class _IOFailure(Exception):
    pass


def _resolve(args):
    """Config and dataset for ``analyze``/``export``: defaults < config file < flags."""
    overrides = read_config_file(args.config) if args.config else {}
    flags = {k: getattr(args, k) for k in ("mu", "window", "poly_degree", "epsilon", "zero_tol")}
    overrides.update({k: v for k, v in flags.items() if v is not None})
    if args.interval is not None:
        overrides["interval"] = args.interval
    rate = args.fps if args.fps is not None else overrides.get("frame_rate_hz")
    if rate is not None and not (isinstance(rate, (int, float)) and rate > 0):
        raise ConfigError(f"frame rate must be positive, got {rate!r}")
    config = Config().updated(**overrides)
    ds = parse_trajectories(_read(args.input), format_for_path(args.input), rate)
    return config.updated(frame_rate_hz=ds.frame_rate_hz), ds


def cmd_analyze(args, stdout) -> int:
    config, ds = _resolve(args)
    _write(args.out, classify(ds, config).to_json(), stdout)
    return EXIT_OK


def cmd_generate(args, stdout) -> int:
    extra = {k: v for k, v in (("frames", args.frames), ("frame_rate_hz", args.fps)) if v is not None}
    scenario = Scenario(args.scenario, seed=args.seed, **extra)
    ds, events = generate(scenario)
    text = write_json(ds) if format_for_path(args.out) == "json" else write_csv(ds)
    _write(args.out, text, stdout)
    if args.truth:
        doc = truth_to_dict(events, ds.frame_rate_hz, scenario)
        _write(args.truth, json.dumps(doc, indent=2) + "\n", stdout)
    return EXIT_OK


def cmd_eval(args, stdout) -> int:
    try:
        report = StyleReport.from_dict(json.loads(_read(args.report)))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise _BadInput(f"malformed report {args.report}: {exc}") from None
    truth = AnnotationSet.from_json(_read(args.truth))
    result = compute_tde(report, truth, args.fps)
    stdout.write(result.table())
    stdout.write(f"matching: {result.matching}\n")
    if args.out:
        _write(args.out, result.to_json(), stdout)
    return EXIT_OK


class _BadInput(Exception):
    pass


def cmd_export(args, stdout) -> int:
    config, ds = _resolve(args)
    if args.graph is not None:
        g = build_frame_graph(ds, args.graph, config.mu)
        _write(args.out, json.dumps(g.to_dict(), indent=2) + "\n", stdout)
        return EXIT_OK
    if args.agent is None:
        raise _BadInput("--series requires --agent")
    if args.agent not in ds.agents:
        raise _BadInput(f"agent {args.agent!r} not in {args.input}")
    s = compute_series(ds, config.mu)[args.agent]
    if args.series in ("closeness", "degree"):
        frames, values = s.frames, s.row(0 if args.series == "closeness" else 1)
        if config.interval is not None:
            keep = (frames >= config.interval[0]) & (frames <= config.interval[1])
            frames, values = frames[keep], values[keep]
    else:
        smoothed = smooth_rows(s, config, ds.frame_rate_hz, config.interval)[int(args.series[-1])]
        frames = smoothed.frames
        values = (sle if args.series.startswith("sle") else sie)(smoothed)
    out = io.StringIO()
    out.write("frame,value\n")
    for f, v in zip(frames, values):
        out.write(f"{int(f)},{float(v)!r}\n")
    _write(args.out, out.getvalue(), stdout)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "generate": cmd_generate, "eval": cmd_eval, "export": cmd_export}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, stdout)
    except _IOFailure as exc:
        stderr.write(f"cmetric: {exc}\n")
        return EXIT_IO
    except ConfigError as exc:
        stderr.write(f"cmetric: configuration error: {exc}\n")
        return EXIT_CONFIG
    except (CMetricError, _BadInput) as exc:
        stderr.write(f"cmetric: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
