"""Command line entry point: ``gevlc verify|run|inspect|gen-config``.

Exit status is 0 when every assertion passes, 1 when one fails and 2 for
usage, configuration or file-format errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..fourier_grid import inverse_transform
from ..snapshot import SnapshotFormatError, read_snapshot
from .config import ConfigError, load_config, render_config
from .report import write_report
from .suites import RUN_SUITES, VERIFY_SUITES, run_gevrey_tracking

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file overriding the defaults")
    p.add_argument("--seed", type=int, help="override initial_data.seed")
    p.add_argument("--out", help="output directory (default: $GEVLC_OUT or ./gevlc-out)")
    p.add_argument("--json", action="store_true", help="print the report JSON instead of the summary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gevlc", description="Gevrey regularity experiments for a simplified nematic liquid-crystal flow.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    v = sub.add_parser("verify", help="numerical checks of the analytic toolkit")
    v.add_argument("suite", choices=sorted(VERIFY_SUITES) + ["all"])
    _common(v)
    r = sub.add_parser("run", help="solver experiments")
    r.add_argument("experiment", choices=sorted(RUN_SUITES))
    _common(r)
    i = sub.add_parser("inspect", help="summarise a GVLC snapshot file")
    i.add_argument("snapshot")
    i.add_argument("--box-length", type=float, default=2 * np.pi)
    g = sub.add_parser("gen-config", help="print the default configuration")
    g.add_argument("--config", help="render this file after validation instead of the defaults")
    return parser


def _config(args):
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "out", None):
        cfg = cfg.with_output(args.out)
    return cfg


def _emit(reports, cfg, as_json: bool) -> int:
    out = cfg.output.resolved_dir()
    for rep in reports:
        write_report(rep, out, cfg.output.csv)
        if as_json:
            sys.stdout.write(rep.to_json())
        else:
            print("\n".join(rep.summary_lines()))
    ok = all(rep.passed for rep in reports)
    if not as_json:
        print(f"{'PASS' if ok else 'FAIL'}: reports in {out}")
    return EXIT_OK if ok else EXIT_FAIL


def _inspect(path: str, box_length: float) -> int:
    try:
        f = read_snapshot(path, box_length)
    except (OSError, SnapshotFormatError) as exc:
        print(f"gevlc: cannot read snapshot: {exc}", file=sys.stderr)
        return EXIT_USAGE
    phys = inverse_transform(f)
    info = {
        "dim": f.spec.dim,
        "n": f.spec.n,
        "components": f.components,
        "real": f.real,
        "max_abs_coefficient": float(np.abs(f.coeffs).max()),
        "max_abs_value": float(np.abs(phys).max()),
    }
    print(json.dumps(info, indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "gen-config":
            sys.stdout.write(render_config(load_config(args.config)))
            return EXIT_OK
        if args.command == "inspect":
            return _inspect(args.snapshot, args.box_length)
        cfg = _config(args)
        if args.command == "verify":
            names = sorted(VERIFY_SUITES) if args.suite == "all" else [args.suite]
            reports = [VERIFY_SUITES[n](cfg) for n in names]
        elif args.experiment == "gevrey" and cfg.output.snapshots:
            reports = [run_gevrey_tracking(cfg, cfg.output.resolved_dir() / "snapshots")]
        else:
            reports = [RUN_SUITES[args.experiment](cfg)]
    except ConfigError as exc:
        print(f"gevlc: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return _emit(reports, cfg, args.json)


if __name__ == "__main__":
    raise SystemExit(main())
