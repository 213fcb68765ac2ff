"""Command-line front end: ``diamondmirror <scenario> [options]``.

Exit codes: 0 success, 1 configuration error, 2 finished with failed grid
points (written as NaN), 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .sweeps import SCENARIOS, ConfigError, build_config, load_config, run_sweep, to_csv

log = logging.getLogger("diamondmirror")

EXIT_OK, EXIT_CONFIG, EXIT_FAILURES, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_common(p):
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--tol", type=float, help="absolute EoF tolerance")
    p.add_argument("--rel-tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--method", choices=("auto", "double", "kg", "fast"),
                   help="overlap evaluation path")
    p.add_argument("--gate", type=float, help="same-side detector commutator gate")
    p.add_argument("--k0-over-a", type=_csv_list, help="detector centre frequency (list ok)")
    p.add_argument("--sigma-over-a", help="detector bandwidth")
    p.add_argument("--omega0-over-a", type=_csv_list, help="diamond packet frequency")
    p.add_argument("--delta-over-a", type=_csv_list, help="diamond packet bandwidth (list ok)")
    p.add_argument("--theta", help="beamsplitter angle, e.g. 1.57 or pi/2")
    p.add_argument("--phi", type=_csv_list, help="mirror phase (list ok, e.g. 0,pi/2)")
    p.add_argument("--fixed-center", help="position of the fixed detector")
    for name in ("omega0", "center", "sigma", "k0"):
        p.add_argument(f"--{name}-grid", nargs=3, metavar=("MIN", "MAX", "N"),
                       help=f"{name} grid")
    p.add_argument("-v", "--verbose", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diamondmirror", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    helps = {
        "particle-map": "particle number vs omega0 and detector centre",
        "eof-map-lr": "EoF between a fixed left mover and a scanning right mover",
        "eof-map-ll": "EoF between a fixed left mover and a scanning left mover",
        "eof-bipartite": "EoF and EPR product of co-centred left/right detectors vs sigma",
        "energy-decay": "detected energy k0*N vs k0 with power-law slopes",
    }
    for name in SCENARIOS:
        _add_common(sub.add_parser(name, help=helps[name]))
    return parser


_OVERRIDES = ("out", "workers", "tol", "rel_tol", "method", "gate", "k0_over_a",
              "sigma_over_a", "omega0_over_a", "delta_over_a", "theta", "phi", "fixed_center")


def _overrides(args) -> dict:
    over = {k: getattr(args, k) for k in _OVERRIDES if getattr(args, k) is not None}
    for name in ("omega0", "center", "sigma", "k0"):
        val = getattr(args, f"{name}_grid")
        if val is not None:
            try:
                over[f"{name}_grid"] = {"min": float(val[0]), "max": float(val[1]),
                                        "n": int(val[2]), "log": name == "k0"}
            except ValueError as exc:
                raise ConfigError(f"--{name}-grid: {exc}") from None
    return over


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        over = _overrides(args)
        if args.config:
            cfg = load_config(args.config, over, scenario=args.scenario)
        else:
            cfg = build_config(args.scenario, over)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        res = run_sweep(cfg, progress=lambda i, n: log.info("line %d/%d done", i, n))
        text = to_csv(cfg, res, __version__)
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception:  # noqa: BLE001 - anything here is a bug or an I/O problem
        log.exception("internal error")
        return EXIT_INTERNAL

    for k, v in res.summary.items():
        print(f"{k}: {v:.4f}", file=sys.stderr)
    if res.failures:
        log.warning("%d grid point(s) failed and were written as NaN", res.failures)
        return EXIT_FAILURES
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
