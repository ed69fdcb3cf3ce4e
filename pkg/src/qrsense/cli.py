"""``qrsense`` command line.

Exit status: 0 on success, 1 on invalid parameters, 2 on I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from . import io
from .experiments import EXPERIMENTS, default_config, run_experiment
from .harmonic import make_schedule
from .sensing import SensingParams, build_sensing_matrix, column_normalize

log = logging.getLogger("qrsense")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def _snr(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise argparse.ArgumentTypeError("SNR must be a number or 'inf'")
    return value


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, not argparse's default status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrsense", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--N", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--k-min", type=int)
        sp.add_argument("--k-max", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--snr-db", type=_snr, help="signal-to-noise ratio in dB, or 'inf'")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)
        sp.add_argument("--workers", type=int, default=1, help="worker processes (output is unaffected)")
        if name == "omp-sweep":
            sp.add_argument("--complex-values", action="store_true",
                            help="draw circular complex Gaussian nonzeros instead of real ones")

    sp = sub.add_parser("export-matrix", help="write the sensing matrix as CSV")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--normalize", action="store_true")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("schedule", help="write the deterministic sampling instants")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f0", type=float, required=True)
    sp.add_argument("--out", required=True)
    return parser


def _run(args) -> None:
    if args.command == "export-matrix":
        a = build_sensing_matrix(SensingParams(args.N, args.p))
        io.write_matrix_csv(column_normalize(a) if args.normalize else a, args.out)
        return
    if args.command == "schedule":
        s = make_schedule(args.N, args.p, args.f0)
        config = (f"N={args.N} p={args.p} f0={args.f0!r} fN={s.fN!r} fS={s.fS!r} "
                  f"dt={s.dt!r} M={s.params.M}")
        rows = [(slot, format(slot * s.dt, ".12g")) for slot in s.slots]
        io.write_table(args.out, config, ["slot", "time_s"], rows)
        return

    config = default_config(
        args.command, N=args.N, p=args.p, k_min=args.k_min, k_max=args.k_max,
        trials=args.trials, snr_db=args.snr_db, seed=args.seed, output_path=args.out,
        complex_values=getattr(args, "complex_values", False) or None)
    if args.workers < 1:
        raise ValueError("workers must be >= 1")
    log.info("running %s", config.header())
    table = run_experiment(config, workers=args.workers)
    io.write_table(args.out, config.header(), table.header, table.rows, table.trailer)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _run(args)
    except OSError as exc:
        print(f"qrsense: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"qrsense: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
