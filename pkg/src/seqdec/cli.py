"""Command-line front end.

Subcommands: bound-gda, bound-mlsda, simulate-gda, simulate-mlsda,
atilde, dstar, validate.  Exit codes: 0 success, 1 validation failure,
2 configuration error.
"""

import argparse
import contextlib
import json
import sys

from seqdec import harness
from seqdec.codes import BlockCode, ConvCode
from seqdec.harness import ConfigError, ExperimentConfig
from seqdec.trellis import build_trellis


def _parse_snr(text: str) -> tuple:
    """start:stop:step (inclusive stop, dB) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            grid = []
            v = start
            while v <= stop + 1e-9:
                grid.append(round(v, 10))
                v += step
            return tuple(grid)
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --snr {text!r}: {exc}") from exc


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _experiment_config(args, kind: str, mode: str) -> ExperimentConfig:
    raw = _load_config(args.config) if args.config else {}
    code = raw.get("code")
    if args.code_name:
        code = {"name": args.code_name}
    if code is None:
        raise ConfigError("no code given (use --config or --code)")
    snr = raw.get("snr_db")
    if args.snr:
        snr = _parse_snr(args.snr)
    if snr is None:
        raise ConfigError("no SNR grid given (use --config or --snr)")
    cfg = ExperimentConfig(
        code=code,
        snr_db=tuple(snr),
        trials=args.trials if args.trials is not None else raw.get("trials", 10_000),
        seed=args.seed if args.seed is not None else raw.get("seed", 1),
        variant=args.variant or raw.get("variant", "both"),
        mode=mode,
        workers=args.workers if args.workers is not None else raw.get("workers", 1),
        all_zero=args.all_zero or raw.get("all_zero", False),
        L=args.length if args.length is not None else raw.get("L"),
        extension_limit=(args.extension_limit if args.extension_limit is not None
                         else raw.get("extension_limit")),
    )
    target = harness.code_from_config(cfg.code)
    if kind == "gda" and not isinstance(target, BlockCode):
        raise ConfigError("this subcommand expects a block code")
    if kind == "mlsda":
        if not isinstance(target, ConvCode):
            raise ConfigError("this subcommand expects a convolutional code")
        if not cfg.L:
            raise ConfigError("convolutional experiments need L (use --length)")
    return cfg


@contextlib.contextmanager
def _open_out(args):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _add_common(p: argparse.ArgumentParser, simulate: bool):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--code", dest="code_name", help="named code (golay24, qr48)")
    p.add_argument("--snr", help="gamma_b grid in dB: start:stop:step or list")
    p.add_argument("--variant", choices=["be", "chernoff", "both"])
    p.add_argument("--length", "-L", type=int, help="information length (conv codes)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--seed", type=int)
    if simulate:
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--all-zero", action="store_true",
                       help="transmit the all-zero codeword instead of random data")
        p.add_argument("--extension-limit", type=int,
                       help="per-trial search budget; overflowing trials are excluded")
    else:
        p.set_defaults(trials=None, workers=None, all_zero=False, extension_limit=None)


def _cmd_curve(args, kind: str, mode: str) -> int:
    cfg = _experiment_config(args, kind, mode)
    points = harness.run_experiment(cfg)
    overflow = sum(p.overflow_trials for p in points)
    with _open_out(args) as out:
        harness.write_curve_csv(points, out)
    if overflow:
        print(f"note: {overflow} trial(s) exceeded the extension budget "
              "and were excluded", file=sys.stderr)
    return 0


def _cmd_atilde(args) -> int:
    raw = _load_config(args.config) if args.config else {}
    d_over_n = args.ratio
    gamma_db = args.gamma_db
    curves = raw.get("curves", [])
    if d_over_n is None and gamma_db is None and len(curves) == 1:
        d_over_n = curves[0].get("d_over_n")
        gamma_db = curves[0].get("gamma_db")
    elif curves and (d_over_n is None or gamma_db is None):
        # multi-curve recipe: the flags select one curve
        for c in curves:
            if ((d_over_n is None or c.get("d_over_n") == d_over_n)
                    and (gamma_db is None or c.get("gamma_db") == gamma_db)):
                d_over_n, gamma_db = c["d_over_n"], c["gamma_db"]
                break
    if d_over_n is None:
        d_over_n = raw.get("d_over_n")
    if gamma_db is None:
        gamma_db = raw.get("gamma_db")
    if d_over_n is None or gamma_db is None:
        raise ConfigError("atilde needs --ratio and --gamma-db (or a config curve)")
    n_grid = raw.get("n_grid")
    if args.n_grid:
        n_grid = [int(v) for v in args.n_grid.split(",")]
    if n_grid is None:
        n_grid = list(range(40, 401, 10))
    rows = harness.run_atilde_table(float(d_over_n), float(gamma_db), n_grid)
    with _open_out(args) as out:
        harness.write_atilde_csv(rows, out)
    return 0


def _cmd_dstar(args) -> int:
    raw = _load_config(args.config) if args.config else {}
    code_spec = raw.get("code")
    if args.octal:
        code_spec = {"type": "conv", "m": args.memory, "octal": args.octal.split(",")}
    if code_spec is None:
        raise ConfigError("dstar needs --octal/--memory or a config with a conv code")
    code = harness.code_from_config(code_spec)
    if not isinstance(code, ConvCode):
        raise ConfigError("dstar expects a convolutional code")
    L = args.length if args.length is not None else raw.get("L")
    if not L:
        raise ConfigError("dstar needs L (use --length)")
    trellis = build_trellis(code, int(L))
    with _open_out(args) as out:
        harness.write_dstar_csv(trellis, out)
    return 0


def _cmd_validate(args) -> int:
    results = harness.run_validation_suite()
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {r.detail}")
        failed += not r.passed
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqdec",
        description="Sequential ML decoding complexity: simulation and bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, kind, mode, simulate in (
            ("bound-gda", "gda", "bound", False),
            ("bound-mlsda", "mlsda", "bound", False),
            ("simulate-gda", "gda", "simulate", True),
            ("simulate-mlsda", "mlsda", "simulate", True)):
        p = sub.add_parser(name, help=f"{mode} curve ({kind})")
        _add_common(p, simulate)
        p.set_defaults(func=lambda a, k=kind, m=mode: _cmd_curve(a, k, m))

    p = sub.add_parser("atilde", help="subexponential prefactor vs sample count")
    p.add_argument("--config")
    p.add_argument("--ratio", type=float, help="d/n")
    p.add_argument("--gamma-db", type=float, help="SNR gamma in dB")
    p.add_argument("--n-grid", help="comma-separated sample counts")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_atilde)

    p = sub.add_parser("dstar", help="dump minimum path weight table as CSV")
    p.add_argument("--config")
    p.add_argument("--octal", help="comma-separated octal generators")
    p.add_argument("--memory", "-m", type=int, help="encoder memory order")
    p.add_argument("--length", "-L", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dstar)

    p = sub.add_parser("validate", help="run the cross-module validation suite")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
