"""Command-line entry point ``unmixio``.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
4 I/O or input-format error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from .connectivity import coherence_squared, envelope_correlation, icoh, lag_zero_correlation
from .core import (
    ConfigError,
    ConvergenceWarning,
    EpochedSeries,
    MatrixParseError,
    NumericalError,
    SeedSpec,
    ensure_dir,
    read_matrix,
    write_matrix,
    write_matrix_csv,
    write_rows_csv,
)
from .generators import (
    STREAM_AMPMOD,
    STREAM_OSCILLATORS,
    STREAM_VAR5,
    AmpModSpec,
    OscillatorSpec,
    apply_mixing,
    gen_ampmod,
    gen_oscillators,
    gen_var5,
    uniform_mixing,
)
from .harness import EXPERIMENTS, StageError, compare_runs, load_config, run_experiment
from .unmixing import innovations_orthogonalize, leakage_correct
from .var_model import fit_var, select_order_aic

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _cmd_gen(args) -> int:
    if args.family == "var5":
        x = gen_var5(args.samples or 25600, SeedSpec(args.seed, STREAM_VAR5))
    elif args.family == "osc":
        spec = OscillatorSpec(n_epochs=args.epochs or 100)
        x = gen_oscillators(spec, SeedSpec(args.seed, STREAM_OSCILLATORS)).concatenated()
    else:
        x, env = gen_ampmod(AmpModSpec(n_samples=args.samples or 25600),
                            SeedSpec(args.seed, STREAM_AMPMOD))
        if args.envelopes:
            write_matrix(env, args.envelopes)
    if args.mix:
        x = apply_mixing(x, uniform_mixing(x.shape[1], args.mix))
    write_matrix(x, args.out)
    return EXIT_OK


def _cmd_fit(args) -> int:
    y = read_matrix(args.input)
    model, _ = fit_var(y, args.order, demean=args.demean)
    out = ensure_dir(args.out)
    for k, a in enumerate(model.coefs, start=1):
        write_matrix_csv(a, os.path.join(out, f"coef_lag{k}.csv"))
    write_matrix_csv(model.sigma, os.path.join(out, "covariance.csv"))
    return EXIT_OK


def _cmd_order(args) -> int:
    y = read_matrix(args.input)
    best, scores = select_order_aic(y, args.max_order, demean=args.demean)
    rows = [[q, float(s)] for q, s in enumerate(scores, start=1)]
    write_rows_csv(["order", "aic"], rows, args.out or sys.stdout)
    print(f"best order: {best}", file=sys.stderr)
    return EXIT_OK


def _cmd_unmix(args) -> int:
    y = read_matrix(args.input)
    res = innovations_orthogonalize(y, args.order, demean=args.demean)
    out = ensure_dir(args.out)
    write_matrix_csv(res.estimated_mixing, os.path.join(out, "mixing.csv"))
    write_matrix(res.unmixed, os.path.join(out, "unmixed.txt"))
    fac = res.factorization
    write_rows_csv(
        ["key", "value"],
        [["order", args.order], ["procrustes_iterations", fac.iterations],
         ["procrustes_converged", int(fac.converged)],
         ["diagonal_deviation", res.diagonal_deviation],
         ["condition_number", res.condition_number]],
        os.path.join(out, "diagnostics.csv"),
    )
    return EXIT_OK


def _cmd_lc(args) -> int:
    y = read_matrix(args.input)
    x_lc, fac = leakage_correct(y)
    out = ensure_dir(args.out)
    write_matrix(x_lc, os.path.join(out, "corrected.txt"))
    write_rows_csv(["channel", "d"], [[i + 1, float(v)] for i, v in enumerate(fac.d)],
                   os.path.join(out, "factorization.csv"))
    write_rows_csv(
        ["key", "value"],
        [["procrustes_iterations", fac.iterations], ["procrustes_converged", int(fac.converged)],
         ["objective", fac.objective]],
        os.path.join(out, "diagnostics.csv"),
    )
    return EXIT_OK


def _cmd_conn(args) -> int:
    y = read_matrix(args.input)
    target = args.out or sys.stdout
    header = ["freq_hz", "from", "to", "value"]
    if args.measure in ("corr0", "envcorr"):
        r = lag_zero_correlation(y) if args.measure == "corr0" else envelope_correlation(y)
        p = r.shape[0]
        rows = [[0.0, j + 1, i + 1, float(r[i, j])] for i in range(p) for j in range(p) if i != j]
        write_rows_csv(header, rows, target)
        return EXIT_OK
    if args.measure == "coh":
        e = EpochedSeries.from_continuous(y, args.epoch_length, args.rate)
        conn = coherence_squared(e, (args.fmin, args.fmax))
    else:
        model, _ = fit_var(y, args.order)
        fmax = min(args.fmax, args.rate / 2)
        freqs = np.arange(args.fmin, fmax + 1e-9, args.fstep)
        conn = icoh(model, freqs, args.rate)
    write_rows_csv(header, conn.rows(), target)
    return EXIT_OK


def _cmd_repro(args) -> int:
    cfg = load_config(
        args.config, experiment=args.experiment, seed=args.seed, out_dir=args.out,
        order=args.order, mix=args.mix, n_samples=args.samples, epochs=args.epochs,
    )
    manifest = run_experiment(cfg)
    for entry in manifest.files:
        print(f"{entry.sha256}  {os.path.join(manifest.root, entry.name)}  ({entry.role})")
    return EXIT_OK


def _cmd_compare(args) -> int:
    report = compare_runs(args.run_a, args.run_b, args.tolerance)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unmixio",
        description="Unmix instantaneous mixtures of time series by innovations orthogonalization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("family", choices=["var5", "osc", "ampmod"])
    g.add_argument("--out", required=True, help="output matrix file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--samples", type=int)
    g.add_argument("--epochs", type=int)
    g.add_argument("--mix", type=float, default=0.0, help="uniform off-diagonal mixing value")
    g.add_argument("--envelopes", help="ampmod only: also write the true envelopes here")
    g.set_defaults(func=_cmd_gen)

    f = sub.add_parser("fit", help="fit a VAR and write coefficients/covariance CSV")
    f.add_argument("input")
    f.add_argument("--order", type=int, required=True)
    f.add_argument("--out", required=True, help="output directory")
    f.add_argument("--demean", action="store_true")
    f.set_defaults(func=_cmd_fit)

    o = sub.add_parser("order", help="AIC score table")
    o.add_argument("input")
    o.add_argument("--max-order", type=int, default=10)
    o.add_argument("--out")
    o.add_argument("--demean", action="store_true")
    o.set_defaults(func=_cmd_order)

    u = sub.add_parser("unmix", help="innovations orthogonalization")
    u.add_argument("input")
    u.add_argument("--order", type=int, default=2)
    u.add_argument("--out", required=True, help="output directory")
    u.add_argument("--demean", action="store_true")
    u.set_defaults(func=_cmd_unmix)

    lc = sub.add_parser("lc", help="leakage correction (signal orthogonalization)")
    lc.add_argument("input")
    lc.add_argument("--out", required=True, help="output directory")
    lc.set_defaults(func=_cmd_lc)

    c = sub.add_parser("conn", help="connectivity measures as freq_hz,from,to,value CSV")
    c.add_argument("input")
    c.add_argument("--measure", choices=["corr0", "coh", "icoh", "envcorr"], required=True)
    c.add_argument("--rate", type=float, default=256.0, help="sampling rate in Hz")
    c.add_argument("--fmin", type=float, default=1.0)
    c.add_argument("--fmax", type=float, default=127.0)
    c.add_argument("--fstep", type=float, default=1.0, help="icoh frequency step")
    c.add_argument("--order", type=int, default=2, help="VAR order for icoh")
    c.add_argument("--epoch-length", type=int, default=256, help="samples per epoch for coh")
    c.add_argument("--out")
    c.set_defaults(func=_cmd_conn)

    r = sub.add_parser("repro", help="reproduce one experiment")
    r.add_argument("experiment", choices=EXPERIMENTS)
    r.add_argument("--config", help="INI file; flags override it")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--order", type=int)
    r.add_argument("--mix", type=float)
    r.add_argument("--samples", type=int)
    r.add_argument("--epochs", type=int)
    r.set_defaults(func=_cmd_repro)

    cmp_ = sub.add_parser("compare", help="compare two experiment runs")
    cmp_.add_argument("run_a", help="manifest.json or run directory")
    cmp_.add_argument("run_b")
    cmp_.add_argument("--tolerance", type=float, default=0.0)
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (MatrixParseError, OSError)):
        return EXIT_IO
    if isinstance(exc, (NumericalError, ArithmeticError, np.linalg.LinAlgError, ConvergenceWarning)):
        return EXIT_NUMERIC
    return EXIT_CONFIG


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", ConvergenceWarning)
            return args.func(args)
    except (ConfigError, MatrixParseError, NumericalError, StageError, OSError,
            ValueError, ArithmeticError, np.linalg.LinAlgError, ConvergenceWarning) as exc:
        print(f"unmixio {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
