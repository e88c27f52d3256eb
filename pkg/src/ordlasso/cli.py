"""Command-line interface: ``ordlasso <subcommand> [options]``.

Subcommands read a numeric CSV with a header row and write JSON (default)
or CSV to ``--output`` or standard output. Exit status is 0 on success,
2 on invalid arguments, 3 on unreadable input and 1 on any other error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from ordlasso import __version__
from ordlasso._io import CsvError, MissingColumnError, column_index, read_numeric_csv
from ordlasso.autoregress import fit_ar_ols_aic, fit_ar_ordered
from ordlasso.glm import fit_logistic_ordered
from ordlasso.modelsel import cross_validate, df_plateaus, lambda_path
from ordlasso.solver import Dataset, FitConfig, center, fit_ordered_lasso
from ordlasso.timelag import BlockFit, LagSpec, build_rolling_design, fit_static

SCHEMA_VERSION = 1

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

_DEFAULT = FitConfig(0.0)


class UsageError(Exception):
    pass


# input

def _load(path, response):
    header, values = read_numeric_csv(path)
    if response is None:
        return values, None, header
    j = column_index(header, response)
    keep = [i for i in range(len(header)) if i != j]
    if not keep:
        raise CsvError(f"{path}: no predictor columns besides the response")
    return values[:, keep], values[:, j], [header[i] for i in keep]


def load_csv(path, response=None):
    """Read a numeric CSV with a header row.

    Parameters
    ----------
    path : str or Path
    response : str or int, optional
        Response column by header name or 0-based index. When given, the
        other columns are the predictors and a (non-centered) Dataset is
        returned; otherwise the full ``rows x columns`` array.

    Raises
    ------
    FileNotFoundError
        The file does not exist.
    ordlasso._io.CsvError
        A row has the wrong field count or a cell is not numeric; the
        message gives the line number.
    ordlasso._io.MissingColumnError
        The response column is not in the header.
    """
    X, y, _ = _load(path, response)
    if y is None:
        return X
    return Dataset(X, y)


def _response_arg(value):
    return int(value) if value.lstrip("-").isdigit() else value


# output

def _split_json(coef):
    return {"plus": coef.plus.tolist(), "minus": coef.minus.tolist(),
            "coef": coef.coef.tolist()}


def fit_result(fit, names=None) -> dict:
    """JSON-ready record of an ordered-lasso or blockwise fit."""
    if isinstance(fit, BlockFit):
        split = fit.split
        extra = {"K": fit.K, "first_lag": fit.first_lag, "iterations": fit.cycles,
                 "monotone_magnitudes": fit.monotone_magnitudes}
    else:
        split = fit.coefficients
        extra = {"iterations": fit.iterations,
                 "monotone_magnitudes": fit.monotone_magnitudes}
    rec = {"schema_version": SCHEMA_VERSION, "lambda": fit.lam,
           "intercept": fit.intercept, "objective": fit.objective,
           "df": df_plateaus(fit).plateau_count, "converged": fit.converged,
           "coefficients": _split_json(split)}
    if names is not None:
        rec["names"] = list(names)
    rec.update(extra)
    return rec


def _emit(args, payload, rows=None):
    """Write ``payload`` as JSON, or ``rows`` (header first) as CSV."""
    if args.format == "csv":
        if rows is None:
            raise UsageError("this subcommand has no CSV form; use --format json")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _coef_rows(records):
    rows = [["lambda", "index", "name", "plus", "minus", "coef"]]
    for rec in records:
        c = rec["coefficients"]
        names = rec.get("names") or [""] * len(c["coef"])
        for i in range(len(c["coef"])):
            rows.append([repr(rec["lambda"]), i, names[i] if i < len(names) else "",
                         repr(c["plus"][i]), repr(c["minus"][i]), repr(c["coef"][i])])
    return rows


def _config(args, lam=0.0, monotone=True):
    return FitConfig(lam, max_iter=args.max_iter, tol=args.tol, theta=args.theta,
                     backtrack_shrink=args.shrink, initial_step=args.initial_step,
                     monotone=monotone)


def _lag_names(names, K, first_lag):
    return [f"{n}[lag {first_lag + k}]" for n in names for k in range(K)]


# subcommands

def cmd_fit(args):
    X, y, names = _load(args.input, args.response)
    data = center(Dataset(X, y))
    cfg = _config(args, monotone=not args.lasso)
    if args.lam is not None:
        recs = [fit_result(fit_ordered_lasso(data, cfg.with_lam(args.lam)), names)]
        payload = recs[0]
    else:
        path = lambda_path(data, args.n_lambdas, cfg)
        recs = [fit_result(f, names) for f in path.fits]
        payload = {"schema_version": SCHEMA_VERSION, "path": recs}
    _emit(args, payload, _coef_rows(recs))


def _lagged_data(args):
    K = args.max_lag
    if args.mode == "rolling":
        series, y, names = _load(args.input, args.response)
        design, yy = build_rolling_design(series, LagSpec(series.shape[1], K,
                                                          args.first_lag), y)
        return center(Dataset(design.Z, yy)), _lag_names(names, K, args.first_lag)
    X, y, names = _load(args.input, args.response)
    if X.shape[1] % K:
        raise UsageError(f"{X.shape[1]} predictor columns is not a multiple of "
                         f"--max-lag {K}")
    return center(Dataset(X, y)), names


def cmd_fit_lagged(args):
    data, names = _lagged_data(args)
    cfg = _config(args, monotone=not args.lasso)
    K = args.max_lag
    if args.lam is not None:
        fit = fit_static(data, K, cfg.with_lam(args.lam), first_lag=args.first_lag)
        recs = [fit_result(fit, names)]
        payload = recs[0]
    else:
        path = lambda_path(data, args.n_lambdas, cfg, K=K, first_lag=args.first_lag)
        recs = [fit_result(f, names) for f in path.fits]
        payload = {"schema_version": SCHEMA_VERSION, "path": recs}
    _emit(args, payload, _coef_rows(recs))


def cmd_fit_ar(args):
    table, _, header = _load(args.input, None)
    x = table[:, column_index(header, args.column)]
    if args.cv_folds != 2:
        raise UsageError("only --cv-folds 2 (training and validation halves) "
                         "is supported for autoregression")
    if args.method == "ols-aic":
        fit = fit_ar_ols_aic(x, args.max_lag)
    else:
        fit = fit_ar_ordered(x, args.max_lag, _config(args),
                             n_lambdas=args.n_lambdas,
                             monotone=args.method == "ordered-lasso",
                             rule=args.rule)
    payload = {"schema_version": SCHEMA_VERSION, "method": fit.method,
               "max_lag": fit.K, "selected_order": fit.selected_order,
               "lambda": fit.lam, "intercept": fit.intercept,
               "validation_error": None if np.isnan(fit.validation_error)
               else fit.validation_error,
               "coefficients": fit.coefficients.tolist()}
    rows = [["lag", "coef"]] + [[k + 1, repr(float(c))]
                                for k, c in enumerate(fit.coefficients)]
    _emit(args, payload, rows)


def cmd_fit_logistic(args):
    X, y, names = _load(args.input, args.response)
    fit = fit_logistic_ordered(X, y, _config(args, args.lam), K=args.max_lag)
    payload = {"schema_version": SCHEMA_VERSION, "lambda": fit.lam,
               "intercept": fit.intercept, "objective": fit.objective,
               "loglik": fit.loglik, "df": df_plateaus(fit.coef).plateau_count,
               "iterations": fit.iterations, "converged": fit.converged,
               "monotone_magnitudes": fit.monotone_magnitudes,
               "names": names, "coefficients": _split_json(fit.coefficients)}
    _emit(args, payload, _coef_rows([payload]))


def cmd_cv(args):
    X, y, names = _load(args.input, args.response)
    res = cross_validate(X, y, args.folds, _config(args, monotone=not args.lasso),
                         n_lambdas=args.n_lambdas, K=args.max_lag,
                         contiguous=not args.shuffle, seed=args.seed,
                         rule=args.rule)
    payload = {"schema_version": SCHEMA_VERSION, "folds": args.folds,
               "rule": args.rule, "best_index": res.best_index,
               "best_lambda": res.best_lambda, "lambdas": res.lambdas.tolist(),
               "cv_error": res.cv_error.tolist(),
               "fold_errors": res.fold_errors.tolist()}
    rows = [["lambda", "cv_error"] + [f"fold{k}" for k in range(args.folds)]]
    for i, lam in enumerate(res.lambdas):
        rows.append([repr(float(lam)), repr(float(res.cv_error[i]))]
                    + [repr(float(e)) for e in res.fold_errors[:, i]])
    _emit(args, payload, rows)


def cmd_df(args):
    X, y, _ = _load(args.input, args.response)
    data = center(Dataset(X, y))
    cfg = _config(args, args.lam)
    fit = (fit_ordered_lasso(data, cfg) if args.max_lag is None
           else fit_static(data, args.max_lag, cfg))
    est = df_plateaus(fit)
    payload = {"schema_version": SCHEMA_VERSION, "lambda": est.lam,
               "df": est.plateau_count, "per_block": est.per_block,
               "nonzero": est.nonzero_count}
    _emit(args, payload, [["lambda", "df", "nonzero"],
                          [repr(est.lam), est.plateau_count, est.nonzero_count]])


def cmd_simulate(args):
    from ordlasso import experiments as ex

    if args.design in ("ozone", "sunspot"):
        runner = ex.run_ozone if args.design == "ozone" else ex.run_sunspot
        result = runner(args.input)
    else:
        spec = ex.SimulationSpec(args.design, args.seed, args.replicates)
        kwargs = {} if args.design == "fig1" else {"n_jobs": args.jobs}
        result = ex.run(spec, **kwargs)
    if args.table:
        result.write_csv(args.table)
    if args.format == "csv":
        rows = [list(ex.CSV_FIELDS)] + [
            [r["experiment"], r["method"], r["replicate"],
             "" if r["lam"] is None else repr(r["lam"]), r["metric"],
             repr(r["value"])] for r in result.rows]
        _emit(args, None, rows)
    else:
        _emit(args, result.summary_json())


# parser

def _add_common(p, response=True):
    p.add_argument("--input", "-i", required=True, help="numeric CSV with header")
    if response:
        p.add_argument("--response", "-r", type=_response_arg, default=-1,
                       help="response column name or 0-based index (default: last)")
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_solver(p, lam_required=False):
    p.add_argument("--lambda", dest="lam", type=float, required=lam_required,
                   help="penalty; omit to fit a path" if not lam_required else "penalty")
    p.add_argument("--n-lambdas", type=int, default=100)
    p.add_argument("--theta", type=float, default=None,
                   help="near-isotonic penalty (default: hard constraint)")
    p.add_argument("--max-iter", type=int, default=_DEFAULT.max_iter)
    p.add_argument("--tol", type=float, default=_DEFAULT.tol)
    p.add_argument("--shrink", type=float, default=_DEFAULT.backtrack_shrink,
                   help="backtracking shrink factor")
    p.add_argument("--initial-step", type=float, default=_DEFAULT.initial_step)


def _positive_int(value):
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="ordlasso",
                                     description="Ordered lasso fitting and experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="ordered lasso on a design matrix")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--lasso", action="store_true", help="drop the order constraint")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fit-lagged", help="time-lagged ordered lasso")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--max-lag", "-K", type=_positive_int, required=True)
    p.add_argument("--first-lag", type=int, default=1)
    p.add_argument("--mode", choices=("rolling", "static"), default="rolling",
                   help="rolling: columns are raw series; static: columns are "
                        "already K lags per predictor")
    p.add_argument("--lasso", action="store_true")
    p.set_defaults(func=cmd_fit_lagged)

    p = sub.add_parser("fit-ar", help="autoregressive order selection")
    _add_common(p, response=False)
    _add_solver(p)
    p.add_argument("--column", "-c", type=_response_arg, default=-1,
                   help="series column name or index (default: last)")
    p.add_argument("--max-lag", "-K", type=_positive_int, required=True)
    p.add_argument("--cv-folds", type=int, default=2)
    p.add_argument("--method", choices=("ordered-lasso", "lasso", "ols-aic"),
                   default="ordered-lasso")
    p.add_argument("--rule", choices=("1se", "min"), default="1se")
    p.set_defaults(func=cmd_fit_ar)

    p = sub.add_parser("fit-logistic", help="logistic ordered lasso (0/1 response)")
    _add_common(p)
    _add_solver(p, lam_required=True)
    p.add_argument("--max-lag", "-K", type=_positive_int, default=None,
                   help="columns form blocks of this many lags")
    p.set_defaults(func=cmd_fit_logistic)

    p = sub.add_parser("cv", help="cross-validated lambda selection")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--folds", type=int, default=2)
    p.add_argument("--max-lag", "-K", type=_positive_int, default=None)
    p.add_argument("--shuffle", action="store_true",
                   help="random folds instead of contiguous segments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", choices=("min", "1se"), default="min")
    p.add_argument("--lasso", action="store_true")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("df", help="plateau-count degrees of freedom at one lambda")
    _add_common(p)
    _add_solver(p, lam_required=True)
    p.add_argument("--max-lag", "-K", type=_positive_int, default=None)
    p.set_defaults(func=cmd_df)

    p = sub.add_parser("simulate", help="run a simulation or data experiment")
    p.add_argument("--design", required=True,
                   choices=("fig1", "fig2", "fig3", "fig3-scrambled", "table1",
                            "ozone", "sunspot"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=_positive_int, default=None)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--input", "-i", default=None,
                   help="data CSV for ozone/sunspot (default: bundled copy)")
    p.add_argument("--table", help="also write the long-format CSV here")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    prefix = f"ordlasso {args.command}: error:"
    try:
        args.func(args)
    except UsageError as exc:
        print(f"{prefix} {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"{prefix} input file not found: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CsvError as exc:
        print(f"{prefix} unparseable input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MissingColumnError as exc:
        print(f"{prefix} missing column: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"{prefix} {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
