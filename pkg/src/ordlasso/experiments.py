"""Seeded simulations and data analyses with tabular output.

Every runner returns an :class:`ExperimentResult` holding long-format rows
``(experiment, method, replicate, lam, metric, value)`` and a summary dict;
both can be written with :meth:`ExperimentResult.write`. Replicate ``r`` of
a run with seed ``s`` always draws from ``SeedSequence(s).spawn(n)[r]``, so
results do not depend on ``n_jobs``.

Coefficient error is the sum of squared errors over all coefficients,
``sum_jk (b_hat_jk - b_jk)^2``.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ordlasso._io import CsvError, MissingColumnError, read_numeric_csv
from ordlasso.autoregress import (TABLE1_MAX_LAG, fit_ar_ols_aic, fit_ar_ordered,
                                  simulate_table1)
from ordlasso.modelsel import df_plateaus, holdout_select, lambda_path
from ordlasso.solver import Dataset, FitConfig, center
from ordlasso.timelag import LagSpec, build_rolling_design, effective_lags

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_FIELDS = ("experiment", "method", "replicate", "lam", "metric", "value")

FIG1_BETA = np.r_[np.arange(10, 0, -1), np.zeros(10)].astype(float)
FIG1_N = 30
FIG1_SIGMA = 7.0

FIG2_BLOCKS = np.array([[7, 5, 4, 2, 0],
                        [5, 3, 0, 0, 0],
                        [3, 0, 0, 0, 0],
                        [0, 0, 0, 0, 0]], dtype=float)
FIG2_N = 111
FIG2_SIGMA = 7.0

FIG3_K = 20
FIG3_N = 111
FIG3_SIGMA = 7.0

OZONE_FEATURES = ("vh", "wind", "humidity", "temp", "ibh", "dpg", "ibt", "vis")
OZONE_RESPONSE = "O3"
OZONE_MAX_LAG = 20

DESIGNS = ("fig1", "fig2", "fig3", "fig3-scrambled", "table1")


def equally_spaced(a, b, L):
    """The length-``L`` equally spaced sequence from ``a`` to ``b``."""
    return np.linspace(a, b, L)


def fig3_blocks():
    f = equally_spaced
    return np.vstack([f(5, 1, 20),
                      np.r_[f(5, 1, 10), f(0, 0, 10)],
                      np.r_[f(5, 1, 5), f(0, 0, 15)],
                      f(0, 0, 20)])


@dataclass(frozen=True)
class SimulationSpec:
    design: str
    seed: int = 0
    n_replicates: int | None = None
    noise_sd: float | None = None

    _DEFAULTS = {"fig1": (20, FIG1_SIGMA), "fig2": (20, FIG2_SIGMA),
                 "fig3": (30, FIG3_SIGMA), "fig3-scrambled": (30, FIG3_SIGMA),
                 "table1": (100, 4.0)}

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ValueError(f"unknown design {self.design!r}; choose from {DESIGNS}")
        reps, sd = self._DEFAULTS[self.design]
        if self.n_replicates is None:
            object.__setattr__(self, "n_replicates", reps)
        if self.noise_sd is None:
            object.__setattr__(self, "noise_sd", sd)
        if self.n_replicates < 1:
            raise ValueError("n_replicates must be at least 1")
        if self.noise_sd != sd:
            raise ValueError(f"design {self.design} has noise sd {sd}")


@dataclass
class ExperimentResult:
    experiment: str
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, method, replicate, lam, metric, value):
        self.rows.append({"experiment": self.experiment, "method": method,
                          "replicate": replicate,
                          "lam": None if lam is None else float(lam),
                          "metric": metric, "value": float(value)})

    def select(self, method=None, metric=None):
        return [r for r in self.rows
                if (method is None or r["method"] == method)
                and (metric is None or r["metric"] == metric)]

    def write_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            w.writeheader()
            for r in self.rows:
                w.writerow({**r, "lam": "" if r["lam"] is None else repr(r["lam"]),
                            "value": repr(r["value"])})

    def summary_json(self):
        return {"schema_version": SCHEMA_VERSION, "experiment": self.experiment,
                **_jsonable(self.summary)}

    def write(self, csv_path=None, json_path=None):
        if csv_path is not None:
            self.write_csv(csv_path)
        if json_path is not None:
            Path(json_path).write_text(json.dumps(self.summary_json(), indent=2))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def coef_error(estimate, truth):
    """Sum of squared coefficient errors."""
    d = np.asarray(estimate, dtype=float) - np.asarray(truth, dtype=float)
    return float(np.sum(d * d))


def oracle_select(path, truth):
    """Index and error of the path fit closest to the true coefficients."""
    errs = np.array([coef_error(c, np.ravel(truth)) for c in path.coefs()])
    best = int(np.argmin(errs))
    return best, float(errs[best]), errs


def _mean_se(values):
    a = np.asarray(values, dtype=float)
    se = a.std(ddof=1) / np.sqrt(a.size) if a.size > 1 else float("nan")
    return float(a.mean()), float(se)


def _map(fn, args, n_jobs):
    if n_jobs == 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, *zip(*args)))


METHODS = (("ordered-lasso", True), ("lasso", False))


# Figure 1: one block, cross-sectional

def fig1_data(rng):
    X = rng.standard_normal((FIG1_N, FIG1_BETA.size))
    y = X @ FIG1_BETA + FIG1_SIGMA * rng.standard_normal(FIG1_N)
    assert X.shape == (30, 20)
    return X, y


def run_fig1(seed=0, n_lambdas=50) -> ExperimentResult:
    """Coefficient paths of both methods on one Figure 1 draw.

    Rows carry one ``coef[j]`` metric per coefficient per lambda plus the
    oracle error; ``summary["paths"]`` holds ``n_lambdas`` coefficient rows
    per method.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    X, y = fig1_data(rng)
    data = center(Dataset(X, y))
    res = ExperimentResult("fig1")
    res.summary = {"seed": seed, "truth": FIG1_BETA, "paths": {}, "best": {}}
    for method, mono in METHODS:
        path = lambda_path(data, n_lambdas, FitConfig(0.0, monotone=mono))
        best, err, errs = oracle_select(path, FIG1_BETA)
        coefs = path.coefs()
        for lam, c, e in zip(path.lambdas, coefs, errs):
            for j, v in enumerate(c):
                res.add(method, 0, lam, f"coef[{j}]", v)
            res.add(method, 0, lam, "coef_error", e)
        res.summary["paths"][method] = {
            "lambdas": path.lambdas, "coefs": coefs,
            "feasible": all(f.coefficients.is_feasible() for f in path.fits)}
        res.summary["best"][method] = {
            "lam": float(path.lambdas[best]), "coef_error": err,
            "l2_distance": float(np.sqrt(err)), "coef": coefs[best]}
    return res


# Figures 2 and 3: rolling time-lagged regression

def lagged_data(rng, blocks, n_rows, sigma):
    """Rolling design with ``n_rows`` usable rows from i.i.d. N(0,1) series."""
    p, K = blocks.shape
    x = rng.standard_normal((n_rows + K, p))
    design, _ = build_rolling_design(x, LagSpec(p, K))
    assert design.Z.shape == (n_rows, p * K)
    y = design.Z @ blocks.ravel() + sigma * rng.standard_normal(n_rows)
    return design, y


def _lagged_replicate(seed_seq, blocks, n_rows, sigma, n_lambdas, scrambled):
    rng = np.random.default_rng(seed_seq)
    truth = blocks
    if scrambled:
        truth = rng.permutation(blocks.ravel()).reshape(blocks.shape)
    design, y = lagged_data(rng, truth, n_rows, sigma)
    data = center(Dataset(design.Z, y))
    out = {}
    for method, mono in METHODS:
        path = lambda_path(data, n_lambdas, FitConfig(0.0, monotone=mono),
                           K=design.K)
        best, err, _ = oracle_select(path, truth)
        out[method] = (float(path.lambdas[best]), err, path.fits[best].coef)
    return out


def _run_lagged(name, blocks, n_rows, sigma, n_replicates, seed, n_lambdas,
                n_jobs, scrambled=False):
    seeds = np.random.SeedSequence(seed).spawn(n_replicates)
    args = [(s, blocks, n_rows, sigma, n_lambdas, scrambled) for s in seeds]
    reps = _map(_lagged_replicate, args, n_jobs)
    res = ExperimentResult(name)
    summary = {"seed": seed, "n_replicates": n_replicates, "n_rows": n_rows,
               "K": blocks.shape[1], "noise_sd": sigma, "scrambled": scrambled,
               "coef_error": "sum of squared coefficient errors"}
    for method, _ in METHODS:
        errs = []
        for r, rep in enumerate(reps):
            lam, err, coef = rep[method]
            res.add(method, r, lam, "coef_error", err)
            for j, lag in enumerate(effective_lags(coef)):
                res.add(method, r, lam, f"effective_lag[{j}]", lag)
            errs.append(err)
        mean, se = _mean_se(errs)
        summary[method] = {"mean_coef_error": mean, "se": se,
                           "mean_estimate": np.mean([rep[method][2] for rep in reps],
                                                    axis=0)}
    summary["truth"] = blocks
    res.summary = summary
    return res


def run_fig2(n_replicates=20, seed=0, *, n_lambdas=100, n_jobs=1) -> ExperimentResult:
    """Four predictors, K=5, 111 rows, noise sd 7; oracle-lambda error per
    replicate and its mean and standard error per method."""
    return _run_lagged("fig2", FIG2_BLOCKS, FIG2_N, FIG2_SIGMA, n_replicates,
                       seed, n_lambdas, n_jobs)


def run_fig3(n_replicates=30, seed=0, scrambled=False, *, n_rows=FIG3_N,
             n_lambdas=50, n_jobs=1) -> ExperimentResult:
    """K=20 truths built from equally spaced sequences.

    With ``scrambled`` all 80 true coefficients are jointly permuted afresh
    in every replicate, which keeps the signal size but breaks monotonicity.
    """
    name = "fig3-scrambled" if scrambled else "fig3"
    return _run_lagged(name, fig3_blocks(), n_rows, FIG3_SIGMA, n_replicates,
                       seed, n_lambdas, n_jobs, scrambled)


# Table 1 and the sunspot series

def run_table1(n_replicates=100, seed=0, *, n_lambdas=50, n_jobs=1) -> ExperimentResult:
    hist = simulate_table1(n_replicates, seed, K=TABLE1_MAX_LAG,
                           n_lambdas=n_lambdas, n_jobs=n_jobs)
    res = ExperimentResult("table1")
    for col, method in enumerate(("ols-aic", "ordered-lasso")):
        for r, order in enumerate(hist["orders"][:, col]):
            res.add(method, r, None, "selected_order", order)
    res.summary = {"seed": seed, "n_replicates": n_replicates,
                   "histogram": {m: hist[m] for m in ("ols-aic", "ordered-lasso")}}
    return res


def _data_file(name):
    return resources.files("ordlasso") / "data" / name


def _load_table(path, default, required, min_rows):
    src = Path(path) if path is not None else _data_file(default)
    schema = ", ".join(required)
    try:
        header, values = read_numeric_csv(src)
    except FileNotFoundError:
        raise FileNotFoundError(f"{src} not found; expected a CSV with header "
                                f"columns {schema}") from None
    cols = {}
    for name in required:
        if name not in header:
            raise MissingColumnError(f"{src}: column {name!r} missing; expected "
                                     f"header columns {schema}")
        cols[name] = values[:, header.index(name)]
    if values.shape[0] < min_rows:
        raise CsvError(f"{src}: {values.shape[0]} rows, need at least {min_rows}")
    return cols


def load_sunspot(path=None):
    """``(years, counts)`` of the yearly sunspot series (bundled by default)."""
    cols = _load_table(path, "sunspot_year.csv", ("year", "count"), 42)
    return cols["year"], cols["count"]


def load_ozone(path=None):
    """``(features, response)`` from the Los Angeles ozone table.

    ``features`` is ``N x 8`` in the order of ``OZONE_FEATURES``; the
    response is the raw ozone level ``O3``.
    """
    cols = _load_table(path, "la_ozone.csv", OZONE_FEATURES + (OZONE_RESPONSE,),
                       2 * OZONE_MAX_LAG + 2)
    X = np.column_stack([cols[f] for f in OZONE_FEATURES])
    return X, cols[OZONE_RESPONSE]


def run_sunspot(path=None, K=20, *, n_lambdas=100) -> ExperimentResult:
    """AR order selection on the sunspot series by both methods."""
    years, x = load_sunspot(path)
    fits = {"ordered-lasso": fit_ar_ordered(x, K, n_lambdas=n_lambdas),
            "lasso": fit_ar_ordered(x, K, n_lambdas=n_lambdas, monotone=False),
            "ols-aic": fit_ar_ols_aic(x, K)}
    res = ExperimentResult("sunspot")
    res.summary = {"K": K, "n": x.size, "years": [years[0], years[-1]]}
    for method, fit in fits.items():
        res.add(method, 0, fit.lam, "selected_order", fit.selected_order)
        for k, c in enumerate(fit.coefficients, start=1):
            res.add(method, 0, fit.lam, f"coef[lag {k}]", c)
        res.summary[method] = {"selected_order": fit.selected_order,
                               "lam": fit.lam, "coefficients": fit.coefficients}
    return res


# Ozone

def ozone_designs(path=None, K=OZONE_MAX_LAG):
    """Lag design (lags 0..K-1) for log ozone, split into time halves.

    Each raw series is scaled by its standard deviation over the span of
    time points used by the training rows.
    """
    X, o3 = load_ozone(path)
    if np.any(o3 <= 0):
        raise ValueError("ozone response must be positive to take logs")
    spec = LagSpec(X.shape[1], K, first_lag=0)
    design, y = build_rolling_design(X, spec, response=np.log(o3))
    half = y.size // 2
    sd = X[:half + spec.max_lag].std(axis=0, ddof=1)
    Z = design.Z / np.repeat(sd, K)
    return Z, y, half, spec


def run_ozone(path=None, K=OZONE_MAX_LAG, *, n_lambdas=100) -> ExperimentResult:
    """Validation error against df for cross-sectional lasso, lagged lasso
    and ordered lasso; coefficients at each method's best lambda.

    df is the non-zero count for the lasso fits and the non-zero plateau
    count for the ordered lasso. All methods use the same rows.
    """
    Z, y, half, spec = ozone_designs(path, K)
    same_day = Z[:, ::K]
    setups = {"cross-sectional-lasso": (same_day, 1, False),
              "lasso": (Z, K, False),
              "ordered-lasso": (Z, K, True)}
    res = ExperimentResult("ozone")
    res.summary = {"K": K, "lags": spec.lags(), "features": OZONE_FEATURES,
                   "n_train": half, "n_validation": y.size - half}
    for method, (M, Kb, mono) in setups.items():
        train = center(Dataset(M[:half], y[:half]))
        path, errs, best = holdout_select(train, M[half:], y[half:],
                                          FitConfig(0.0, monotone=mono),
                                          n_lambdas=n_lambdas, K=Kb, first_lag=0)
        dfs = [df_plateaus(f) for f in path.fits]
        dfs = [d.plateau_count if mono else d.nonzero_count for d in dfs]
        for lam, e, d in zip(path.lambdas, errs, dfs):
            res.add(method, 0, lam, "validation_error", e)
            res.add(method, 0, lam, "df", d)
        coef = path.fits[best].coef.reshape(-1, Kb)
        res.summary[method] = {
            "min_validation_error": float(errs[best]), "df_at_min": dfs[best],
            "lam": float(path.lambdas[best]),
            "coefficients": {f: coef[j] for j, f in enumerate(OZONE_FEATURES)},
            "effective_lags": dict(zip(OZONE_FEATURES, effective_lags(coef))),
        }
    return res


def run(spec: SimulationSpec, **kwargs) -> ExperimentResult:
    """Dispatch a named simulation design."""
    n, seed = spec.n_replicates, spec.seed
    if spec.design == "fig1":
        return run_fig1(seed, **kwargs)
    if spec.design == "fig2":
        return run_fig2(n, seed, **kwargs)
    if spec.design == "fig3":
        return run_fig3(n, seed, False, **kwargs)
    if spec.design == "fig3-scrambled":
        return run_fig3(n, seed, True, **kwargs)
    return run_table1(n, seed, **kwargs)
