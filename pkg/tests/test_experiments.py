import json

import numpy as np
import pytest

from ordlasso import experiments as ex
from ordlasso._io import CsvError, MissingColumnError
from ordlasso.modelsel import lambda_path
from ordlasso.solver import Dataset, FitConfig, center, fit_ordered_lasso


def test_fig1_paths_and_feasibility():
    res = ex.run_fig1(seed=2, n_lambdas=20)
    for method in ("ordered-lasso", "lasso"):
        assert len(res.summary["paths"][method]["coefs"]) == 20
    assert len(res.select(metric="coef_error")) == 20 * 2
    assert res.summary["paths"]["ordered-lasso"]["feasible"]


def test_fig1_ordered_recovers_truth_better():
    wins = 0
    for seed in range(20):
        best = ex.run_fig1(seed, n_lambdas=30).summary["best"]
        wins += best["ordered-lasso"]["l2_distance"] < best["lasso"]["l2_distance"]
    assert wins > 10


def test_generators_carry_caption_parameters(rng):
    X, y = ex.fig1_data(rng)
    assert X.shape == (30, 20) and np.array_equal(ex.FIG1_BETA[:10], np.arange(10, 0, -1))
    design, y = ex.lagged_data(rng, ex.FIG2_BLOCKS, ex.FIG2_N, ex.FIG2_SIGMA)
    assert design.Z.shape == (111, 20)
    B = ex.fig3_blocks()
    assert B.shape == (4, 20)
    np.testing.assert_allclose(B[1, :10], np.linspace(5, 1, 10))
    assert np.all(B[2, 5:] == 0) and np.all(B[3] == 0)


def test_simulation_spec_validation():
    assert ex.SimulationSpec("fig2").n_replicates == 20
    assert ex.SimulationSpec("fig3-scrambled").n_replicates == 30
    with pytest.raises(ValueError):
        ex.SimulationSpec("fig9")
    with pytest.raises(ValueError):
        ex.SimulationSpec("fig2", noise_sd=3.0)


def test_determinism_and_jobs_independence(tmp_path):
    a = ex.run_fig2(4, seed=5, n_lambdas=20)
    b = ex.run_fig2(4, seed=5, n_lambdas=20, n_jobs=2)
    a.write_csv(tmp_path / "a.csv")
    b.write_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_output_formats(tmp_path):
    res = ex.run_fig2(3, seed=1, n_lambdas=15)
    res.write(tmp_path / "r.csv", tmp_path / "r.json")
    header = (tmp_path / "r.csv").read_text().splitlines()[0]
    assert header == ",".join(ex.CSV_FIELDS)
    summary = json.loads((tmp_path / "r.json").read_text())
    assert summary["schema_version"] == ex.SCHEMA_VERSION
    assert summary["ordered-lasso"]["mean_coef_error"] > 0


def test_fig2_lag_estimates_closer_than_lasso():
    res = ex.run_fig2(20, seed=0, n_jobs=2)
    truth = np.array([4, 2, 1, 0])
    dev = {}
    for method in ("ordered-lasso", "lasso"):
        lags = np.array([[r["value"] for r in res.select(method)
                          if r["replicate"] == i and r["metric"].startswith("effective_lag")]
                         for i in range(20)])
        dev[method] = np.abs(lags - truth).mean()
    assert dev["ordered-lasso"] < dev["lasso"]


def test_single_coefficient_methods_coincide(rng):
    x = rng.normal(size=(40, 1))
    d = center(Dataset(x, 2 * x[:, 0] + rng.normal(size=40)))
    for lam in (0.0, 1.0, 10.0):
        a = fit_ordered_lasso(d, FitConfig(lam))
        b = fit_ordered_lasso(d, FitConfig(lam, monotone=False))
        assert a.coef[0] == pytest.approx(b.coef[0], abs=1e-8)


def test_lasso_baseline_is_unconstrained(rng):
    X = rng.normal(size=(50, 4))
    y = X @ np.array([0.5, 3.0, 0.0, 2.0]) + 0.1 * rng.normal(size=50)
    path = lambda_path(center(Dataset(X, y)), 10, FitConfig(0.0, monotone=False))
    assert not np.all(np.diff(np.abs(path.coefs()[-1])) <= 0)


def test_bundled_data_shapes():
    years, counts = ex.load_sunspot()
    assert counts.size == 289 and years[0] == 1700 and years[-1] == 1988
    X, o3 = ex.load_ozone()
    assert X.shape == (330, 8) and o3.size == 330


def test_loader_errors(tmp_path):
    with pytest.raises(FileNotFoundError, match="year, count"):
        ex.load_sunspot(tmp_path / "none.csv")
    (tmp_path / "bad.csv").write_text("year,value\n1700,5\n")
    with pytest.raises(MissingColumnError, match="count"):
        ex.load_sunspot(tmp_path / "bad.csv")
    (tmp_path / "short.csv").write_text("year,count\n1700,5\n1701,6\n")
    with pytest.raises(CsvError, match="rows"):
        ex.load_sunspot(tmp_path / "short.csv")


def test_table1_rows():
    res = ex.run_table1(5, seed=2)
    assert len(res.select(metric="selected_order")) == 10
    assert sum(res.summary["histogram"]["ols-aic"]) == 5
