import math
from pathlib import Path

import pytest

import rebal

FIXTURES = Path(__file__).resolve().parents[1] / "data"


def test_point_values():
    assert rebal.cumulative_return(10000, 48000) == 3.80
    assert rebal.cagr(100, 121, 2) == pytest.approx(0.10, abs=1e-15)
    assert rebal.max_drawdown([100, 120, 60, 90, 130]) == -0.5
    assert rebal.omega([0.02, -0.01]) == pytest.approx(2.0)


def test_undefined_metric_raises():
    with pytest.raises(rebal.UndefinedMetric):
        rebal.sharpe([0.01] * 5)
    with pytest.raises(rebal.Error):
        rebal.cagr(0, 1, 1)


def test_tear_sheet_marks_not_computable():
    sheet = rebal.tear_sheet([0.0] * 30, [0.0] * 30)
    assert sheet["cumulative_return"] == 0.0
    assert sheet["sharpe"] is None
    assert len(sheet) == 16


def test_alpha_beta_linear():
    bench = [0.01 * math.sin(i) for i in range(200)]
    alpha, beta = rebal.alpha_beta([0.0001 + 0.5 * b for b in bench], bench)
    assert beta == pytest.approx(0.5, abs=1e-12)
    assert alpha == pytest.approx(1.0001 ** 252 - 1, abs=1e-9)


def test_rebalance_dates_and_backtest():
    dates = ["2021-01-04", "2021-01-05", "2022-01-04"]
    assert rebal.rebalance_dates(dates, "yearly") == ["2022-01-04"]
    res = rebal.run_backtest(
        dates,
        {"A": [100, 150, 200], "B": [100, 100, 100]},
        [1, 1, 1],
        frequency="yearly",
        per_asset_capital=1000,
    )
    assert res["shares"]["A"] == [10, 10, 7]
    assert res["shares"]["B"] == [10, 10, 15]
    assert res["value"][-1] == pytest.approx(3000)


def test_backtest_config(tmp_path):
    out = rebal.backtest(FIXTURES / "smoke" / "run.json", out_dir=tmp_path)
    assert not out["failures"]
    assert [s["window"] for s in out["sectors"][0]["tear_sheets"]] == [
        "in_sample",
        "out_of_sample",
        "overall",
    ]
    assert (tmp_path / "auto" / "tear_sheet.csv").exists()
