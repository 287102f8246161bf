"""End-to-end smoke tests for the python bindings."""

import math
import os
import pathlib

import pytest

import freightcast as fc

SOURCE_DIR = pathlib.Path(os.environ.get("FREIGHTCAST_SOURCE_DIR", pathlib.Path(__file__).parents[2]))


def test_series_roundtrip():
    start = fc.Period.monthly(2020, 1)
    s = fc.TimeSeries(start, [1.0, 2.0, 3.0, 4.0])
    assert len(s) == 4
    assert str(s.period_at(3)) == "2020-04"
    diffed = fc.difference(s, fc.DifferenceSpec(d=1))
    assert diffed.values == [1.0, 1.0, 1.0]
    back = fc.inverse_difference(diffed, fc.DifferenceSpec(d=1), [1.0])
    assert back.values == [1.0, 2.0, 3.0, 4.0]


def test_transform_domain_error():
    s = fc.TimeSeries(fc.Period.monthly(2020, 1), [0.0, 1.0])
    with pytest.raises(ValueError):
        fc.apply_transform(s, fc.Transform("log"))


def _lcg_noise(n, seed=12345):
    state = seed
    out = []
    for _ in range(n):
        state = (6364136223846793005 * state + 1442695040888963407) % 2**64
        out.append((state >> 11) / 2**53 - 0.5)
    return out


def test_diagnostics():
    noise = _lcg_noise(120)
    values = [float(i % 7) + 0.1 * i + noise[i] for i in range(120)]
    r = fc.acf(values, 10)
    assert r.values[0] == pytest.approx(1.0)
    p = fc.pacf(values, 10)
    assert p.values[0] == pytest.approx(r.values[1], abs=1e-10)
    adf = fc.adf_test(values, deterministic_terms=fc.DeterministicTerms.CONSTANT_TREND)
    assert 0.0 <= adf.p_value <= 1.0
    lb = fc.ljung_box(values, 10, 0)
    assert lb.df == 10


def test_fit_forecast_cycle():
    order = fc.ModelOrder(p=1, with_intercept=False)
    truth = fc.ParamVector(ar=[0.6], sigma2=1.0)
    data = fc.simulate(order, truth, 1500, seed=7)
    model = fc.fit(order, data)
    assert model.converged
    assert abs(model.params.ar[0] - 0.6) < 0.08
    assert model.aic == pytest.approx(2 * model.k_params - 2 * model.loglik)

    fcst = fc.forecast(model, 6)
    assert len(fcst) == 6
    assert all(lo <= med <= hi for lo, med, hi in zip(fcst.lower, fcst.median, fcst.upper))

    summary = fc.residual_diagnostics(model)
    assert summary.variance == pytest.approx(1.0, abs=0.15)


def test_selection_smoke():
    order = fc.ModelOrder(p=1, with_intercept=False)
    truth = fc.ParamVector(ar=[0.6], sigma2=1.0)
    data = fc.simulate(order, truth, 600, seed=11)
    grid = fc.CandidateGrid(p=(0, 1), q=(0, 1), d=[0], D=[0], S=1, with_intercept=False)
    report = fc.select_model(grid, data)
    assert len(report.ranked) == 4
    assert report.winner.order.p == 1


def test_scenario_with_bundled_data():
    cfg = fc.DatasetConfig(
        name="im",
        path=str(SOURCE_DIR / "data" / "freight_im.csv"),
        date_column="month",
        value_column="volume",
    )
    series = fc.load_series_csv(cfg)
    spec = fc.ScenarioSpec(
        kind=fc.ScenarioKind.TREND_CONTINUATION,
        train=fc.WindowSpec(fc.Period.monthly(2012, 1), fc.Period.monthly(2019, 12)),
        eval=fc.WindowSpec(fc.Period.monthly(2020, 1), fc.Period.monthly(2020, 12)),
    )
    order = fc.ModelOrder(p=0, d=1, q=1, P=0, D=1, Q=1, S=12, transform="log")
    result = fc.run_scenario(spec, series, None, order)
    assert len(result.impact.points) == 12
    april = next(pt for pt in result.impact.points if pt.period.month == 4)
    assert math.isclose(april.deviation, -0.20, abs_tol=0.03)

    window = fc.WindowSpec(fc.Period.monthly(2020, 4), fc.Period.monthly(2020, 5))
    recovery = fc.WindowSpec(fc.Period.monthly(2020, 10), fc.Period.monthly(2020, 12))
    pts = fc.recovery_pace_points([("im", result.impact)], window, recovery)
    assert pts[0].region == "B"


def test_run_pipeline(tmp_path):
    out = tmp_path / "out"
    fc.run_pipeline(SOURCE_DIR / "demo" / "config.json", output_dir=out)
    assert (out / "recovery_pace" / "points.csv").exists()
    assert (out / "models" / "im_sarimax.json").exists()
