#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "freightcast/diagnostics.hpp"
#include "freightcast/pipeline.hpp"
#include "freightcast/scenario.hpp"
#include "freightcast/selection.hpp"

namespace py = pybind11;
using namespace freightcast;

namespace {

Transform make_transform(const std::string& kind) {
  return Transform{transform_from_string(kind)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seasonal ARIMA/ARIMAX modeling, counterfactual scenarios and "
            "recovery-pace analysis";

  py::register_exception<ConfigError>(m, "FreightcastConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "FreightcastDataError", PyExc_ValueError);
  py::register_exception<NumericalFamilyError>(m, "FreightcastNumericalError",
                                               PyExc_RuntimeError);

  py::enum_<Frequency>(m, "Frequency")
      .value("MONTHLY", Frequency::Monthly)
      .value("WEEKLY", Frequency::Weekly);

  py::class_<Period>(m, "Period")
      .def_static("monthly", &Period::monthly, py::arg("year"), py::arg("month"))
      .def_static("weekly_ending", &Period::weekly_ending, py::arg("year"), py::arg("month"),
                  py::arg("day"))
      .def_static("parse", &Period::parse, py::arg("text"), py::arg("frequency"))
      .def_property_readonly("year", &Period::year)
      .def_property_readonly("month", &Period::month)
      .def("plus", &Period::plus, py::arg("steps"))
      .def("steps_until", &Period::steps_until, py::arg("later"))
      .def("__str__", &Period::to_string)
      .def("__repr__", [](const Period& p) { return "Period(" + p.to_string() + ")"; })
      .def("__eq__", [](const Period& a, const Period& b) { return a == b; })
      .def("__lt__", [](const Period& a, const Period& b) { return a < b; });

  py::class_<TimeSeries>(m, "TimeSeries")
      .def(py::init<Period, std::vector<double>>(), py::arg("start"), py::arg("values"))
      .def_property_readonly("start", &TimeSeries::start)
      .def_property_readonly("frequency", &TimeSeries::frequency)
      .def_property_readonly("values", &TimeSeries::values)
      .def("period_at", &TimeSeries::period_at, py::arg("index"))
      .def("__len__", &TimeSeries::size)
      .def("__getitem__",
           [](const TimeSeries& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           });

  py::class_<Transform>(m, "Transform")
      .def(py::init(&make_transform), py::arg("kind") = "none")
      .def("__repr__",
           [](const Transform& t) { return "Transform(" + to_string(t.kind) + ")"; });

  py::class_<DifferenceSpec>(m, "DifferenceSpec")
      .def(py::init([](int d, int D, int S) { return DifferenceSpec{d, D, S}; }),
           py::arg("d") = 0, py::arg("D") = 0, py::arg("S") = 1)
      .def_readwrite("d", &DifferenceSpec::d)
      .def_readwrite("D", &DifferenceSpec::D)
      .def_readwrite("S", &DifferenceSpec::S);

  m.def("apply_transform", &apply_transform, py::arg("series"), py::arg("transform"));
  m.def("invert_transform", &invert_transform, py::arg("series"), py::arg("transform"));
  m.def("difference", &difference, py::arg("series"), py::arg("spec"));
  m.def(
      "inverse_difference",
      [](const TimeSeries& s, const DifferenceSpec& spec, const std::vector<double>& initials) {
        return inverse_difference(s, spec, initials);
      },
      py::arg("series"), py::arg("spec"), py::arg("initials"));
  m.def("resample_weekly_to_monthly", &resample_weekly_to_monthly, py::arg("series"));
  m.def("slice_window", &slice_window, py::arg("series"), py::arg("from_period"),
        py::arg("to_period"));

  // diagnostics
  py::class_<AcfResult>(m, "AcfResult")
      .def_readonly("lags", &AcfResult::lags)
      .def_readonly("values", &AcfResult::values)
      .def_readonly("n", &AcfResult::n);
  py::class_<PacfResult>(m, "PacfResult")
      .def_readonly("lags", &PacfResult::lags)
      .def_readonly("values", &PacfResult::values)
      .def_readonly("n", &PacfResult::n);
  py::enum_<DeterministicTerms>(m, "DeterministicTerms")
      .value("CONSTANT", DeterministicTerms::Constant)
      .value("CONSTANT_TREND", DeterministicTerms::ConstantTrend);
  py::class_<AdfResult>(m, "AdfResult")
      .def_readonly("statistic", &AdfResult::statistic)
      .def_readonly("p_value", &AdfResult::p_value)
      .def_readonly("lags_used", &AdfResult::lags_used);
  py::class_<LjungBoxResult>(m, "LjungBoxResult")
      .def_readonly("q_stat", &LjungBoxResult::q_stat)
      .def_readonly("df", &LjungBoxResult::df)
      .def_readonly("p_value", &LjungBoxResult::p_value);
  py::class_<DecompositionResult>(m, "DecompositionResult")
      .def_readonly("trend", &DecompositionResult::trend)
      .def_readonly("seasonal", &DecompositionResult::seasonal)
      .def_readonly("residual", &DecompositionResult::residual);

  m.def(
      "acf", [](const std::vector<double>& x, int max_lag) { return acf(x, max_lag); },
      py::arg("values"), py::arg("max_lag"));
  m.def(
      "pacf", [](const std::vector<double>& x, int max_lag) { return pacf(x, max_lag); },
      py::arg("values"), py::arg("max_lag"));
  m.def(
      "adf_test",
      [](const std::vector<double>& x, int max_lag, DeterministicTerms terms) {
        return adf_test(x, max_lag < 0 ? AdfLagPolicy::schwert() : AdfLagPolicy::fixed(max_lag),
                        terms);
      },
      py::arg("values"), py::arg("max_lag") = -1,
      py::arg("deterministic_terms") = DeterministicTerms::Constant);
  m.def(
      "ljung_box",
      [](const std::vector<double>& x, int h, int fitted_params) {
        return ljung_box(x, h, fitted_params);
      },
      py::arg("residuals"), py::arg("lags"), py::arg("fitted_params") = 0);
  m.def(
      "classical_decompose",
      [](const std::vector<double>& x, int period) { return classical_decompose(x, period); },
      py::arg("values"), py::arg("period"));
  m.def(
      "pearson_corr",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return pearson_corr(a, b);
      },
      py::arg("a"), py::arg("b"));

  // engine
  py::class_<ModelOrder>(m, "ModelOrder")
      .def(py::init([](int p, int d, int q, int P, int D, int Q, int S,
                       const std::string& transform, std::optional<bool> with_intercept) {
             ModelOrder o{p, d, q, P, D, Q, S, make_transform(transform),
                          with_intercept.value_or(ModelOrder::default_intercept(d, D))};
             o.validate();
             return o;
           }),
           py::arg("p") = 0, py::arg("d") = 0, py::arg("q") = 0, py::arg("P") = 0,
           py::arg("D") = 0, py::arg("Q") = 0, py::arg("S") = 1, py::arg("transform") = "none",
           py::arg("with_intercept") = std::nullopt)
      .def_readwrite("p", &ModelOrder::p)
      .def_readwrite("d", &ModelOrder::d)
      .def_readwrite("q", &ModelOrder::q)
      .def_readwrite("P", &ModelOrder::P)
      .def_readwrite("D", &ModelOrder::D)
      .def_readwrite("Q", &ModelOrder::Q)
      .def_readwrite("S", &ModelOrder::S)
      .def_readwrite("with_intercept", &ModelOrder::with_intercept)
      .def("__repr__", [](const ModelOrder& o) { return "ModelOrder" + o.to_string(); });

  py::class_<ParamVector>(m, "ParamVector")
      .def(py::init([](std::optional<double> intercept, std::vector<double> ar,
                       std::vector<double> ma, std::vector<double> sar, std::vector<double> sma,
                       std::vector<double> beta, double sigma2) {
             ParamVector p;
             p.intercept = intercept;
             p.ar = std::move(ar);
             p.ma = std::move(ma);
             p.sar = std::move(sar);
             p.sma = std::move(sma);
             p.beta = std::move(beta);
             p.sigma2 = sigma2;
             return p;
           }),
           py::arg("intercept") = std::nullopt, py::arg("ar") = std::vector<double>{},
           py::arg("ma") = std::vector<double>{}, py::arg("sar") = std::vector<double>{},
           py::arg("sma") = std::vector<double>{}, py::arg("beta") = std::vector<double>{},
           py::arg("sigma2") = 1.0)
      .def_readwrite("intercept", &ParamVector::intercept)
      .def_readwrite("ar", &ParamVector::ar)
      .def_readwrite("ma", &ParamVector::ma)
      .def_readwrite("sar", &ParamVector::sar)
      .def_readwrite("sma", &ParamVector::sma)
      .def_readwrite("beta", &ParamVector::beta)
      .def_readwrite("sigma2", &ParamVector::sigma2)
      .def("count", &ParamVector::count);

  py::class_<Forecast>(m, "Forecast")
      .def_readonly("start", &Forecast::start)
      .def_readonly("median", &Forecast::median)
      .def_readonly("lower", &Forecast::lower)
      .def_readonly("upper", &Forecast::upper)
      .def_readonly("level", &Forecast::level)
      .def("__len__", [](const Forecast& f) { return f.horizon(); });

  py::class_<FittedModel>(m, "FittedModel")
      .def_readonly("order", &FittedModel::order)
      .def_readonly("params", &FittedModel::params)
      .def_readonly("loglik", &FittedModel::loglik)
      .def_readonly("aic", &FittedModel::aic)
      .def_readonly("k_params", &FittedModel::k_params)
      .def_readonly("std_errors", &FittedModel::std_errors)
      .def_readonly("exog_p_values", &FittedModel::exog_p_values)
      .def_readonly("residuals", &FittedModel::residuals)
      .def_readonly("std_residuals", &FittedModel::std_residuals)
      .def_readonly("converged", &FittedModel::converged)
      .def_readonly("warnings", &FittedModel::warnings);

  py::class_<ResidualSummary>(m, "ResidualSummary")
      .def_readonly("ljung_box", &ResidualSummary::ljung_box)
      .def_readonly("mean", &ResidualSummary::mean)
      .def_readonly("variance", &ResidualSummary::variance)
      .def_readonly("skewness", &ResidualSummary::skewness)
      .def_readonly("excess_kurtosis", &ResidualSummary::excess_kurtosis);

  m.def("kalman_loglik", &kalman_loglik, py::arg("order"), py::arg("params"), py::arg("endog"),
        py::arg("exog") = std::vector<TimeSeries>{});
  m.def(
      "fit",
      [](const ModelOrder& order, const TimeSeries& endog, const std::vector<TimeSeries>& exog,
         bool enforce_stationarity, bool compute_std_errors) {
        FitOptions opts;
        opts.enforce_stationarity = enforce_stationarity;
        opts.compute_std_errors = compute_std_errors;
        return fit(order, endog, exog, opts);
      },
      py::arg("order"), py::arg("endog"), py::arg("exog") = std::vector<TimeSeries>{},
      py::arg("enforce_stationarity") = true, py::arg("compute_std_errors") = true);
  m.def("evaluate_at", &evaluate_at, py::arg("order"), py::arg("params"), py::arg("endog"),
        py::arg("exog") = std::vector<TimeSeries>{});
  m.def("forecast", &forecast, py::arg("model"), py::arg("horizon"),
        py::arg("future_exog") = std::vector<TimeSeries>{}, py::arg("level") = 0.95);
  m.def("simulate", &simulate, py::arg("order"), py::arg("params"), py::arg("n"), py::arg("seed"),
        py::arg("exog") = std::vector<TimeSeries>{}, py::arg("start") = std::nullopt);
  m.def("residual_diagnostics", &residual_diagnostics, py::arg("model"), py::arg("lb_lags") = 0);

  // selection
  py::class_<CandidateGrid>(m, "CandidateGrid")
      .def(py::init([](std::pair<int, int> p, std::pair<int, int> q, std::pair<int, int> P,
                       std::pair<int, int> Q, std::vector<int> d, std::vector<int> D, int S,
                       std::vector<std::string> transforms, std::optional<bool> with_intercept,
                       std::size_t max_candidates) {
             CandidateGrid g;
             g.p = p;
             g.q = q;
             g.P = P;
             g.Q = Q;
             g.d = std::move(d);
             g.D = std::move(D);
             g.S = S;
             g.transforms.clear();
             for (const auto& t : transforms) g.transforms.push_back(make_transform(t));
             g.with_intercept = with_intercept;
             g.max_candidates = max_candidates;
             return g;
           }),
           py::arg("p") = std::pair<int, int>{0, 1}, py::arg("q") = std::pair<int, int>{0, 1},
           py::arg("P") = std::pair<int, int>{0, 0}, py::arg("Q") = std::pair<int, int>{0, 0},
           py::arg("d") = std::vector<int>{0}, py::arg("D") = std::vector<int>{0},
           py::arg("S") = 12, py::arg("transforms") = std::vector<std::string>{"none"},
           py::arg("with_intercept") = std::nullopt, py::arg("max_candidates") = 512)
      .def("enumerate", &CandidateGrid::enumerate);

  py::class_<HoldoutPolicy>(m, "HoldoutPolicy")
      .def(py::init([](double train_fraction, int long_horizon) {
             return HoldoutPolicy{train_fraction, long_horizon};
           }),
           py::arg("train_fraction") = 0.7, py::arg("long_horizon") = 12)
      .def_readwrite("train_fraction", &HoldoutPolicy::train_fraction)
      .def_readwrite("long_horizon", &HoldoutPolicy::long_horizon);

  py::class_<BacktestMetrics>(m, "BacktestMetrics")
      .def_readonly("mape_1", &BacktestMetrics::mape_1)
      .def_readonly("mad_1", &BacktestMetrics::mad_1)
      .def_readonly("mape_12", &BacktestMetrics::mape_h)
      .def_readonly("mad_12", &BacktestMetrics::mad_h)
      .def_readonly("origins_1", &BacktestMetrics::origins_1)
      .def_readonly("origins_12", &BacktestMetrics::origins_h);

  py::class_<CandidateResult>(m, "CandidateResult")
      .def_readonly("order", &CandidateResult::order)
      .def_readonly("aic", &CandidateResult::aic)
      .def_readonly("aic_comparable", &CandidateResult::aic_comparable)
      .def_readonly("ljung_box_p", &CandidateResult::ljung_box_p)
      .def_readonly("metrics", &CandidateResult::metrics)
      .def_readonly("converged", &CandidateResult::converged)
      .def_readonly("gate_passed", &CandidateResult::gate_passed)
      .def_readonly("failure", &CandidateResult::failure);

  py::class_<SelectionReport>(m, "SelectionReport")
      .def_readonly("ranked", &SelectionReport::ranked)
      .def_readonly("adf", &SelectionReport::adf)
      .def_readonly("recommended_d", &SelectionReport::recommended_d)
      .def_property_readonly("winner",
                             [](const SelectionReport& r) { return r.winner(); });

  m.def("backtest_metrics", &backtest_metrics, py::arg("order"), py::arg("series"),
        py::arg("exog") = std::vector<TimeSeries>{}, py::arg("policy") = HoldoutPolicy{});
  m.def("evaluate_candidate", &evaluate_candidate, py::arg("order"), py::arg("series"),
        py::arg("exog") = std::vector<TimeSeries>{}, py::arg("policy") = HoldoutPolicy{});
  m.def("select_model", &select_model, py::arg("grid"), py::arg("series"),
        py::arg("exog") = std::vector<TimeSeries>{}, py::arg("policy") = HoldoutPolicy{},
        py::arg("jobs") = 1);

  // scenarios
  py::enum_<ScenarioKind>(m, "ScenarioKind")
      .value("TREND_CONTINUATION", ScenarioKind::TrendContinuation)
      .value("COVARIATE_ADAPTED_TREND", ScenarioKind::CovariateAdaptedTrend)
      .value("ACTUAL_COVARIATE_FORECAST", ScenarioKind::ActualCovariateForecast);

  py::class_<WindowSpec>(m, "WindowSpec")
      .def(py::init([](const Period& from, const Period& to) { return WindowSpec{from, to}; }),
           py::arg("from_period"), py::arg("to_period"))
      .def_readonly("from_period", &WindowSpec::from)
      .def_readonly("to_period", &WindowSpec::to)
      .def("length", &WindowSpec::length);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init([](ScenarioKind kind, const WindowSpec& train, const WindowSpec& eval,
                       std::optional<std::string> covariate_name,
                       std::optional<ModelOrder> covariate_order, double level) {
             return ScenarioSpec{kind, train, eval, std::move(covariate_name),
                                 std::move(covariate_order), level};
           }),
           py::arg("kind"), py::arg("train"), py::arg("eval"),
           py::arg("covariate_name") = std::nullopt, py::arg("covariate_order") = std::nullopt,
           py::arg("level") = 0.95);

  py::class_<ImpactPoint>(m, "ImpactPoint")
      .def_readonly("period", &ImpactPoint::period)
      .def_readonly("actual", &ImpactPoint::actual)
      .def_readonly("baseline", &ImpactPoint::baseline)
      .def_readonly("ratio", &ImpactPoint::ratio)
      .def_readonly("deviation", &ImpactPoint::deviation);

  py::class_<ImpactSeries>(m, "ImpactSeries")
      .def_readonly("points", &ImpactSeries::points)
      .def("mean_deviation", &ImpactSeries::mean_deviation, py::arg("window"));

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("baseline", &ScenarioResult::baseline)
      .def_readonly("impact", &ScenarioResult::impact)
      .def_property_readonly("model",
                             [](const ScenarioResult& r) { return *r.model; })
      .def_readonly("covariate_projection", &ScenarioResult::covariate_projection);

  m.def(
      "run_scenario",
      [](const ScenarioSpec& spec, const TimeSeries& freight,
         const std::optional<TimeSeries>& covariate, const ModelOrder& order) {
        return run_scenario(spec, freight, covariate ? &*covariate : nullptr, order);
      },
      py::arg("spec"), py::arg("freight"), py::arg("covariate"), py::arg("freight_order"));
  m.def("run_scenario_pair", &run_scenario_pair, py::arg("spec2"), py::arg("spec3"),
        py::arg("freight"), py::arg("covariate"), py::arg("freight_order"));
  m.def("project_covariate", &project_covariate, py::arg("covariate"), py::arg("order"),
        py::arg("train"), py::arg("horizon"));

  py::class_<RecoveryPacePoint>(m, "RecoveryPacePoint")
      .def_readonly("name", &RecoveryPacePoint::name)
      .def_readonly("x", &RecoveryPacePoint::x)
      .def_readonly("y", &RecoveryPacePoint::y)
      .def_readonly("region", &RecoveryPacePoint::region);

  py::class_<BestFitLine>(m, "BestFitLine")
      .def_readonly("slope", &BestFitLine::slope)
      .def_readonly("intercept", &BestFitLine::intercept)
      .def_readonly("r2", &BestFitLine::r2)
      .def_readonly("excluded", &BestFitLine::excluded);

  m.def("classify_recovery_region", &classify_recovery_region, py::arg("x"), py::arg("y"));
  m.def("recovery_pace_points", &recovery_pace_points, py::arg("impacts_by_component"),
        py::arg("disruption"), py::arg("recovery"));
  m.def("best_fit_line", &best_fit_line, py::arg("points"),
        py::arg("excluded") = std::vector<std::string>{});

  // ingestion and pipeline
  py::class_<DatasetConfig>(m, "DatasetConfig")
      .def(py::init([](std::string name, std::string path, std::string url,
                       std::string date_column, std::string value_column,
                       Frequency frequency, bool resample_to_monthly,
                       const std::string& transform_on_load) {
             DatasetConfig c;
             c.name = std::move(name);
             c.path = std::move(path);
             c.url = std::move(url);
             c.date_column = std::move(date_column);
             c.value_column = std::move(value_column);
             c.frequency = frequency;
             c.resample_to_monthly = resample_to_monthly;
             c.transform_on_load = make_transform(transform_on_load);
             return c;
           }),
           py::arg("name") = "series", py::arg("path") = "", py::arg("url") = "",
           py::arg("date_column") = "date", py::arg("value_column") = "value",
           py::arg("frequency") = Frequency::Monthly, py::arg("resample_to_monthly") = false,
           py::arg("transform_on_load") = "none");

  m.def("load_series_csv",
        [](const DatasetConfig& config) { return load_series_csv(config); },
        py::arg("config"));
  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path,
         const std::optional<std::filesystem::path>& output_dir, std::optional<int> jobs) {
        RunConfig config = RunConfig::from_json_file(config_path);
        if (output_dir) config.output_dir = *output_dir;
        if (jobs) config.jobs = *jobs;
        run_pipeline(config);
      },
      py::arg("config_path"), py::arg("output_dir") = std::nullopt,
      py::arg("jobs") = std::nullopt);
}
