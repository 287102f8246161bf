#include "freightcast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "freightcast/format.hpp"

namespace freightcast {

namespace {

using nlohmann::json;

// ---- config parsing --------------------------------------------------------

ModelOrder order_from_json(const json& j) {
  ModelOrder o;
  o.p = j.value("p", 0);
  o.d = j.value("d", 0);
  o.q = j.value("q", 0);
  o.P = j.value("P", 0);
  o.D = j.value("D", 0);
  o.Q = j.value("Q", 0);
  o.S = j.value("S", 1);
  o.transform = Transform{transform_from_string(j.value("transform", "none"))};
  o.with_intercept = j.contains("with_intercept")
                         ? j.at("with_intercept").get<bool>()
                         : ModelOrder::default_intercept(o.d, o.D);
  o.validate();
  return o;
}

json order_to_json(const ModelOrder& o) {
  return json{{"p", o.p},           {"d", o.d},
              {"q", o.q},           {"P", o.P},
              {"D", o.D},           {"Q", o.Q},
              {"S", o.S},           {"transform", to_string(o.transform.kind)},
              {"with_intercept", o.with_intercept}};
}

WindowSpec window_from_json(const json& j, Frequency freq, const std::string& what) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(what + " must be a [from, to] pair");
  }
  return WindowSpec{Period::parse(j.at(0).get<std::string>(), freq),
                    Period::parse(j.at(1).get<std::string>(), freq)};
}

template <typename T>
std::pair<int, int> range_from_json(const T& j, const char* what) {
  if (j.is_number_integer()) {
    const int v = j.template get<int>();
    return {v, v};
  }
  if (j.is_array() && j.size() == 2) {
    return {j.at(0).template get<int>(), j.at(1).template get<int>()};
  }
  throw ConfigError(std::string(what) + " must be an integer or a [lo, hi] pair");
}

DatasetConfig dataset_from_json(const json& j, const std::filesystem::path& base_dir) {
  DatasetConfig d;
  d.name = j.at("name").get<std::string>();
  if (j.contains("path")) {
    std::filesystem::path p = j.at("path").get<std::string>();
    d.path = (p.is_absolute() ? p : base_dir / p).string();
  }
  d.url = j.value("url", "");
  if (d.path.empty() == d.url.empty()) {
    throw ConfigError("dataset '" + d.name + "' needs exactly one of path or url");
  }
  d.date_column = j.value("date_column", "date");
  d.value_column = j.value("value_column", "value");
  d.frequency = frequency_from_string(j.value("frequency", "monthly"));
  d.resample_to_monthly = j.value("resample_to_monthly", false);
  d.transform_on_load = Transform{transform_from_string(j.value("transform_on_load", "none"))};
  return d;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text,
                                    const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  try {
    RunConfig cfg;
    cfg.seed = root.value("seed", 0ull);
    cfg.jobs = root.value("jobs", 1);
    cfg.output_dir = base_dir / root.value("output_dir", "out");
    cfg.cache_dir = base_dir / root.value("cache_dir", ".freightcast-cache");
    if (root.contains("backtest")) {
      const auto& b = root.at("backtest");
      cfg.backtest.train_fraction = b.value("train_fraction", 0.7);
      cfg.backtest.long_horizon = b.value("long_horizon", 12);
    }

    for (const auto& j : root.value("datasets", json::array())) {
      cfg.datasets.push_back(dataset_from_json(j, base_dir));
    }

    auto freq_of = [&cfg](const std::string& series) {
      for (const auto& d : cfg.datasets) {
        if (d.name == series) {
          return d.resample_to_monthly ? Frequency::Monthly : d.frequency;
        }
      }
      throw ConfigError("unknown dataset '" + series + "'");
    };

    for (const auto& j : root.value("models", json::array())) {
      ModelTask t;
      t.series = j.at("series").get<std::string>();
      t.name = j.value("name", t.series);
      t.order = order_from_json(j.at("order"));
      t.exog = j.value("exog", std::vector<std::string>{});
      if (j.contains("window")) {
        t.window = window_from_json(j.at("window"), freq_of(t.series), "model window");
      }
      cfg.models.push_back(std::move(t));
    }

    for (const auto& j : root.value("grids", json::array())) {
      GridTask t;
      t.series = j.at("series").get<std::string>();
      t.name = j.value("name", t.series);
      if (j.contains("p")) t.grid.p = range_from_json(j.at("p"), "p");
      if (j.contains("q")) t.grid.q = range_from_json(j.at("q"), "q");
      if (j.contains("P")) t.grid.P = range_from_json(j.at("P"), "P");
      if (j.contains("Q")) t.grid.Q = range_from_json(j.at("Q"), "Q");
      t.grid.d = j.value("d", std::vector<int>{0});
      t.grid.D = j.value("D", std::vector<int>{0});
      t.grid.S = j.value("S", 12);
      if (j.contains("transforms")) {
        t.grid.transforms.clear();
        for (const auto& tr : j.at("transforms")) {
          t.grid.transforms.push_back(Transform{transform_from_string(tr.get<std::string>())});
        }
      }
      if (j.contains("with_intercept")) t.grid.with_intercept = j.at("with_intercept").get<bool>();
      t.grid.max_candidates = j.value("max_candidates", std::size_t{512});
      t.exog = j.value("exog", std::vector<std::string>{});
      if (j.contains("window")) {
        t.window = window_from_json(j.at("window"), freq_of(t.series), "grid window");
      }
      cfg.grids.push_back(std::move(t));
    }

    for (const auto& j : root.value("scenarios", json::array())) {
      ScenarioTask t;
      t.name = j.at("name").get<std::string>();
      t.series = j.at("series").get<std::string>();
      t.order = order_from_json(j.at("order"));
      const Frequency freq = freq_of(t.series);
      t.spec.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
      t.spec.train = window_from_json(j.at("train"), freq, "scenario train window");
      t.spec.eval = window_from_json(j.at("eval"), freq, "scenario eval window");
      t.spec.level = j.value("level", 0.95);
      if (j.contains("covariate")) t.spec.covariate_name = j.at("covariate").get<std::string>();
      if (j.contains("covariate_order")) {
        t.spec.covariate_order = order_from_json(j.at("covariate_order"));
      }
      cfg.scenarios.push_back(std::move(t));
    }

    if (root.contains("recovery_pace")) {
      const auto& j = root.at("recovery_pace");
      RecoveryPaceConfig rp{
          .disruption = window_from_json(j.at("disruption"), Frequency::Monthly,
                                         "recovery_pace disruption window"),
          .recovery = window_from_json(j.at("recovery"), Frequency::Monthly,
                                       "recovery_pace recovery window"),
          .scenarios = j.at("scenarios").get<std::vector<std::string>>(),
          .exclude_from_best_fit =
              j.value("exclude_from_best_fit", std::vector<std::string>{}),
      };
      cfg.recovery_pace = std::move(rp);
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream input(path);
  if (!input) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << input.rdbuf();
  return from_json_text(text.str(), path.parent_path());
}

void RunConfig::validate() const {
  auto has_dataset = [this](const std::string& name) {
    return std::any_of(datasets.begin(), datasets.end(),
                       [&name](const DatasetConfig& d) { return d.name == name; });
  };
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ConfigError("dataset with empty name");
    if (std::count_if(datasets.begin(), datasets.end(),
                      [&d](const DatasetConfig& o) { return o.name == d.name; }) > 1) {
      throw ConfigError("duplicate dataset name '" + d.name + "'");
    }
  }
  for (const auto& m : models) {
    if (!has_dataset(m.series)) {
      throw ConfigError("model '" + m.name + "' references unknown series '" + m.series + "'");
    }
    for (const auto& e : m.exog) {
      if (!has_dataset(e)) {
        throw ConfigError("model '" + m.name + "' references unknown covariate '" + e + "'");
      }
    }
  }
  for (const auto& g : grids) {
    if (!has_dataset(g.series)) {
      throw ConfigError("grid '" + g.name + "' references unknown series '" + g.series + "'");
    }
    for (const auto& e : g.exog) {
      if (!has_dataset(e)) {
        throw ConfigError("grid '" + g.name + "' references unknown covariate '" + e + "'");
      }
    }
  }
  for (const auto& s : scenarios) {
    if (!has_dataset(s.series)) {
      throw ConfigError("scenario '" + s.name + "' references unknown series '" + s.series + "'");
    }
    if (s.spec.covariate_name && !has_dataset(*s.spec.covariate_name)) {
      throw ConfigError("scenario '" + s.name + "' references unknown covariate '" +
                        *s.spec.covariate_name + "'");
    }
    s.spec.validate();
    if (std::count_if(scenarios.begin(), scenarios.end(),
                      [&s](const ScenarioTask& o) { return o.name == s.name; }) > 1) {
      throw ConfigError("duplicate scenario name '" + s.name + "'");
    }
  }
  if (recovery_pace) {
    for (const auto& name : recovery_pace->scenarios) {
      if (std::none_of(scenarios.begin(), scenarios.end(),
                       [&name](const ScenarioTask& s) { return s.name == name; })) {
        throw ConfigError("recovery_pace references unknown scenario '" + name + "'");
      }
    }
  }
}

// ---- report emission --------------------------------------------------------

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

std::string csv_num(double v) {
  return std::isnan(v) ? std::string{} : format_double(v);
}

json params_to_json(const ParamVector& p) {
  json j{{"ar", p.ar},   {"ma", p.ma},   {"sar", p.sar},
         {"sma", p.sma}, {"beta", p.beta}, {"sigma2", p.sigma2}};
  if (p.intercept) j["intercept"] = *p.intercept;
  return j;
}

ParamVector params_from_json(const json& j) {
  ParamVector p;
  p.ar = j.value("ar", std::vector<double>{});
  p.ma = j.value("ma", std::vector<double>{});
  p.sar = j.value("sar", std::vector<double>{});
  p.sma = j.value("sma", std::vector<double>{});
  p.beta = j.value("beta", std::vector<double>{});
  p.sigma2 = j.at("sigma2").get<double>();
  if (j.contains("intercept")) p.intercept = j.at("intercept").get<double>();
  return p;
}

json model_to_json(const FittedModel& model) {
  json j{
      {"order", order_to_json(model.order)},
      {"params", params_to_json(model.params)},
      {"loglik", model.loglik},
      {"aic", model.aic},
      {"k_params", model.k_params},
      {"std_errors", model.std_errors},
      {"exog_p_values", model.exog_p_values},
      {"converged", model.converged},
      {"n_obs", model.endog.size()},
      {"train_start", model.endog.start().to_string()},
      {"train_end", model.endog.end().to_string()},
  };
  if (!model.warnings.empty()) j["warnings"] = model.warnings;
  try {
    const ResidualSummary summary = residual_diagnostics(model);
    j["diagnostics"] = json{{"ljung_box_q", summary.ljung_box.q_stat},
                            {"ljung_box_df", summary.ljung_box.df},
                            {"ljung_box_p", summary.ljung_box.p_value},
                            {"residual_mean", summary.mean},
                            {"residual_variance", summary.variance},
                            {"residual_skewness", summary.skewness},
                            {"residual_excess_kurtosis", summary.excess_kurtosis}};
  } catch (const Error& e) {
    j["diagnostics"] = json{{"unavailable", e.what()}};
  }
  return j;
}

json metrics_to_json(const BacktestMetrics& m) {
  return json{{"mape_1", m.mape_1},     {"mad_1", m.mad_1},
              {"mape_12", m.mape_h},    {"mad_12", m.mad_h},
              {"origins_1", m.origins_1}, {"origins_12", m.origins_h}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string selection_csv(const SelectionReport& report) {
  std::ostringstream os;
  os << "rank,order,aic,aic_comparable,ljung_box_p,mape_1,mad_1,mape_12,mad_12,"
        "converged,gate_passed,failure\n";
  int rank = 1;
  for (const auto& c : report.ranked) {
    os << rank++ << ',' << c.order.to_string() << ',' << csv_num(c.aic) << ','
       << csv_num(c.aic_comparable) << ',' << csv_num(c.ljung_box_p) << ','
       << csv_num(c.metrics.mape_1) << ',' << csv_num(c.metrics.mad_1) << ','
       << csv_num(c.metrics.mape_h) << ',' << csv_num(c.metrics.mad_h) << ','
       << (c.converged ? "true" : "false") << ',' << (c.gate_passed ? "true" : "false") << ','
       << c.failure << '\n';
  }
  return os.str();
}

json candidate_to_json(const CandidateResult& c) {
  json j{{"order", order_to_json(c.order)},
         {"aic", c.aic},
         {"aic_comparable", c.aic_comparable},
         {"ljung_box_p", c.ljung_box_p},
         {"k_params", c.k_params},
         {"converged", c.converged},
         {"gate_passed", c.gate_passed},
         {"metrics", metrics_to_json(c.metrics)}};
  if (!c.failure.empty()) j["failure"] = c.failure;
  if (!c.metrics_note.empty()) j["metrics_note"] = c.metrics_note;
  return j;
}

std::string projection_csv(const TimeSeries& actual_eval, const Forecast& baseline) {
  std::ostringstream os;
  os << "period,actual,median,lower,upper\n";
  for (std::size_t i = 0; i < baseline.horizon(); ++i) {
    os << baseline.start.plus(static_cast<std::int64_t>(i)).to_string() << ','
       << format_double(actual_eval[i]) << ',' << format_double(baseline.median[i]) << ','
       << format_double(baseline.lower[i]) << ',' << format_double(baseline.upper[i]) << '\n';
  }
  return os.str();
}

std::string impact_csv(const ImpactSeries& impact) {
  std::ostringstream os;
  os << "period,actual,baseline,ratio,deviation\n";
  for (const auto& pt : impact.points) {
    os << pt.period.to_string() << ',' << format_double(pt.actual) << ','
       << format_double(pt.baseline) << ',' << format_double(pt.ratio) << ','
       << format_double(pt.deviation) << '\n';
  }
  return os.str();
}

std::string overlay_csv(const TimeSeries& series, const TimeSeries& covariate,
                        const WindowSpec& train, const WindowSpec& eval) {
  // percent change of both series relative to their values at the train start
  const auto s0 = series.index_of(train.from);
  const auto c0 = covariate.index_of(train.from);
  if (!s0 || !c0) {
    throw WindowError("overlay window is outside the data range");
  }
  const double sref = series[*s0];
  const double cref = covariate[*c0];
  std::ostringstream os;
  os << "period,series_pct_change,covariate_pct_change\n";
  for (Period p = train.from;; p = p.next()) {
    const auto si = series.index_of(p);
    const auto ci = covariate.index_of(p);
    if (si && ci) {
      os << p.to_string() << ',' << format_double(100.0 * (series[*si] / sref - 1.0)) << ','
         << format_double(100.0 * (covariate[*ci] / cref - 1.0)) << '\n';
    }
    if (p == eval.to) break;
  }
  return os.str();
}

std::string forecast_csv(const Forecast& fc) {
  std::ostringstream os;
  os << "period,median,lower,upper\n";
  for (std::size_t i = 0; i < fc.horizon(); ++i) {
    os << fc.start.plus(static_cast<std::int64_t>(i)).to_string() << ','
       << format_double(fc.median[i]) << ',' << format_double(fc.lower[i]) << ','
       << format_double(fc.upper[i]) << '\n';
  }
  return os.str();
}

// ---- orchestration ----------------------------------------------------------

struct LoadedData {
  std::map<std::string, TimeSeries> series;

  const TimeSeries& get(const std::string& name) const {
    const auto it = series.find(name);
    if (it == series.end()) {
      throw ConfigError("unknown dataset '" + name + "'");
    }
    return it->second;
  }

  std::vector<TimeSeries> collect(const std::vector<std::string>& names) const {
    std::vector<TimeSeries> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(get(n));
    return out;
  }
};

LoadedData load_all(const RunConfig& config) {
  LoadedData data;
  for (const auto& d : config.datasets) {
    if (!d.url.empty()) {
      FetchOptions opts{.cache_dir = config.cache_dir,
                        .allow_network = config.allow_network,
                        .as_of = "latest"};
      data.series.emplace(d.name, fetch_indicator_csv(d.url, d, opts));
    } else {
      data.series.emplace(d.name, load_series_csv(d));
    }
  }
  return data;
}

// runs fn(i) over every task, possibly on worker threads; the first failure
// (by task index, so deterministically) is rethrown on the caller's thread
template <typename Task, typename Fn>
void parallel_run(const std::vector<Task>& tasks, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(tasks.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

StoredModel read_model_json(const std::filesystem::path& path) {
  std::ifstream input(path);
  if (!input) {
    throw IoError("cannot open model file '" + path.string() + "'");
  }
  json j;
  try {
    input >> j;
    StoredModel m;
    m.order = order_from_json(j.at("order"));
    m.params = params_from_json(j.at("params"));
    m.loglik = j.at("loglik").get<double>();
    m.aic = j.at("aic").get<double>();
    m.k_params = j.at("k_params").get<int>();
    m.std_errors = j.value("std_errors", std::vector<double>{});
    m.exog_p_values = j.value("exog_p_values", std::vector<double>{});
    m.converged = j.value("converged", true);
    return m;
  } catch (const json::exception& e) {
    throw ParseError("model file '" + path.string() + "' is malformed: " + e.what());
  }
}

void fetch_datasets(const RunConfig& config) {
  for (const auto& d : config.datasets) {
    if (d.url.empty()) continue;
    FetchOptions opts{.cache_dir = config.cache_dir,
                      .allow_network = config.allow_network,
                      .as_of = "latest"};
    (void)fetch_indicator_csv(d.url, d, opts);
  }
}

void run_stages(const RunConfig& config, const std::vector<PipelineStage>& stages) {
  config.validate();
  const LoadedData data = load_all(config);
  const auto wants = [&stages](PipelineStage s) {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
  };
  const std::filesystem::path out = config.output_dir;

  // ---- fit ----
  if (wants(PipelineStage::Fit)) {
    std::vector<std::pair<std::string, std::string>> artifacts(config.models.size());
    parallel_run(config.models, config.jobs, [&](std::size_t i) {
          const ModelTask& task = config.models[i];
          const TimeSeries full = data.get(task.series);
          const TimeSeries series =
              task.window ? slice_window(full, task.window->from, task.window->to) : full;
          const auto exog = data.collect(task.exog);
          const FittedModel model = fit(task.order, series, exog);
          json j = model_to_json(model);
          j["name"] = task.name;
          j["series"] = task.series;
          j["exog"] = task.exog;
          try {
            j["backtest"] = metrics_to_json(backtest_with_model(model, config.backtest));
          } catch (const Error& e) {
            j["backtest"] = json{{"unavailable", e.what()}};
          }
          artifacts[i] = {task.name, dump_json(j)};
        });
    for (const auto& [name, content] : artifacts) {
      write_text_file(out / "models" / (name + ".json"), content);
    }
  }

  // ---- select ----
  if (wants(PipelineStage::Select)) {
    for (const auto& task : config.grids) {
      const TimeSeries full = data.get(task.series);
      const TimeSeries series =
          task.window ? slice_window(full, task.window->from, task.window->to) : full;
      const auto exog = data.collect(task.exog);
      const SelectionReport report =
          select_model(task.grid, series, exog, config.backtest, config.jobs);
      json j{{"series", task.series},
             {"adf",
              json{{"statistic", report.adf.statistic},
                   {"p_value", report.adf.p_value},
                   {"lags_used", report.adf.lags_used}}},
             {"recommended_d", report.recommended_d},
             {"order_hints",
              json{{"p", report.hints.p},
                   {"q", report.hints.q},
                   {"P", report.hints.P},
                   {"Q", report.hints.Q}}}};
      j["candidates"] = json::array();
      for (const auto& c : report.ranked) j["candidates"].push_back(candidate_to_json(c));
      j["winner"] = order_to_json(report.winner().order);
      write_text_file(out / "selection" / (task.name + ".json"), dump_json(j));
      write_text_file(out / "selection" / (task.name + ".csv"), selection_csv(report));
    }
  }

  // ---- scenarios ----
  std::map<std::string, ScenarioResult> scenario_results;
  const bool need_scenarios =
      wants(PipelineStage::Scenario) || (wants(PipelineStage::RecoveryPace) && config.recovery_pace);
  if (need_scenarios) {
    std::vector<ScenarioResult> results(config.scenarios.size());
    parallel_run(config.scenarios, config.jobs, [&](std::size_t i) {
          const ScenarioTask& task = config.scenarios[i];
          const TimeSeries& series = data.get(task.series);
          const TimeSeries* covariate =
              task.spec.covariate_name ? &data.get(*task.spec.covariate_name) : nullptr;
          results[i] = run_scenario(task.spec, series, covariate, task.order);
        });
    for (std::size_t i = 0; i < config.scenarios.size(); ++i) {
      scenario_results.emplace(config.scenarios[i].name, std::move(results[i]));
    }
  }

  if (wants(PipelineStage::Scenario)) {
    for (const auto& task : config.scenarios) {
      const ScenarioResult& res = scenario_results.at(task.name);
      const std::filesystem::path dir = out / "scenarios" / task.name;
      const TimeSeries actual_eval =
          slice_window(data.get(task.series), task.spec.eval.from, task.spec.eval.to);
      write_text_file(dir / "projection.csv", projection_csv(actual_eval, res.baseline));
      write_text_file(dir / "impact.csv", impact_csv(res.impact));
      json mj = model_to_json(*res.model);
      mj["name"] = task.name;
      mj["series"] = task.series;
      mj["scenario_kind"] = to_string(task.spec.kind);
      write_text_file(dir / "model.json", dump_json(mj));
      if (res.covariate_model) {
        write_text_file(dir / "covariate_model.json", dump_json(model_to_json(*res.covariate_model)));
      }
      if (res.covariate_projection) {
        write_text_file(dir / "covariate_projection.csv", forecast_csv(*res.covariate_projection));
      }
      if (task.spec.covariate_name) {
        write_text_file(dir / "covariate_overlay.csv",
                        overlay_csv(data.get(task.series), data.get(*task.spec.covariate_name),
                                    task.spec.train, task.spec.eval));
      }
    }
  }

  // ---- recovery pace ----
  if (wants(PipelineStage::RecoveryPace) && config.recovery_pace) {
    const RecoveryPaceConfig& rp = *config.recovery_pace;
    std::vector<std::pair<std::string, ImpactSeries>> impacts;
    for (const auto& name : rp.scenarios) {
      const auto it = std::find_if(config.scenarios.begin(), config.scenarios.end(),
                                   [&name](const ScenarioTask& t) { return t.name == name; });
      impacts.emplace_back(it->series, scenario_results.at(name).impact);
    }
    const auto points = recovery_pace_points(impacts, rp.disruption, rp.recovery);
    std::ostringstream os;
    os << "name,x,y,region\n";
    for (const auto& pt : points) {
      os << pt.name << ',' << format_double(pt.x) << ',' << format_double(pt.y) << ','
         << pt.region << '\n';
    }
    write_text_file(out / "recovery_pace" / "points.csv", os.str());

    const BestFitLine line = best_fit_line(points, rp.exclude_from_best_fit);
    write_text_file(out / "recovery_pace" / "best_fit.json",
                    dump_json(json{{"slope", line.slope},
                                   {"intercept", line.intercept},
                                   {"r2", line.r2},
                                   {"excluded", line.excluded}}));
  }

  // ---- diagnose ----
  if (wants(PipelineStage::Diagnose)) {
    for (const auto& d : config.datasets) {
      const TimeSeries& series = data.get(d.name);
      const std::filesystem::path dir = out / "diagnostics";
      const std::size_t n = series.size();
      json j{{"name", d.name},
             {"n", n},
             {"start", series.start().to_string()},
             {"end", series.end().to_string()},
             {"frequency", to_string(series.frequency())}};
      if (n >= 20) {
        const auto adf_c = adf_test(series.values(), {}, DeterministicTerms::Constant);
        const auto adf_ct = adf_test(series.values(), {}, DeterministicTerms::ConstantTrend);
        j["adf_constant"] = json{{"statistic", adf_c.statistic},
                                 {"p_value", adf_c.p_value},
                                 {"lags_used", adf_c.lags_used}};
        j["adf_constant_trend"] = json{{"statistic", adf_ct.statistic},
                                       {"p_value", adf_ct.p_value},
                                       {"lags_used", adf_ct.lags_used}};
      }
      const int max_lag =
          n >= 6 ? static_cast<int>(std::min<std::size_t>(36, n / 2 - 1)) : 0;
      if (max_lag >= 2) {
        const auto a = acf(series.values(), max_lag);
        const auto p = pacf(series.values(), max_lag);
        std::ostringstream acsv, pcsv;
        acsv << "lag,acf\n";
        for (std::size_t i = 0; i < a.values.size(); ++i) {
          acsv << a.lags[i] << ',' << format_double(a.values[i]) << '\n';
        }
        pcsv << "lag,pacf\n";
        for (std::size_t i = 0; i < p.values.size(); ++i) {
          pcsv << p.lags[i] << ',' << format_double(p.values[i]) << '\n';
        }
        write_text_file(dir / (d.name + "_acf.csv"), acsv.str());
        write_text_file(dir / (d.name + "_pacf.csv"), pcsv.str());
      }
      const int season = series.frequency() == Frequency::Monthly ? 12 : 52;
      if (n >= 2 * static_cast<std::size_t>(season)) {
        const auto dec = classical_decompose(series.values(), season);
        std::ostringstream dcsv;
        dcsv << "period,observed,trend,seasonal,residual\n";
        for (std::size_t i = 0; i < n; ++i) {
          dcsv << series.period_at(i).to_string() << ',' << format_double(series[i]) << ','
               << csv_num(dec.trend[i]) << ',' << format_double(dec.seasonal[i]) << ','
               << csv_num(dec.residual[i]) << '\n';
        }
        write_text_file(dir / (d.name + "_decomposition.csv"), dcsv.str());
        j["decomposition_period"] = season;
      }
      write_text_file(dir / (d.name + ".json"), dump_json(j));
    }
  }
}

void run_pipeline(const RunConfig& config) {
  run_stages(config, {PipelineStage::Fit, PipelineStage::Select, PipelineStage::Scenario,
                      PipelineStage::RecoveryPace, PipelineStage::Diagnose});
}

}  // namespace freightcast
