#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "freightcast/format.hpp"
#include "freightcast/pipeline.hpp"
#include "helpers.hpp"

using namespace freightcast;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("freightcast-pipe-" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// relative path -> content for every regular file under root
std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> tree;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      tree.emplace(fs::relative(entry.path(), root).generic_string(), read_file(entry.path()));
    }
  }
  return tree;
}

void write_series_csv(const fs::path& path, const TimeSeries& series, const std::string& datecol,
                      const std::string& valcol) {
  std::ofstream out(path);
  out << datecol << ',' << valcol << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.period_at(i).to_string() << ',' << format_double(series[i]) << '\n';
  }
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (const double v : {0.1, 1.0 / 3.0, 123456.789, -2.5e-8, 7.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(20.0) == "20");
}

TEST_CASE("config parsing and validation") {
  SUBCASE("invalid json") {
    CHECK_THROWS_AS(RunConfig::from_json_text("{not json", "."), ConfigError);
  }
  SUBCASE("missing dataset reference is caught before any work") {
    const std::string text = R"({
      "datasets": [{"name": "a", "path": "a.csv"}],
      "models": [{"series": "missing", "order": {"p": 1}}]
    })";
    CHECK_THROWS_AS(RunConfig::from_json_text(text, "."), ConfigError);
  }
  SUBCASE("scenario covariate reference is checked") {
    const std::string text = R"({
      "datasets": [{"name": "a", "path": "a.csv"}],
      "scenarios": [{"name": "s", "series": "a", "kind": "covariate_adapted_trend",
                     "covariate": "nope", "order": {"d": 1},
                     "train": ["2012-01", "2019-12"], "eval": ["2020-01", "2020-12"]}]
    })";
    CHECK_THROWS_AS(RunConfig::from_json_text(text, "."), ConfigError);
  }
  SUBCASE("dataset needs exactly one source") {
    CHECK_THROWS_AS(
        RunConfig::from_json_text(R"({"datasets": [{"name": "a"}]})", "."), ConfigError);
  }
}

TEST_CASE("missing dataset file fails before any output is written") {
  TempDir tmp("missing");
  const std::string text = R"({
    "output_dir": "out",
    "datasets": [{"name": "a", "path": "absent.csv"}],
    "models": [{"series": "a", "order": {"p": 1}}]
  })";
  const RunConfig config = RunConfig::from_json_text(text, tmp.path);
  CHECK_THROWS_AS(run_pipeline(config), IoError);
  CHECK_FALSE(fs::exists(tmp.path / "out"));
}

TEST_CASE("model report round-trips through json") {
  TempDir tmp("roundtrip");
  ModelOrder order{.p = 1, .d = 0, .q = 1, .with_intercept = true};
  ParamVector truth;
  truth.ar = {0.55};
  truth.ma = {-0.3};
  truth.intercept = 4.0;
  truth.sigma2 = 1.0;
  const auto data = simulate(order, truth, 300, 17);
  write_series_csv(tmp.path / "a.csv", data, "date", "value");

  const std::string text = R"({
    "output_dir": "out",
    "datasets": [{"name": "a", "path": "a.csv"}],
    "models": [{"name": "m", "series": "a", "order": {"p": 1, "q": 1, "with_intercept": true}}]
  })";
  const RunConfig config = RunConfig::from_json_text(text, tmp.path);
  run_stages(config, {PipelineStage::Fit});

  const fs::path model_path = tmp.path / "out" / "models" / "m.json";
  REQUIRE(fs::exists(model_path));
  const StoredModel stored = read_model_json(model_path);

  const FittedModel refit = fit(order, data);
  CHECK(stored.params.ar[0] == refit.params.ar[0]);  // exact decimal round-trip
  CHECK(stored.params.ma[0] == refit.params.ma[0]);
  CHECK(stored.params.sigma2 == refit.params.sigma2);
  CHECK(*stored.params.intercept == *refit.params.intercept);
  CHECK(stored.loglik == refit.loglik);
  CHECK(stored.aic == refit.aic);
  CHECK(stored.k_params == 4);
  REQUIRE(stored.std_errors.size() == refit.std_errors.size());
  for (std::size_t i = 0; i < stored.std_errors.size(); ++i) {
    CHECK(stored.std_errors[i] == refit.std_errors[i]);
  }
}

TEST_CASE("demo pipeline is deterministic and matches the committed golden tree") {
  const fs::path source_dir = FREIGHTCAST_SOURCE_DIR;
  const RunConfig base = RunConfig::from_json_file(source_dir / "demo" / "config.json");

  TempDir run1("golden-a");
  TempDir run2("golden-b");
  RunConfig c1 = base;
  c1.output_dir = run1.path / "out";
  RunConfig c2 = base;
  c2.output_dir = run2.path / "out";

  run_pipeline(c1);
  run_pipeline(c2);

  const auto tree1 = snapshot_tree(c1.output_dir);
  const auto tree2 = snapshot_tree(c2.output_dir);
  REQUIRE_FALSE(tree1.empty());
  CHECK(tree1 == tree2);

  const fs::path golden_root = source_dir / "tests" / "golden" / "demo";
  REQUIRE(fs::exists(golden_root));
  const auto golden = snapshot_tree(golden_root);
  REQUIRE(golden.size() == tree1.size());
  for (const auto& [rel, content] : golden) {
    INFO("golden file: ", rel);
    const auto it = tree1.find(rel);
    REQUIRE(it != tree1.end());
    CHECK(it->second == content);
  }
}

TEST_CASE("recovery pace artifacts reflect the demo design") {
  const fs::path source_dir = FREIGHTCAST_SOURCE_DIR;
  const fs::path points = source_dir / "tests" / "golden" / "demo" / "recovery_pace" / "points.csv";
  REQUIRE(fs::exists(points));
  const std::string content = read_file(points);
  // one row per component plus the header
  CHECK(std::count(content.begin(), content.end(), '\n') == 6);
  CHECK(content.find("im,") != std::string::npos);
  CHECK(content.find(",B") != std::string::npos);
  CHECK(content.find(",D") != std::string::npos);
}

#ifdef FREIGHTCAST_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FREIGHTCAST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli exit codes") {
  TempDir tmp("cli");
  CHECK(run_cli("fit") == 2);  // --config is required
  CHECK(run_cli("definitely-not-a-command") == 2);
  CHECK(run_cli("fit --config " + (tmp.path / "absent.json").string()) == 2);

  // config error: dangling series reference
  std::ofstream(tmp.path / "bad_ref.json") << R"({
    "datasets": [{"name": "a", "path": "a.csv"}],
    "models": [{"series": "missing", "order": {"p": 1}}]
  })";
  CHECK(run_cli("fit --config " + (tmp.path / "bad_ref.json").string()) == 2);

  // data error: dataset file absent; nothing may be written
  std::ofstream(tmp.path / "no_data.json") << R"({
    "output_dir": "out",
    "datasets": [{"name": "a", "path": "absent.csv"}],
    "models": [{"series": "a", "order": {"p": 1}}]
  })";
  CHECK(run_cli("fit --config " + (tmp.path / "no_data.json").string()) == 3);
  CHECK_FALSE(fs::exists(tmp.path / "out"));

  // a healthy miniature run
  {
    ModelOrder order{.p = 1, .with_intercept = true};
    ParamVector truth;
    truth.ar = {0.5};
    truth.intercept = 20.0;
    truth.sigma2 = 1.0;
    write_series_csv(tmp.path / "a.csv", simulate(order, truth, 200, 99), "date", "value");
  }
  std::ofstream(tmp.path / "ok.json") << R"({
    "output_dir": "out",
    "datasets": [{"name": "a", "path": "a.csv"}],
    "models": [{"series": "a", "order": {"p": 1, "with_intercept": true}}]
  })";
  CHECK(run_cli("fit --config " + (tmp.path / "ok.json").string()) == 0);
  CHECK(fs::exists(tmp.path / "out" / "models" / "a.json"));
}
#endif  // FREIGHTCAST_CLI_PATH
