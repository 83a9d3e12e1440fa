#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <unordered_set>

#include "sssv/runner.hpp"

using namespace sssv;
using Catch::Approx;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.problem = ProblemSource::parse("gadget:3");
  c.alphas = {0.1, 0.5};
  c.runs_per_alpha = 120;
  c.sweeps = 60;
  c.base_seed = 7;
  return c;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "sssv_test_runner";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("derive_run_seed", "[runner][seed]") {
  SECTION("no collisions over a large index grid") {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1 << 21);
    for (std::uint64_t a = 0; a < 40; ++a)
      for (std::uint64_t r = 0; r < 25000; ++r) seen.insert(derive_run_seed(0, a, r));
    CHECK(seen.size() == 40 * 25000);
  }

  SECTION("deterministic and sensitive to the base") {
    CHECK(derive_run_seed(42, 3, 9) == derive_run_seed(42, 3, 9));
    CHECK(derive_run_seed(42, 3, 9) != derive_run_seed(43, 3, 9));
    CHECK(derive_run_seed(42, 3, 9) != derive_run_seed(42, 9, 3));
    CHECK(derive_run_seed(0, kFrozenNoiseStream, 0) != derive_run_seed(0, 0, 0));
  }

  SECTION("indices must fit in 32 bits") {
    CHECK_THROWS_AS(derive_run_seed(0, 1ULL << 32, 0), InvalidInput);
    CHECK_THROWS_AS(derive_run_seed(0, 0, 1ULL << 32), InvalidInput);
  }
}

TEST_CASE("alpha specifications", "[runner][config]") {
  const auto range = parse_alpha_spec("0.05:1.0:0.05");
  REQUIRE(range.size() == 20);
  CHECK(range.front() == 0.05);
  CHECK(range.back() == 1.0);
  CHECK(range[2] == 0.15);

  CHECK(parse_alpha_spec("0.1099,0.2834") == std::vector<double>{0.1099, 0.2834});
  CHECK(parse_alpha_spec("default") == default_alphas());
  CHECK(default_alphas().size() == 22);
  const auto defaults = default_alphas();
  CHECK(std::is_sorted(defaults.begin(), defaults.end()));

  CHECK_THROWS_AS(parse_alpha_spec("0.1:x:0.1"), InvalidInput);
  CHECK_THROWS_AS(parse_alpha_spec("0.1:0.2"), InvalidInput);
  CHECK_THROWS_AS(parse_alpha_spec("0.5:0.1:0.1"), InvalidInput);
  CHECK_THROWS_AS(parse_alpha_spec("0.1,,0.2"), InvalidInput);
}

TEST_CASE("problem sources and models", "[runner][config]") {
  CHECK(ProblemSource::parse("gadget:6").load().n_spins() == 12);
  CHECK(ProblemSource::parse("gadget:6").to_string() == "gadget:6");
  CHECK(ProblemSource::parse("some/file.json").path == "some/file.json");
  CHECK_THROWS_AS(ProblemSource::parse("gadget:"), InvalidInput);
  CHECK_THROWS_AS(ProblemSource::parse("gadget:x4"), InvalidInput);
  CHECK_THROWS_AS(ProblemSource::parse("gadget:2").load(), InvalidInput);
  CHECK_THROWS_AS(ProblemSource::parse("/nonexistent/p.json").load(), IoError);
  CHECK(parse_model("sa") == Model::Sa);
  CHECK_THROWS_AS(parse_model("qa"), InvalidInput);
}

TEST_CASE("config validation", "[runner][config]") {
  CHECK_NOTHROW(ExperimentConfig{}.validate());
  auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.alphas = {}; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.alphas = {1.2}; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.runs_per_alpha = 0; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.sweeps = 1; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.temperature_ghz = 0.0; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.transverse_sign = 0; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.noise.sigma_h = -1.0; }).validate(), InvalidInput);
  CHECK_THROWS_AS(bad([](auto& c) { c.model = Model::Sa; }).validate(), InvalidInput);  // default noise is on
  CHECK_NOTHROW(bad([](auto& c) {
                  c.model = Model::Sa;
                  c.noise = {};
                }).validate());
}

TEST_CASE("run_experiment", "[runner][sweep]") {
  const auto config = small_config();
  const auto serial = run_experiment(config);

  SECTION("records are consistent") {
    REQUIRE(serial.records.size() == 2);
    for (const auto& r : serial.records) {
      CHECK(r.runs == 120);
      CHECK(r.n_isolated + r.n_clustered + r.n_excited == r.runs);
      CHECK(r.p_gs == Approx(static_cast<double>(r.n_isolated + r.n_clustered) / r.runs));
      std::uint64_t total = 0;
      for (const auto& [c, n] : r.histogram) total += n;
      CHECK(total == r.runs);
      CHECK_FALSE(r.tv_gibbs);
    }
    CHECK(serial.provenance.config == config);
    CHECK(serial.provenance.schedule_name == default_schedule().name());
    CHECK(serial.provenance.code_version == kVersion);
  }

  SECTION("worker count does not change the result") {
    for (unsigned w : {2u, 3u, 7u}) CHECK(run_experiment(config, RunOptions{w}) == serial);
  }

  SECTION("seed changes the result") {
    auto other = config;
    other.base_seed = 8;
    CHECK_FALSE(run_experiment(other).records == serial.records);
  }

  SECTION("frozen noise and the gibbs distance") {
    auto frozen = config;
    frozen.freeze_noise = true;
    frozen.compute_gibbs_distance = true;
    const auto a = run_experiment(frozen);
    CHECK(a == run_experiment(frozen, RunOptions{2}));
    for (const auto& r : a.records) {
      REQUIRE(r.tv_gibbs);
      CHECK(*r.tv_gibbs >= 0.0);
      CHECK(*r.tv_gibbs <= 1.0);
    }
  }

  SECTION("sa model") {
    auto sa = config;
    sa.model = Model::Sa;
    sa.noise = {};
    CHECK(run_experiment(sa).records.size() == 2);
  }

  SECTION("problems without a core set are rejected") {
    const auto path = (scratch_dir() / "plain.json").string();
    save_problem(IsingProblem(2, {1.0, 1.0}, {{0, 1, 1.0}}), path);
    auto plain = config;
    plain.problem = ProblemSource::parse(path);
    CHECK_THROWS_AS(run_experiment(plain), InvalidInput);
  }
}

TEST_CASE("csv output", "[runner][io]") {
  SweepResult result;
  SweepRecord a;
  a.alpha = 0.1;
  a.runs = 10;
  a.n_isolated = 1;
  a.n_clustered = 4;
  a.n_excited = 5;
  a.p_gs = 0.5;
  a.ratio = 2.0 / 3.0;
  a.ratio_ci_low = 0.01;
  a.ratio_ci_high = 9.5;
  SweepRecord b = a;
  b.alpha = 0.2834;
  b.n_clustered = 0;
  b.n_excited = 9;
  b.p_gs = 0.1;
  b.ratio.reset();
  b.ratio_ci_low.reset();
  b.ratio_ci_high.reset();
  b.tv_gibbs = 0.125;
  result.records = {a, b};

  std::ostringstream out;
  emit_csv(result, out);
  const std::string text = out.str();
  std::istringstream lines(text);
  std::string header, row_a, row_b;
  std::getline(lines, header);
  std::getline(lines, row_a);
  std::getline(lines, row_b);
  CHECK(header == "alpha,runs,n_isolated,n_clustered,n_excited,p_gs,ratio,ratio_ci_low,ratio_ci_high,tv_gibbs");
  CHECK(row_a.back() == ',');
  CHECK(row_b.find(",NaN,NaN,NaN,0.125") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_sweep_csv(in);
  REQUIRE(back.size() == 2);
  auto strip = [](SweepRecord r) {
    r.histogram.clear();
    return r;
  };
  CHECK(back[0] == strip(a));
  CHECK(back[1] == strip(b));
  CHECK(*back[0].ratio == 2.0 / 3.0);  // 17 significant digits round-trip exactly

  std::istringstream broken("alpha,runs\n");
  CHECK_THROWS_AS(read_sweep_csv(broken), InvalidInput);
  CHECK_THROWS_AS(emit_csv(result, std::string("/nonexistent/dir/out.csv")), IoError);
}

TEST_CASE("json output", "[runner][io]") {
  auto config = small_config();
  config.compute_gibbs_distance = true;
  const auto result = run_experiment(config);

  SECTION("round trip with histograms") {
    const auto back = result_from_json(result_to_json(result, {true}));
    CHECK(back == result);
  }

  SECTION("round trip without histograms drops only the histograms") {
    auto expected = result;
    for (auto& r : expected.records) r.histogram.clear();
    const auto path = (scratch_dir() / "sweep.json").string();
    emit_json(result, path);
    CHECK(load_sweep_json(path) == expected);
  }

  SECTION("provenance carries the full configuration") {
    const auto doc = result_to_json(result);
    CHECK(doc["provenance"]["config"]["sweeps"] == 60);
    CHECK(doc["provenance"]["config"]["model"] == "sssv");
    CHECK(doc["provenance"]["code_version"] == kVersion);
    CHECK(config_to_json(ExperimentConfig{})["sweeps"] == 1500);
    CHECK(config_from_json(config_to_json(config)) == config);
  }

  SECTION("undefined values are null") {
    SweepResult r;
    r.records.push_back(SweepRecord{});
    const auto doc = result_to_json(r);
    CHECK(doc["records"][0]["ratio"].is_null());
    CHECK(doc["records"][0]["tv_gibbs"].is_null());
  }

  SECTION("malformed documents") {
    CHECK_THROWS_AS(result_from_json(nlohmann::json::object()), InvalidInput);
    CHECK_THROWS_AS(load_sweep_json("/nonexistent/sweep.json"), IoError);
  }
}
