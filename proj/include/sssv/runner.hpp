#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sssv/analysis.hpp"
#include "sssv/engines.hpp"
#include "sssv/errors.hpp"
#include "sssv/ising.hpp"
#include "sssv/problem_io.hpp"
#include "sssv/schedule.hpp"
#include "sssv/version.hpp"

namespace sssv {

enum class Model { Sssv, Sa };

inline std::string to_string(Model m) { return m == Model::Sssv ? "sssv" : "sa"; }

inline Model parse_model(const std::string& text) {
  if (text == "sssv") return Model::Sssv;
  if (text == "sa") return Model::Sa;
  throw InvalidInput("unknown model '" + text + "' (expected sssv or sa)");
}

/// Either a generated gadget ("gadget:N") or a path to a problem file.
struct ProblemSource {
  std::optional<std::size_t> gadget_cores;
  std::string path;

  static ProblemSource parse(const std::string& text) {
    ProblemSource src;
    const std::string prefix = "gadget:";
    if (text.rfind(prefix, 0) == 0) {
      const std::string digits = text.substr(prefix.size());
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw InvalidInput("bad gadget spec '" + text + "' (expected gadget:N)");
      src.gadget_cores = std::stoul(digits);
    } else {
      if (text.empty()) throw InvalidInput("empty problem source");
      src.path = text;
    }
    return src;
  }

  std::string to_string() const { return gadget_cores ? "gadget:" + std::to_string(*gadget_cores) : path; }

  IsingProblem load() const { return gadget_cores ? make_gadget(*gadget_cores) : load_problem(path); }

  friend bool operator==(const ProblemSource&, const ProblemSource&) = default;
};

inline AnnealSchedule load_schedule_source(const std::string& source) {
  return source == "default" ? default_schedule() : load_schedule_csv(source);
}

/// 0.05, 0.10, ..., 1.00 plus 0.1099 and 0.2834, ascending.
inline std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int k = 1; k <= 20; ++k) a.push_back(k / 20.0);
  a.push_back(0.1099);
  a.push_back(0.2834);
  std::sort(a.begin(), a.end());
  return a;
}

/// Accepts "default", "start:stop:step" (inclusive; values rounded to 12
/// decimals to absorb accumulation error) or a comma-separated list.
inline std::vector<double> parse_alpha_spec(const std::string& text) {
  if (text == "default") return default_alphas();
  auto number = [&](const std::string& cell) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("bad number '" + cell + "' in alpha list '" + text + "'");
    }
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InvalidInput("alpha range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw InvalidInput("alpha range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((start + i * step) * 1e12) / 1e12);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw InvalidInput("alpha list is empty");
  return out;
}

struct ExperimentConfig {
  ProblemSource problem = ProblemSource::parse("gadget:4");
  Model model = Model::Sssv;
  NoiseModel noise{0.24, 0.0};
  std::vector<double> alphas = default_alphas();
  std::uint64_t runs_per_alpha = 10000;
  std::size_t sweeps = 1500;
  double temperature_ghz = 0.22;
  int transverse_sign = -1;
  std::string schedule = "default";
  std::uint64_t base_seed = 0;
  bool freeze_noise = false;
  bool compute_gibbs_distance = false;

  void validate() const {
    noise.validate();
    if (alphas.empty()) throw InvalidInput("config: alphas must not be empty");
    if (alphas.size() >= std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("config: too many alphas");
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw InvalidInput("config: alpha " + std::to_string(a) + " outside [0,1]");
    if (runs_per_alpha == 0) throw InvalidInput("config: runs_per_alpha must be positive");
    if (runs_per_alpha > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("config: runs_per_alpha too large");
    if (sweeps < 2) throw InvalidInput("config: sweeps must be at least 2");
    if (!(std::isfinite(temperature_ghz) && temperature_ghz > 0.0)) throw InvalidInput("config: temperature must be positive");
    if (transverse_sign != 1 && transverse_sign != -1) throw InvalidInput("config: transverse_sign must be +1 or -1");
    if (model == Model::Sa && (noise.sigma_h != 0.0 || noise.sigma_j != 0.0))
      throw InvalidInput("config: calibration noise applies only to the sssv model");
    if (model == Model::Sa && freeze_noise) throw InvalidInput("config: freeze_noise applies only to the sssv model");
  }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.problem == b.problem && a.model == b.model && a.noise.sigma_h == b.noise.sigma_h &&
           a.noise.sigma_j == b.noise.sigma_j && a.alphas == b.alphas && a.runs_per_alpha == b.runs_per_alpha &&
           a.sweeps == b.sweeps && a.temperature_ghz == b.temperature_ghz && a.transverse_sign == b.transverse_sign &&
           a.schedule == b.schedule && a.base_seed == b.base_seed && a.freeze_noise == b.freeze_noise &&
           a.compute_gibbs_distance == b.compute_gibbs_distance;
  }
};

struct SweepRecord {
  double alpha = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t n_isolated = 0;
  std::uint64_t n_clustered = 0;
  std::uint64_t n_excited = 0;
  double p_gs = 0.0;
  std::optional<double> ratio;
  std::optional<double> ratio_ci_low;
  std::optional<double> ratio_ci_high;
  std::optional<double> tv_gibbs;
  std::map<SpinConfig, std::uint64_t> histogram;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct Provenance {
  ExperimentConfig config;
  std::string schedule_name;
  std::string code_version = kVersion;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  Provenance provenance;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Per-run seed: splitmix64(splitmix64(base) + (alpha_index << 32 | run_index)).
/// Both indices must fit in 32 bits; for a fixed base the map is injective
/// because each step is a bijection of 64-bit words.
inline std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t alpha_index, std::uint64_t run_index) {
  if (alpha_index > 0xffffffffULL || run_index > 0xffffffffULL)
    throw InvalidInput("derive_run_seed: indices must fit in 32 bits");
  return detail::splitmix64(detail::splitmix64(base_seed) + ((alpha_index << 32) | run_index));
}

/// Stream index reserved for the experiment-wide noise draw (freeze_noise).
inline constexpr std::uint64_t kFrozenNoiseStream = 0xffffffffULL;

struct RunOptions {
  unsigned workers = 1;  // 0 = hardware concurrency
};

inline SweepResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
  config.validate();
  const IsingProblem problem = config.problem.load();
  if (!problem.is_gadget()) throw InvalidInput("sweep: problem has no core set, so runs cannot be classified");
  if (problem.n_spins() > kMaxEnumerationSpins)
    throw InvalidInput("sweep: ground-space classification needs at most " + std::to_string(kMaxEnumerationSpins) +
                       " spins");
  const AnnealSchedule schedule = load_schedule_source(config.schedule);
  const GroundSpaceInfo ground = enumerate_ground_space(problem);
  if (ground.clustered_count == 0) throw InvalidInput("sweep: problem has no clustered ground states");

  std::optional<NoiseDraw> frozen;
  if (config.freeze_noise) {
    Rng rng(derive_run_seed(config.base_seed, kFrozenNoiseStream, 0));
    frozen = draw_noise(problem, config.noise, rng);
  }

  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, config.runs_per_alpha));
  const double b_final = schedule.evaluate(1.0).b_ghz;

  SweepResult result;
  result.provenance.config = config;
  result.provenance.schedule_name = schedule.name();

  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    RunParams params;
    params.alpha = config.alphas[ai];
    params.sweeps = config.sweeps;
    params.temperature_ghz = config.temperature_ghz;
    params.transverse_sign = config.transverse_sign;

    std::vector<Tally> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
      try {
        for (std::uint64_t r = w; r < config.runs_per_alpha; r += workers) {
          Rng rng(derive_run_seed(config.base_seed, ai, r));
          SpinConfig spins;
          if (config.model == Model::Sa)
            spins = run_sa(problem, schedule, params, rng);
          else if (frozen)
            spins = run_sssv(problem, schedule, params, *frozen, rng).spins;
          else
            spins = run_sssv(problem, schedule, params, config.noise, rng).spins;
          partial[w].add(spins, classify(problem, ground, spins));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    Tally total;
    for (const auto& t : partial) total.merge(t);
    const StatSummary stats = summarize(total, ground.clustered_count);

    SweepRecord rec;
    rec.alpha = params.alpha;
    rec.runs = total.runs;
    rec.n_isolated = total.n_isolated;
    rec.n_clustered = total.n_clustered;
    rec.n_excited = total.n_excited;
    rec.p_gs = stats.p_gs;
    rec.ratio = stats.ratio;
    if (stats.ratio_ci) {
      rec.ratio_ci_low = stats.ratio_ci->lower;
      rec.ratio_ci_high = stats.ratio_ci->upper;
    }
    if (config.compute_gibbs_distance) {
      const auto gibbs = gibbs_distribution(problem, params.alpha, b_final, config.temperature_ghz);
      rec.tv_gibbs = tv_distance(empirical_distribution(total, problem.n_spins()), gibbs);
    }
    rec.histogram = std::move(total.histogram);
    result.records.push_back(std::move(rec));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "alpha,runs,n_isolated,n_clustered,n_excited,p_gs,ratio,ratio_ci_low,ratio_ci_high,tv_gibbs";

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v, const char* missing) {
  return v ? format_real(*v) : std::string(missing);
}

}  // namespace detail

inline void emit_csv(const SweepResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.records) {
    out << detail::format_real(r.alpha) << ',' << r.runs << ',' << r.n_isolated << ',' << r.n_clustered << ','
        << r.n_excited << ',' << detail::format_real(r.p_gs) << ',' << detail::format_optional(r.ratio, "NaN") << ','
        << detail::format_optional(r.ratio_ci_low, "NaN") << ',' << detail::format_optional(r.ratio_ci_high, "NaN")
        << ',' << detail::format_optional(r.tv_gibbs, "") << '\n';
  }
}

inline void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  emit_csv(result, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Reads rows written by emit_csv (histograms are not part of the CSV).
inline std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InvalidInput("sweep csv: missing or unexpected header");
  std::vector<SweepRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 10) throw InvalidInput("sweep csv: expected 10 columns");
    auto real = [](const std::string& c) -> std::optional<double> {
      if (c.empty() || c == "NaN") return std::nullopt;
      return std::stod(c);
    };
    SweepRecord r;
    try {
      r.alpha = std::stod(cells[0]);
      r.runs = std::stoull(cells[1]);
      r.n_isolated = std::stoull(cells[2]);
      r.n_clustered = std::stoull(cells[3]);
      r.n_excited = std::stoull(cells[4]);
      r.p_gs = std::stod(cells[5]);
      r.ratio = real(cells[6]);
      r.ratio_ci_low = real(cells[7]);
      r.ratio_ci_high = real(cells[8]);
      r.tv_gibbs = real(cells[9]);
    } catch (const std::logic_error&) {
      throw InvalidInput("sweep csv: bad number in row '" + line + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"problem", c.problem.to_string()},
          {"model", to_string(c.model)},
          {"sigma_h", c.noise.sigma_h},
          {"sigma_j", c.noise.sigma_j},
          {"alphas", c.alphas},
          {"runs_per_alpha", c.runs_per_alpha},
          {"sweeps", c.sweeps},
          {"temperature_ghz", c.temperature_ghz},
          {"transverse_sign", c.transverse_sign},
          {"schedule", c.schedule},
          {"base_seed", c.base_seed},
          {"freeze_noise", c.freeze_noise},
          {"compute_gibbs_distance", c.compute_gibbs_distance}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.problem = ProblemSource::parse(j.at("problem").get<std::string>());
  c.model = parse_model(j.at("model").get<std::string>());
  c.noise.sigma_h = j.at("sigma_h").get<double>();
  c.noise.sigma_j = j.at("sigma_j").get<double>();
  c.alphas = j.at("alphas").get<std::vector<double>>();
  c.runs_per_alpha = j.at("runs_per_alpha").get<std::uint64_t>();
  c.sweeps = j.at("sweeps").get<std::size_t>();
  c.temperature_ghz = j.at("temperature_ghz").get<double>();
  c.transverse_sign = j.at("transverse_sign").get<int>();
  c.schedule = j.at("schedule").get<std::string>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  c.freeze_noise = j.at("freeze_noise").get<bool>();
  c.compute_gibbs_distance = j.at("compute_gibbs_distance").get<bool>();
  return c;
}

struct JsonOptions {
  bool include_histogram = false;
};

/// Undefined ratios and absent distances are written as null. Histograms
/// (optional) list every observed configuration as a +/- string; their size
/// is bounded by runs_per_alpha entries per alpha.
inline nlohmann::json result_to_json(const SweepResult& result, const JsonOptions& options = {}) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) {
    nlohmann::json rec = {{"alpha", r.alpha},
                          {"runs", r.runs},
                          {"n_isolated", r.n_isolated},
                          {"n_clustered", r.n_clustered},
                          {"n_excited", r.n_excited},
                          {"p_gs", r.p_gs},
                          {"ratio", opt(r.ratio)},
                          {"ratio_ci_low", opt(r.ratio_ci_low)},
                          {"ratio_ci_high", opt(r.ratio_ci_high)},
                          {"tv_gibbs", opt(r.tv_gibbs)}};
    if (options.include_histogram) {
      nlohmann::json hist = nlohmann::json::array();
      for (const auto& [config, count] : r.histogram) hist.push_back({{"config", config.to_string()}, {"count", count}});
      rec["histogram"] = std::move(hist);
    }
    records.push_back(std::move(rec));
  }
  return {{"provenance",
           {{"code_version", result.provenance.code_version},
            {"schedule_name", result.provenance.schedule_name},
            {"config", config_to_json(result.provenance.config)}}},
          {"records", std::move(records)}};
}

inline SweepResult result_from_json(const nlohmann::json& doc) {
  try {
    SweepResult result;
    const auto& prov = doc.at("provenance");
    result.provenance.code_version = prov.at("code_version").get<std::string>();
    result.provenance.schedule_name = prov.at("schedule_name").get<std::string>();
    result.provenance.config = config_from_json(prov.at("config"));
    auto opt = [](const nlohmann::json& v) -> std::optional<double> {
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    for (const auto& rec : doc.at("records")) {
      SweepRecord r;
      r.alpha = rec.at("alpha").get<double>();
      r.runs = rec.at("runs").get<std::uint64_t>();
      r.n_isolated = rec.at("n_isolated").get<std::uint64_t>();
      r.n_clustered = rec.at("n_clustered").get<std::uint64_t>();
      r.n_excited = rec.at("n_excited").get<std::uint64_t>();
      r.p_gs = rec.at("p_gs").get<double>();
      r.ratio = opt(rec.at("ratio"));
      r.ratio_ci_low = opt(rec.at("ratio_ci_low"));
      r.ratio_ci_high = opt(rec.at("ratio_ci_high"));
      r.tv_gibbs = opt(rec.at("tv_gibbs"));
      if (rec.contains("histogram")) {
        for (const auto& entry : rec["histogram"]) {
          const auto text = entry.at("config").get<std::string>();
          std::vector<std::int8_t> spins;
          for (char ch : text) {
            if (ch != '+' && ch != '-') throw InvalidInput("sweep json: bad histogram config '" + text + "'");
            spins.push_back(ch == '+' ? 1 : -1);
          }
          r.histogram[SpinConfig(std::move(spins))] = entry.at("count").get<std::uint64_t>();
        }
      }
      result.records.push_back(std::move(r));
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sweep json: ") + e.what());
  }
}

inline void emit_json(const SweepResult& result, std::ostream& out, const JsonOptions& options = {}) {
  out << result_to_json(result, options).dump(2) << '\n';
}

inline void emit_json(const SweepResult& result, const std::string& path, const JsonOptions& options = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  emit_json(result, out, options);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline SweepResult load_sweep_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("sweep json '" + path + "': " + e.what());
  }
  return result_from_json(doc);
}

}  // namespace sssv
