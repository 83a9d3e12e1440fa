#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sssv/errors.hpp"
#include "sssv/ising.hpp"

namespace sssv {

/// Outcome counts for a batch of runs. Tallies merge by component-wise
/// addition, so batches can be combined in any grouping.
struct Tally {
  std::uint64_t runs = 0;
  std::uint64_t n_isolated = 0;
  std::uint64_t n_clustered = 0;
  std::uint64_t n_excited = 0;
  std::map<SpinConfig, std::uint64_t> histogram;

  void add(const SpinConfig& config, GroundClass cls) {
    ++runs;
    switch (cls) {
      case GroundClass::Isolated: ++n_isolated; break;
      case GroundClass::Clustered: ++n_clustered; break;
      case GroundClass::Excited: ++n_excited; break;
    }
    ++histogram[config];
  }

  Tally& merge(const Tally& other) {
    runs += other.runs;
    n_isolated += other.n_isolated;
    n_clustered += other.n_clustered;
    n_excited += other.n_excited;
    for (const auto& [config, count] : other.histogram) histogram[config] += count;
    return *this;
  }

  friend bool operator==(const Tally&, const Tally&) = default;
};

inline Tally tally(const IsingProblem& problem, const GroundSpaceInfo& info, std::span<const SpinConfig> configs) {
  if (configs.empty()) throw InvalidInput("tally: no configurations");
  Tally t;
  for (const auto& c : configs) t.add(c, classify(problem, info, c));
  return t;
}

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// 95% Wilson score interval for k successes out of n trials.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n) {
  constexpr double z = 1.959963984540054;
  if (n == 0) throw InvalidInput("wilson_interval: zero trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

struct StatSummary {
  double p_gs = 0.0;
  double p_isolated = 0.0;
  double p_clustered_per_state = 0.0;
  std::optional<double> ratio;          // P_I / P_C; empty when no clustered hit
  std::optional<Interval> ratio_ci;     // empty together with ratio
};

/// P_I, P_C (per clustered state) and their ratio. The ratio interval
/// combines the two marginal Wilson intervals, [C*lo_I/hi_C, C*hi_I/lo_C],
/// which treats the two counts as independent and is therefore approximate.
inline StatSummary summarize(const Tally& t, std::size_t clustered_count) {
  if (t.runs == 0) throw InvalidInput("summarize: no runs");
  if (clustered_count == 0) throw InvalidInput("summarize: clustered_count must be positive");
  const double runs = static_cast<double>(t.runs);
  const double cc = static_cast<double>(clustered_count);
  StatSummary s;
  s.p_gs = static_cast<double>(t.n_isolated + t.n_clustered) / runs;
  s.p_isolated = static_cast<double>(t.n_isolated) / runs;
  s.p_clustered_per_state = static_cast<double>(t.n_clustered) / runs / cc;
  if (t.n_clustered > 0) {
    s.ratio = s.p_isolated / s.p_clustered_per_state;
    const auto iso = wilson_interval(t.n_isolated, t.runs);
    const auto clu = wilson_interval(t.n_clustered, t.runs);
    s.ratio_ci = Interval{cc * iso.lower / clu.upper, cc * iso.upper / clu.lower};
  }
  return s;
}

/// Boltzmann distribution of alpha * b_final * H_f at temperature T, indexed
/// like SpinConfig::from_index.
inline std::vector<double> gibbs_distribution(const IsingProblem& problem, double alpha, double b_final_ghz,
                                              double temperature_ghz) {
  const std::size_t n = problem.n_spins();
  if (n > kMaxEnumerationSpins) throw InvalidInput("gibbs_distribution: problem too large to enumerate");
  if (!(temperature_ghz > 0.0)) throw InvalidInput("gibbs_distribution: temperature must be positive");
  const std::uint64_t total = std::uint64_t{1} << n;
  const double beta = alpha * b_final_ghz / temperature_ghz;

  std::vector<double> logw(total);
  const auto h = problem.fields();
  const auto j = problem.couplings();
  double top = -INFINITY;
  for (std::uint64_t k = 0; k < total; ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e -= ((k >> i) & 1u) ? h[i] : -h[i];
    for (const auto& c : j) e -= (((k >> c.i) ^ (k >> c.j)) & 1u) ? -c.value : c.value;
    logw[k] = beta == 0.0 ? 0.0 : -beta * e;
    top = std::max(top, logw[k]);
  }
  long double z = 0.0L;
  for (auto& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (auto& w : logw) w = static_cast<double>(w / z);
  return logw;
}

/// Half the L1 distance; equals the trace-norm distance for diagonal states.
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidInput("tv_distance: length mismatch");
  auto check = [](std::span<const double> v, const char* name) {
    long double sum = 0.0L;
    for (double x : v) {
      if (!(x >= 0.0)) throw InvalidInput(std::string("tv_distance: negative or NaN entry in ") + name);
      sum += x;
    }
    if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9)
      throw InvalidInput(std::string("tv_distance: ") + name + " does not sum to 1");
  };
  check(p, "p");
  check(q, "q");
  long double d = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(static_cast<long double>(p[i]) - q[i]);
  return std::min(1.0, static_cast<double>(d / 2));
}

inline std::vector<double> empirical_distribution(const Tally& t, std::size_t n_spins) {
  if (n_spins > kMaxEnumerationSpins) throw InvalidInput("empirical_distribution: problem too large to enumerate");
  if (t.runs == 0) throw InvalidInput("empirical_distribution: no runs");
  std::vector<double> p(std::size_t{1} << n_spins, 0.0);
  for (const auto& [config, count] : t.histogram) {
    if (config.size() != n_spins) throw InvalidInput("empirical_distribution: histogram entry has wrong length");
    p[config.to_index()] = static_cast<double>(count) / static_cast<double>(t.runs);
  }
  return p;
}

}  // namespace sssv
