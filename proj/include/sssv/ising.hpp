#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sssv/errors.hpp"

namespace sssv {

/// Largest problem the exhaustive routines (ground space, Gibbs) accept.
inline constexpr std::size_t kMaxEnumerationSpins = 24;

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

/// Adjacency entry: the other spin and the index of the shared coupling.
struct Neighbor {
  std::size_t spin = 0;
  std::size_t edge = 0;
};

/// A configuration of N binary spins, each -1 or +1.
struct SpinConfig {
  std::vector<std::int8_t> spins;

  SpinConfig() = default;
  explicit SpinConfig(std::vector<std::int8_t> s) : spins(std::move(s)) {}

  static SpinConfig filled(std::size_t n, std::int8_t value) {
    return SpinConfig(std::vector<std::int8_t>(n, value));
  }

  /// Bit i of `index` set means spin i is +1.
  static SpinConfig from_index(std::size_t n, std::uint64_t index) {
    std::vector<std::int8_t> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = ((index >> i) & 1u) ? 1 : -1;
    return SpinConfig(std::move(s));
  }

  std::uint64_t to_index() const {
    if (spins.size() > 64) throw InvalidInput("SpinConfig::to_index: more than 64 spins");
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < spins.size(); ++i)
      if (spins[i] > 0) index |= std::uint64_t{1} << i;
    return index;
  }

  std::size_t size() const { return spins.size(); }
  std::int8_t operator[](std::size_t i) const { return spins[i]; }

  std::string to_string() const {
    std::string out;
    out.reserve(spins.size());
    for (auto s : spins) out.push_back(s > 0 ? '+' : '-');
    return out;
  }

  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;
  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
};

/// Final (problem) Hamiltonian H = -sum_i h_i s_i - sum_{i<j} J_ij s_i s_j.
///
/// Couplings are stored with i < j and sorted by (i, j). When a core set is
/// given the problem must have the gadget structure: half the spins are core,
/// each core spin has two core neighbours and one peripheral neighbour, and
/// every peripheral spin has degree one.
class IsingProblem {
 public:
  IsingProblem() = default;

  IsingProblem(std::size_t n_spins, std::vector<double> fields, std::vector<Coupling> couplings,
               std::optional<std::vector<std::size_t>> core = std::nullopt)
      : n_(n_spins), fields_(std::move(fields)), couplings_(std::move(couplings)) {
    if (n_ == 0) throw InvalidInput("IsingProblem: n_spins must be positive");
    if (fields_.size() != n_) throw InvalidInput("IsingProblem: fields length does not match n_spins");
    for (double h : fields_)
      if (!std::isfinite(h)) throw InvalidInput("IsingProblem: non-finite field");

    for (auto& c : couplings_) {
      if (c.i >= n_ || c.j >= n_) throw InvalidInput("IsingProblem: coupling index out of range");
      if (c.i == c.j) throw InvalidInput("IsingProblem: self-coupling on spin " + std::to_string(c.i));
      if (!std::isfinite(c.value)) throw InvalidInput("IsingProblem: non-finite coupling");
      if (c.i > c.j) std::swap(c.i, c.j);
    }
    std::sort(couplings_.begin(), couplings_.end(),
              [](const Coupling& a, const Coupling& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t e = 1; e < couplings_.size(); ++e) {
      if (couplings_[e].i == couplings_[e - 1].i && couplings_[e].j == couplings_[e - 1].j)
        throw InvalidInput("IsingProblem: duplicate coupling (" + std::to_string(couplings_[e].i) + "," +
                           std::to_string(couplings_[e].j) + ")");
    }

    adjacency_offsets_.assign(n_ + 1, 0);
    for (const auto& c : couplings_) {
      ++adjacency_offsets_[c.i + 1];
      ++adjacency_offsets_[c.j + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) adjacency_offsets_[i + 1] += adjacency_offsets_[i];
    adjacency_.resize(adjacency_offsets_[n_]);
    std::vector<std::size_t> cursor(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
    for (std::size_t e = 0; e < couplings_.size(); ++e) {
      adjacency_[cursor[couplings_[e].i]++] = {couplings_[e].j, e};
      adjacency_[cursor[couplings_[e].j]++] = {couplings_[e].i, e};
    }

    if (core) {
      auto set = *core;
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw InvalidInput("IsingProblem: duplicate core index");
      for (auto c : set)
        if (c >= n_) throw InvalidInput("IsingProblem: core index out of range");
      core_ = std::move(set);
      check_gadget_structure();
    }
  }

  std::size_t n_spins() const { return n_; }
  std::span<const double> fields() const { return fields_; }
  std::span<const Coupling> couplings() const { return couplings_; }
  const std::optional<std::vector<std::size_t>>& core_set() const { return core_; }
  bool is_gadget() const { return core_.has_value(); }

  bool is_core(std::size_t spin) const {
    return core_ && std::binary_search(core_->begin(), core_->end(), spin);
  }

  std::span<const Neighbor> neighbors(std::size_t spin) const {
    return std::span<const Neighbor>(adjacency_).subspan(adjacency_offsets_[spin],
                                                        adjacency_offsets_[spin + 1] - adjacency_offsets_[spin]);
  }

 private:
  void check_gadget_structure() const {
    if (2 * core_->size() != n_) throw InvalidInput("IsingProblem: core set must contain exactly half the spins");
    for (std::size_t s = 0; s < n_; ++s) {
      std::size_t core_nb = 0, periph_nb = 0;
      for (const auto& nb : neighbors(s)) (is_core(nb.spin) ? core_nb : periph_nb)++;
      if (is_core(s)) {
        if (core_nb != 2 || periph_nb != 1)
          throw InvalidInput("IsingProblem: core spin " + std::to_string(s) +
                             " needs two core neighbours and one peripheral neighbour");
      } else if (core_nb + periph_nb != 1) {
        throw InvalidInput("IsingProblem: peripheral spin " + std::to_string(s) + " must have degree one");
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<double> fields_;
  std::vector<Coupling> couplings_;
  std::optional<std::vector<std::size_t>> core_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<Neighbor> adjacency_;
};

inline double energy(const IsingProblem& problem, const SpinConfig& config) {
  if (config.size() != problem.n_spins())
    throw InvalidInput("energy: config has " + std::to_string(config.size()) + " spins, problem has " +
                       std::to_string(problem.n_spins()));
  double e = 0.0;
  const auto h = problem.fields();
  for (std::size_t i = 0; i < h.size(); ++i) e -= h[i] * config[i];
  for (const auto& c : problem.couplings()) e -= c.value * config[c.i] * config[c.j];
  return e;
}

/// Ring of `n_core` core spins (h = +1) with one pendant peripheral spin
/// (h = -1) per core spin; every edge ferromagnetic with J = 1. Core spins are
/// 0..n_core-1, peripheral spin n_core+i hangs off core spin i.
inline IsingProblem make_gadget(std::size_t n_core) {
  if (n_core < 3) throw InvalidInput("make_gadget: need at least 3 core spins");
  const std::size_t n = 2 * n_core;
  std::vector<double> h(n);
  std::vector<Coupling> j;
  std::vector<std::size_t> core(n_core);
  for (std::size_t i = 0; i < n_core; ++i) {
    h[i] = 1.0;
    h[n_core + i] = -1.0;
    core[i] = i;
    j.push_back({i, (i + 1) % n_core, 1.0});
    j.push_back({i, n_core + i, 1.0});
  }
  return IsingProblem(n, std::move(h), std::move(j), std::move(core));
}

struct GroundSpaceInfo {
  double ground_energy = 0.0;
  std::vector<SpinConfig> ground_states;  // sorted
  std::optional<SpinConfig> isolated;
  std::size_t clustered_count = 0;

  std::size_t degeneracy() const { return ground_states.size(); }
  bool contains(const SpinConfig& c) const {
    return std::binary_search(ground_states.begin(), ground_states.end(), c);
  }
};

/// Exhaustive search over all 2^N configurations. Energies within
/// 1e-9 * max(1, |E_min|) of the minimum count as degenerate.
inline GroundSpaceInfo enumerate_ground_space(const IsingProblem& problem) {
  const std::size_t n = problem.n_spins();
  if (n > kMaxEnumerationSpins)
    throw InvalidInput("enumerate_ground_space: " + std::to_string(n) + " spins exceeds the enumeration limit of " +
                       std::to_string(kMaxEnumerationSpins));

  const std::uint64_t total = std::uint64_t{1} << n;
  const auto h = problem.fields();
  const auto j = problem.couplings();
  auto energy_of = [&](std::uint64_t k) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e -= ((k >> i) & 1u) ? h[i] : -h[i];
    for (const auto& c : j) e -= (((k >> c.i) ^ (k >> c.j)) & 1u) ? -c.value : c.value;
    return e;
  };

  double best = INFINITY;
  for (std::uint64_t k = 0; k < total; ++k) best = std::min(best, energy_of(k));

  GroundSpaceInfo info;
  info.ground_energy = best;
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  for (std::uint64_t k = 0; k < total; ++k)
    if (energy_of(k) <= best + tol) info.ground_states.push_back(SpinConfig::from_index(n, k));
  std::sort(info.ground_states.begin(), info.ground_states.end());

  if (problem.is_gadget()) {
    const auto all_down = SpinConfig::filled(n, -1);
    if (info.contains(all_down)) info.isolated = all_down;
    for (const auto& g : info.ground_states) {
      bool core_up = true;
      for (auto c : *problem.core_set()) core_up = core_up && g[c] > 0;
      if (core_up && g != all_down) ++info.clustered_count;
    }
  }
  return info;
}

enum class GroundClass { Isolated, Clustered, Excited };

inline const char* to_string(GroundClass c) {
  switch (c) {
    case GroundClass::Isolated: return "isolated";
    case GroundClass::Clustered: return "clustered";
    case GroundClass::Excited: return "excited";
  }
  return "?";
}

inline GroundClass classify(const IsingProblem& problem, const GroundSpaceInfo& info, const SpinConfig& config) {
  if (config.size() != problem.n_spins()) throw InvalidInput("classify: dimension mismatch");
  if (!problem.is_gadget()) throw InvalidInput("classify: problem has no core set");
  if (!info.contains(config)) return GroundClass::Excited;
  if (info.isolated && *info.isolated == config) return GroundClass::Isolated;
  return GroundClass::Clustered;
}

}  // namespace sssv
