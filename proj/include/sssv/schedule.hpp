#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sssv/errors.hpp"

namespace sssv {

struct ScheduleNode {
  double s = 0.0;
  double a_ghz = 0.0;
  double b_ghz = 0.0;
};

struct SchedulePoint {
  double a_ghz = 0.0;
  double b_ghz = 0.0;
};

/// Tabulated annealing envelopes A(s), B(s) in GHz over normalized time
/// s in [0, 1], interpolated piecewise-linearly.
class AnnealSchedule {
 public:
  AnnealSchedule() = default;

  AnnealSchedule(std::vector<ScheduleNode> nodes, std::string name) : nodes_(std::move(nodes)), name_(std::move(name)) {
    if (nodes_.size() < 2) throw InvalidInput("AnnealSchedule: need at least two nodes");
    if (nodes_.front().s != 0.0 || nodes_.back().s != 1.0)
      throw InvalidInput("AnnealSchedule: nodes must start at s=0 and end at s=1");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const auto& n = nodes_[k];
      if (!std::isfinite(n.s) || !std::isfinite(n.a_ghz) || !std::isfinite(n.b_ghz))
        throw InvalidInput("AnnealSchedule: non-finite value at node " + std::to_string(k));
      if (n.a_ghz < 0.0 || n.b_ghz < 0.0) throw InvalidInput("AnnealSchedule: negative A or B at node " + std::to_string(k));
      if (k > 0 && !(n.s > nodes_[k - 1].s))
        throw InvalidInput("AnnealSchedule: s values must be strictly increasing (node " + std::to_string(k) + ")");
    }
  }

  const std::vector<ScheduleNode>& nodes() const { return nodes_; }
  const std::string& name() const { return name_; }

  SchedulePoint evaluate(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidInput("AnnealSchedule::evaluate: s outside [0,1]");
    auto hi = std::lower_bound(nodes_.begin(), nodes_.end(), s,
                               [](const ScheduleNode& n, double v) { return n.s < v; });
    if (hi->s == s) return {hi->a_ghz, hi->b_ghz};
    auto lo = hi - 1;
    const double t = (s - lo->s) / (hi->s - lo->s);
    return {lo->a_ghz + t * (hi->a_ghz - lo->a_ghz), lo->b_ghz + t * (hi->b_ghz - lo->b_ghz)};
  }

 private:
  std::vector<ScheduleNode> nodes_;
  std::string name_;
};

inline SchedulePoint evaluate(const AnnealSchedule& schedule, double s) { return schedule.evaluate(s); }

inline constexpr double kDefaultScheduleAmplitudeGhz = 3.0;

/// Synthetic stand-in for a measured schedule: A(s) = 3 (1-s)^2 GHz,
/// B(s) = 3 s^2 GHz, tabulated at s = 0, 0.05, ..., 1.
///
/// At T = 0.22 GHz and alpha ~ 0.11 the scaled problem term only reaches T
/// once A(s) has dropped below T. Measured schedules should be loaded from
/// file for anything quantitative.
inline AnnealSchedule default_schedule() {
  constexpr double amp = kDefaultScheduleAmplitudeGhz;
  std::vector<ScheduleNode> nodes;
  for (int k = 0; k <= 20; ++k) {
    const double s = k / 20.0;
    nodes.push_back({s, amp * (1.0 - s) * (1.0 - s), amp * s * s});
  }
  return AnnealSchedule(std::move(nodes), "synthetic-quadratic-3GHz");
}

struct Crossings {
  std::optional<double> s_a;  // first s with A(s) <= T
  std::optional<double> s_b;  // first s with alpha * B(s) >= T
};

namespace detail {

// Earliest s where pred(value(s)) first holds, value linear on each segment.
template <typename Value>
std::optional<double> first_crossing(const std::vector<ScheduleNode>& nodes, Value value, double target,
                                     bool want_below) {
  auto holds = [&](double v) { return want_below ? v <= target : v >= target; };
  if (holds(value(nodes.front()))) return nodes.front().s;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double v0 = value(nodes[k - 1]);
    const double v1 = value(nodes[k]);
    if (!holds(v1)) continue;
    // v0 fails the predicate, so v0 != v1 and the root lies in (s_{k-1}, s_k].
    const double t = (target - v0) / (v1 - v0);
    return nodes[k - 1].s + std::clamp(t, 0.0, 1.0) * (nodes[k].s - nodes[k - 1].s);
  }
  return std::nullopt;
}

}  // namespace detail

inline Crossings crossings(const AnnealSchedule& schedule, double alpha, double temperature_ghz) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("crossings: alpha outside [0,1]");
  if (!(temperature_ghz > 0.0)) throw InvalidInput("crossings: temperature must be positive");
  Crossings out;
  out.s_a = detail::first_crossing(schedule.nodes(), [](const ScheduleNode& n) { return n.a_ghz; }, temperature_ghz,
                                   true);
  out.s_b = detail::first_crossing(schedule.nodes(), [alpha](const ScheduleNode& n) { return alpha * n.b_ghz; },
                                   temperature_ghz, false);
  return out;
}

/// Reads `s,A_GHz,B_GHz` CSV (header required). Blank lines and lines
/// starting with '#' are skipped.
inline AnnealSchedule parse_schedule_csv(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<ScheduleNode> nodes;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
      if (compact != "s,A_GHz,B_GHz")
        throw InvalidInput("schedule file: expected header 's,A_GHz,B_GHz', got '" + line + "'");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    double values[3];
    int count = 0;
    while (std::getline(row, cell, ',')) {
      if (count == 3) throw InvalidInput("schedule file: too many columns on line " + std::to_string(line_no));
      try {
        std::size_t used = 0;
        values[count] = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidInput("schedule file: bad number '" + cell + "' on line " + std::to_string(line_no));
      }
      ++count;
    }
    if (count != 3) throw InvalidInput("schedule file: expected 3 columns on line " + std::to_string(line_no));
    nodes.push_back({values[0], values[1], values[2]});
  }
  if (!header_seen) throw InvalidInput("schedule file: missing header");
  return AnnealSchedule(std::move(nodes), std::move(name));
}

inline AnnealSchedule load_schedule_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schedule file '" + path + "'");
  return parse_schedule_csv(in, path);
}

inline void write_schedule_csv(const AnnealSchedule& schedule, std::ostream& out) {
  out << "s,A_GHz,B_GHz\n";
  out.precision(17);
  for (const auto& n : schedule.nodes()) out << n.s << ',' << n.a_ghz << ',' << n.b_ghz << '\n';
}

}  // namespace sssv
