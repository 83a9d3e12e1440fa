#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sssv/errors.hpp"
#include "sssv/ising.hpp"
#include "sssv/schedule.hpp"

namespace sssv {

using Rng = std::mt19937_64;

/// Uniform double on [0, 1) from the top 53 bits of one engine output.
inline double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

/// Calibration-error magnitudes, as standard deviations in GHz.
struct NoiseModel {
  double sigma_h = 0.0;
  double sigma_j = 0.0;

  void validate() const {
    if (!(std::isfinite(sigma_h) && sigma_h >= 0.0)) throw InvalidInput("NoiseModel: sigma_h must be finite and >= 0");
    if (!(std::isfinite(sigma_j) && sigma_j >= 0.0)) throw InvalidInput("NoiseModel: sigma_j must be finite and >= 0");
  }
};

/// One realisation of the calibration error. `eps_coupling[e]` belongs to
/// `problem.couplings()[e]`.
struct NoiseDraw {
  std::vector<double> eps_field;
  std::vector<double> eps_coupling;

  static NoiseDraw zero(const IsingProblem& problem) {
    return {std::vector<double>(problem.n_spins(), 0.0), std::vector<double>(problem.couplings().size(), 0.0)};
  }
};

struct RunParams {
  double alpha = 1.0;
  std::size_t sweeps = 1500;
  double temperature_ghz = 0.22;
  // -1: -A sum sin(theta), the usual SSSV sign. +1: the literal +A sum sin(theta) variant.
  int transverse_sign = -1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("RunParams: alpha must lie in [0,1]");
    if (!(std::isfinite(temperature_ghz) && temperature_ghz > 0.0))
      throw InvalidInput("RunParams: temperature must be positive");
    if (transverse_sign != 1 && transverse_sign != -1) throw InvalidInput("RunParams: transverse_sign must be +1 or -1");
  }
};

/// Rotor angles theta_i in [0, pi].
struct RotorState {
  std::vector<double> theta;

  static RotorState uniform(std::size_t n, double angle) { return {std::vector<double>(n, angle)}; }
  std::size_t size() const { return theta.size(); }
};

inline NoiseDraw draw_noise(const IsingProblem& problem, const NoiseModel& model, Rng& rng) {
  model.validate();
  NoiseDraw draw = NoiseDraw::zero(problem);
  if (model.sigma_h > 0.0) {
    std::normal_distribution<double> field(0.0, model.sigma_h);
    for (auto& e : draw.eps_field) e = field(rng);
  }
  if (model.sigma_j > 0.0) {
    std::normal_distribution<double> coupling(0.0, model.sigma_j);
    for (auto& e : draw.eps_coupling) e = coupling(rng);
  }
  return draw;
}

namespace detail {

inline void check_dimensions(const IsingProblem& problem, const RotorState& state, const NoiseDraw& noise) {
  if (state.size() != problem.n_spins()) throw InvalidInput("rotor state length does not match problem");
  if (noise.eps_field.size() != problem.n_spins()) throw InvalidInput("field noise length does not match problem");
  if (noise.eps_coupling.size() != problem.couplings().size())
    throw InvalidInput("coupling noise length does not match problem");
}

}  // namespace detail

/// sign*A*sum sin(t_i) - sum (B*alpha*h_i + eps_i) cos(t_i)
///   - sum_{i<j} (B*alpha*J_ij + delta_ij) cos(t_i) cos(t_j), in GHz.
inline double rotor_energy(const IsingProblem& problem, const RotorState& state, const SchedulePoint& point,
                           const RunParams& params, const NoiseDraw& noise) {
  detail::check_dimensions(problem, state, noise);
  const double scale = point.b_ghz * params.alpha;
  const auto h = problem.fields();
  double e = 0.0;
  for (std::size_t i = 0; i < problem.n_spins(); ++i) {
    e += params.transverse_sign * point.a_ghz * std::sin(state.theta[i]);
    e -= (scale * h[i] + noise.eps_field[i]) * std::cos(state.theta[i]);
  }
  const auto j = problem.couplings();
  for (std::size_t k = 0; k < j.size(); ++k)
    e -= (scale * j[k].value + noise.eps_coupling[k]) * std::cos(state.theta[j[k].i]) * std::cos(state.theta[j[k].j]);
  return e;
}

/// Metropolis chain over rotor angles with cached trig values. Proposals
/// draw a fresh angle uniformly on [0, pi]; the energy change uses only the
/// terms that touch the updated rotor.
class RotorChain {
 public:
  RotorChain(const IsingProblem& problem, RotorState state, const RunParams& params, const NoiseDraw& noise)
      : problem_(&problem), noise_(&noise), params_(params), state_(std::move(state)) {
    params_.validate();
    detail::check_dimensions(problem, state_, noise);
    for (double t : state_.theta)
      if (!(t >= 0.0 && t <= std::numbers::pi)) throw InvalidInput("RotorChain: angle outside [0, pi]");
    const std::size_t n = problem.n_spins();
    cos_.resize(n);
    sin_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      cos_[i] = std::cos(state_.theta[i]);
      sin_[i] = std::sin(state_.theta[i]);
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    field_.resize(n);
    coupling_.resize(problem.couplings().size());
  }

  void set_point(const SchedulePoint& point) {
    transverse_ = params_.transverse_sign * point.a_ghz;
    const double scale = point.b_ghz * params_.alpha;
    const auto h = problem_->fields();
    for (std::size_t i = 0; i < field_.size(); ++i) field_[i] = scale * h[i] + noise_->eps_field[i];
    const auto j = problem_->couplings();
    for (std::size_t k = 0; k < coupling_.size(); ++k) coupling_[k] = scale * j[k].value + noise_->eps_coupling[k];
  }

  /// Energy change from moving rotor `spin` to `theta` at the current point.
  double delta_energy(std::size_t spin, double new_cos, double new_sin) const {
    double local = field_[spin];
    for (const auto& nb : problem_->neighbors(spin)) local += coupling_[nb.edge] * cos_[nb.spin];
    return transverse_ * (new_sin - sin_[spin]) - local * (new_cos - cos_[spin]);
  }

  double delta_energy(std::size_t spin, double theta) const {
    return delta_energy(spin, std::cos(theta), std::sin(theta));
  }

  /// One proposal per rotor in a freshly shuffled order. Returns the number
  /// of accepted proposals.
  std::size_t sweep(Rng& rng) {
    std::shuffle(order_.begin(), order_.end(), rng);
    const double inv_t = 1.0 / params_.temperature_ghz;
    std::size_t accepted = 0;
    for (std::size_t spin : order_) {
      const double theta = std::numbers::pi * unit_uniform(rng);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const double de = delta_energy(spin, c, s);
      if (de <= 0.0 || unit_uniform(rng) < std::exp(-de * inv_t)) {
        state_.theta[spin] = theta;
        cos_[spin] = c;
        sin_[spin] = s;
        ++accepted;
      }
    }
    return accepted;
  }

  const RotorState& state() const { return state_; }
  std::span<const double> cosines() const { return cos_; }

 private:
  const IsingProblem* problem_;
  const NoiseDraw* noise_;
  RunParams params_;
  RotorState state_;
  std::vector<double> cos_, sin_;
  std::vector<std::size_t> order_;
  std::vector<double> field_;
  std::vector<double> coupling_;
  double transverse_ = 0.0;
};

inline RotorState metropolis_sweep(const IsingProblem& problem, const RotorState& state, const SchedulePoint& point,
                                   const RunParams& params, const NoiseDraw& noise, Rng& rng) {
  RotorChain chain(problem, state, params, noise);
  chain.set_point(point);
  chain.sweep(rng);
  return chain.state();
}

/// +1 when cos(theta) >= 0, else -1.
inline SpinConfig project(const RotorState& state) {
  std::vector<std::int8_t> s(state.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::cos(state.theta[i]) >= 0.0 ? 1 : -1;
  return SpinConfig(std::move(s));
}

struct SssvOutcome {
  SpinConfig spins;
  RotorState state;
};

namespace detail {

inline void check_sweeps(std::size_t sweeps) {
  if (sweeps < 2) throw InvalidInput("run: sweeps must be at least 2");
}

inline double sweep_time(std::size_t k, std::size_t sweeps) {
  return k + 1 == sweeps ? 1.0 : static_cast<double>(k) / static_cast<double>(sweeps - 1);
}

}  // namespace detail

/// Runs the rotor model under a fixed calibration-error draw, starting from
/// theta_i = pi/2. Sweep k of K sees the schedule at s = k/(K-1).
inline SssvOutcome run_sssv(const IsingProblem& problem, const AnnealSchedule& schedule, const RunParams& params,
                            const NoiseDraw& noise, Rng& rng) {
  params.validate();
  detail::check_sweeps(params.sweeps);
  RotorChain chain(problem, RotorState::uniform(problem.n_spins(), std::numbers::pi / 2), params, noise);
  for (std::size_t k = 0; k < params.sweeps; ++k) {
    chain.set_point(schedule.evaluate(detail::sweep_time(k, params.sweeps)));
    chain.sweep(rng);
  }
  return {project(chain.state()), chain.state()};
}

/// Draws one calibration error from `noise_model`, then anneals.
inline SssvOutcome run_sssv(const IsingProblem& problem, const AnnealSchedule& schedule, const RunParams& params,
                            const NoiseModel& noise_model, Rng& rng) {
  params.validate();
  detail::check_sweeps(params.sweeps);
  const NoiseDraw noise = draw_noise(problem, noise_model, rng);
  return run_sssv(problem, schedule, params, noise, rng);
}

/// Single-spin-flip Metropolis sweep at temperature T on the energy
/// energy_scale * E_Ising. Returns the number of accepted flips.
inline std::size_t sa_sweep(const IsingProblem& problem, SpinConfig& spins, double energy_scale, double temperature_ghz,
                            std::vector<std::size_t>& order, Rng& rng) {
  std::shuffle(order.begin(), order.end(), rng);
  const auto h = problem.fields();
  const auto j = problem.couplings();
  const double inv_t = 1.0 / temperature_ghz;
  std::size_t accepted = 0;
  for (std::size_t spin : order) {
    double local = h[spin];
    for (const auto& nb : problem.neighbors(spin)) local += j[nb.edge].value * spins.spins[nb.spin];
    const double de = 2.0 * energy_scale * spins.spins[spin] * local;
    if (de <= 0.0 || unit_uniform(rng) < std::exp(-de * inv_t)) {
      spins.spins[spin] = static_cast<std::int8_t>(-spins.spins[spin]);
      ++accepted;
    }
  }
  return accepted;
}

/// Simulated-annealing baseline: binary spins from a uniformly random start,
/// fixed temperature, energy alpha * B(s) * E_Ising on the same time grid as
/// run_sssv.
inline SpinConfig run_sa(const IsingProblem& problem, const AnnealSchedule& schedule, const RunParams& params,
                         Rng& rng) {
  params.validate();
  detail::check_sweeps(params.sweeps);
  std::vector<std::int8_t> init(problem.n_spins());
  for (auto& s : init) s = (rng() >> 63) ? 1 : -1;
  SpinConfig spins(std::move(init));
  std::vector<std::size_t> order(problem.n_spins());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < params.sweeps; ++k) {
    const auto point = schedule.evaluate(detail::sweep_time(k, params.sweeps));
    sa_sweep(problem, spins, params.alpha * point.b_ghz, params.temperature_ghz, order, rng);
  }
  return spins;
}

}  // namespace sssv
