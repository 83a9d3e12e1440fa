// Command-line front end: sweep, ground-space, crossings, gadget.
//
// Exit codes: 0 success, 2 invalid configuration, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sssv/sssv.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct SweepArgs {
  std::string problem = "gadget:4";
  std::string model = "sssv";
  double sigma_h = 0.24;
  double sigma_j = 0.0;
  std::string alphas = "default";
  std::uint64_t runs = 10000;
  std::size_t sweeps = 1500;
  double temp = 0.22;
  std::uint64_t seed = 0;
  std::string schedule = "default";
  bool gibbs = false;
  std::string out;
  std::string json;
  bool histogram = false;
  bool freeze_noise = false;
  int transverse_sign = -1;
  unsigned workers = 1;
};

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "none";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

int run_sweep(const SweepArgs& args, bool sigma_h_given) {
  sssv::ExperimentConfig config;
  config.problem = sssv::ProblemSource::parse(args.problem);
  config.model = sssv::parse_model(args.model);
  // The 0.24 GHz field-noise default belongs to the modified rotor model only.
  config.noise.sigma_h = (config.model == sssv::Model::Sa && !sigma_h_given) ? 0.0 : args.sigma_h;
  config.noise.sigma_j = args.sigma_j;
  config.alphas = sssv::parse_alpha_spec(args.alphas);
  config.runs_per_alpha = args.runs;
  config.sweeps = args.sweeps;
  config.temperature_ghz = args.temp;
  config.transverse_sign = args.transverse_sign;
  config.schedule = args.schedule;
  config.base_seed = args.seed;
  config.freeze_noise = args.freeze_noise;
  config.compute_gibbs_distance = args.gibbs;

  const auto result = sssv::run_experiment(config, {args.workers});
  if (args.out.empty() || args.out == "-")
    sssv::emit_csv(result, std::cout);
  else
    sssv::emit_csv(result, args.out);
  if (!args.json.empty()) sssv::emit_json(result, args.json, {args.histogram});
  return 0;
}

int run_ground_space(const std::string& source) {
  const auto problem = sssv::ProblemSource::parse(source).load();
  const auto info = sssv::enumerate_ground_space(problem);
  std::cout << "problem: " << source << " (" << problem.n_spins() << " spins, " << problem.couplings().size()
            << " couplings)\n";
  std::cout << "ground_energy: " << info.ground_energy << '\n';
  std::cout << "degeneracy: " << info.degeneracy() << '\n';
  if (problem.is_gadget()) {
    std::cout << "isolated: " << (info.isolated ? 1 : 0);
    if (info.isolated) std::cout << " (" << info.isolated->to_string() << ")";
    std::cout << '\n';
    std::cout << "clustered: " << info.clustered_count << '\n';
    std::cout << "other: " << info.degeneracy() - info.clustered_count - (info.isolated ? 1 : 0) << '\n';
  }
  return 0;
}

int run_crossings(const std::string& schedule_source, double alpha, double temp) {
  const auto schedule = sssv::load_schedule_source(schedule_source);
  const auto c = sssv::crossings(schedule, alpha, temp);
  std::cout << "schedule: " << schedule.name() << '\n';
  std::cout << "alpha: " << alpha << '\n';
  std::cout << "temperature_ghz: " << temp << '\n';
  std::cout << "s_A: " << format_optional(c.s_a) << '\n';
  std::cout << "s_B: " << format_optional(c.s_b) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical rotor (SSSV) and simulated-annealing sweeps on gadget Ising problems"};
  app.set_version_flag("--version", std::string(sssv::kVersion));
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an alpha sweep and write per-alpha statistics");
  sweep_cmd->add_option("--problem", sweep.problem, "gadget:N or a problem JSON file")->capture_default_str();
  sweep_cmd->add_option("--model", sweep.model, "sssv or sa")->capture_default_str();
  auto* sigma_h_opt =
      sweep_cmd->add_option("--sigma-h", sweep.sigma_h, "Field calibration noise std (GHz); sssv default 0.24, sa 0");
  sweep_cmd->add_option("--sigma-j", sweep.sigma_j, "Coupling calibration noise std (GHz)")->capture_default_str();
  sweep_cmd->add_option("--alphas", sweep.alphas, "default | start:stop:step | a,b,c")->capture_default_str();
  sweep_cmd->add_option("--runs", sweep.runs, "Runs per alpha")->capture_default_str();
  sweep_cmd->add_option("--sweeps", sweep.sweeps, "Metropolis sweeps per run")->capture_default_str();
  sweep_cmd->add_option("--temp", sweep.temp, "Temperature (GHz)")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed")->capture_default_str();
  sweep_cmd->add_option("--schedule", sweep.schedule, "default or a schedule CSV file")->capture_default_str();
  sweep_cmd->add_flag("--gibbs", sweep.gibbs, "Compute distance to the Gibbs state of the final Hamiltonian");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path (stdout if omitted)");
  sweep_cmd->add_option("--json", sweep.json, "Also write the full result as JSON");
  sweep_cmd->add_flag("--histogram", sweep.histogram, "Include per-alpha histograms in the JSON output");
  sweep_cmd->add_flag("--freeze-noise", sweep.freeze_noise, "Draw calibration noise once per experiment");
  sweep_cmd->add_option("--transverse-sign", sweep.transverse_sign, "Sign of the A(s) sum(sin) term (+1 or -1)")
      ->capture_default_str();
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)")->capture_default_str();

  std::string gs_problem;
  auto* gs_cmd = app.add_subcommand("ground-space", "Enumerate the ground space of a problem");
  gs_cmd->add_option("--problem,problem", gs_problem, "gadget:N or a problem JSON file")->required();

  std::string cr_schedule = "default";
  double cr_alpha = 1.0;
  double cr_temp = 0.22;
  auto* cr_cmd = app.add_subcommand("crossings", "Where A(s) drops below T and alpha*B(s) rises above T");
  cr_cmd->add_option("--schedule", cr_schedule, "default or a schedule CSV file")->capture_default_str();
  cr_cmd->add_option("--alpha", cr_alpha, "Problem-Hamiltonian scale")->capture_default_str();
  cr_cmd->add_option("--temp", cr_temp, "Temperature (GHz)")->capture_default_str();

  std::size_t gadget_cores = 4;
  std::string gadget_out;
  auto* gadget_cmd = app.add_subcommand("gadget", "Write a gadget problem file");
  gadget_cmd->add_option("--cores", gadget_cores, "Number of core spins (>= 3)")->capture_default_str();
  gadget_cmd->add_option("--out", gadget_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*sweep_cmd) return run_sweep(sweep, sigma_h_opt->count() > 0);
    if (*gs_cmd) return run_ground_space(gs_problem);
    if (*cr_cmd) return run_crossings(cr_schedule, cr_alpha, cr_temp);
    if (*gadget_cmd) {
      sssv::save_problem(sssv::make_gadget(gadget_cores), gadget_out);
      return 0;
    }
  } catch (const sssv::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
