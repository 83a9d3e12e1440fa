// Small alpha sweep on the 4-core gadget, printed as CSV.
//
//   ./quick_sweep [runs]

#include <cstdlib>
#include <iostream>

#include "sssv/sssv.hpp"

int main(int argc, char** argv) {
  sssv::ExperimentConfig config;
  config.alphas = {0.1, 0.2, 0.5, 1.0};
  config.runs_per_alpha = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 500;
  config.base_seed = 1;

  const auto info = sssv::enumerate_ground_space(config.problem.load());
  std::cerr << "ground energy " << info.ground_energy << ", degeneracy " << info.degeneracy() << '\n';

  sssv::emit_csv(sssv::run_experiment(config, {0}), std::cout);
}
