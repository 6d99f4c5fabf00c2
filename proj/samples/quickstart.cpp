// Expected number of real zeros of a Kostlan polynomial on the circle, predicted and simulated.
#include "zonoid/zonoid.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  const int degree = argc > 1 ? std::atoi(argv[1]) : 4;
  const auto M = zonoid::circle(64);
  const auto model = zonoid::gaussian_model(M.chart, zonoid::kostlan_basis(1, degree));

  zonoid::SectionOptions so;
  so.n_samples = 1024;
  so.seed = 42;
  const auto section = zonoid::estimate_section(model, M.rule, so);
  const auto predicted = zonoid::kac_rice_volume(section);

  zonoid::SimulationOptions mc;
  mc.trials = 2000;
  mc.seed = 42;
  mc.keep_trials = false;
  const auto report = zonoid::count_zeros_1d(model, mc);

  std::cout << "degree " << degree << '\n'
            << "  Kac-Rice   " << predicted.value << " +- " << predicted.standard_error << '\n'
            << "  simulated  " << report.mean << " +- " << report.standard_error << '\n';
}
