#pragma once

#include <random>

#include "eet/bath.hpp"
#include "eet/basis.hpp"
#include "eet/model.hpp"

namespace eet::test {

// Bounded random models for property tests.
inline SiteBasisModel random_model(std::mt19937& rng, int sites) {
  std::uniform_real_distribution<double> energy(-300.0, 300.0);
  std::uniform_real_distribution<double> coupling(-200.0, 200.0);
  SiteBasisModel model;
  model.ground_energy = energy(rng) - 12000.0;
  model.site_energies.resize(sites);
  for (int i = 0; i < sites; ++i) model.site_energies(i) = energy(rng);
  model.couplings = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i < sites; ++i)
    for (int j = i + 1; j < sites; ++j) model.couplings(i, j) = model.couplings(j, i) = coupling(rng);
  return model;
}

inline Eigen::VectorXd constant_reorg(int sites, double value) {
  return Eigen::VectorXd::Constant(sites, value);
}

// Identical Ohmic baths on every site, tabulated on one grid.
inline std::vector<LineBroadeningTable> shared_bath(int sites, double reorg, double cutoff,
                                                    double temperature, TimeGrid grid) {
  const auto density = SpectralDensity::ohmic(reorg, cutoff);
  const auto table = tabulate_line_broadening(density, temperature, grid);
  return std::vector<LineBroadeningTable>(sites, table);
}

// Seven-site pigment network used as a nontrivial fixture.
inline SiteBasisModel seven_site_model() {
  SiteBasisModel model;
  model.ground_energy = 0.0;
  model.site_energies.resize(7);
  model.site_energies << 12410.0, 12530.0, 12210.0, 12320.0, 12480.0, 12630.0, 12440.0;
  model.couplings = Eigen::MatrixXd::Zero(7, 7);
  const double upper[6][7] = {{0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9},
                              {0, 0, 30.8, 8.2, 0.7, 11.8, 4.3},
                              {0, 0, 0, -53.5, -2.2, -9.6, 6.0},
                              {0, 0, 0, 0, -70.7, -17.0, -63.3},
                              {0, 0, 0, 0, 0, 81.1, -1.3},
                              {0, 0, 0, 0, 0, 0, 39.7}};
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 7; ++j) model.couplings(i, j) = model.couplings(j, i) = upper[i][j];
  return model;
}

}  // namespace eet::test
