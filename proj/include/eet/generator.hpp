#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "eet/basis.hpp"
#include "eet/dephasing_fit.hpp"
#include "eet/rates.hpp"
#include "eet/units.hpp"

namespace eet {

// Time-dependent jump generator in the level eigenbasis. rates[s](k, k') with
// k != k' drives population transfer k' -> k through the channel |k><k'|;
// rates[s](k, k) is the fitted dephasing strength of level k acting through
// |k><k|. Column sums give the total outflow entering the effective decay of
// each level.
struct GeneratorTable {
  Eigen::VectorXd energies;            // shifted level energies, cm^-1
  std::vector<Eigen::MatrixXd> rates;  // per grid sample, 1/fs
  std::vector<double> fit_residual;    // per grid sample, (1/fs)^2
  TimeGrid grid;

  int levels() const { return int(energies.size()); }
};

inline GeneratorTable assemble_generator(const LevelBasis& basis,
                                         const std::vector<LineBroadeningTable>& tables,
                                         const Eigen::VectorXd& site_reorg) {
  GeneratorTable gen;
  gen.energies = basis.energies;
  gen.grid = tables.empty() ? TimeGrid{} : tables[0].grid;
  gen.rates = transfer_rate_table(basis, tables, site_reorg);
  const auto dephasing = pure_dephasing_rate_table(basis, tables);
  const auto fit_levels = bath_coupled_levels(basis);

  gen.fit_residual.resize(gen.rates.size());
  for (size_t s = 0; s < gen.rates.size(); ++s) {
    const DephasingFit fit = fit_level_dephasing(dephasing[s], fit_levels);
    gen.rates[s].diagonal() = fit.gamma;
    gen.fit_residual[s] = fit.residual;
  }
  return gen;
}

// Total outflow per level: column sums of the rate matrix, including the
// diagonal dephasing strength.
inline Eigen::VectorXd total_outflow(const Eigen::MatrixXd& rates) {
  return rates.colwise().sum().transpose();
}

// Frozen rate matrix for the step from sample `step` to `step + 1`: the
// endpoint average, so stepwise decay products reproduce trapezoid integrals
// of the tabulated rates exactly. Both propagators use this same generator.
inline Eigen::MatrixXd step_rates(const GeneratorTable& gen, int step) {
  if (step < 0 || step + 1 >= int(gen.rates.size()))
    throw std::out_of_range("step outside the tabulated grid");
  return 0.5 * (gen.rates[step] + gen.rates[step + 1]);
}

}  // namespace eet
