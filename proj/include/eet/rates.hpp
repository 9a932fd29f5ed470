#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eet/basis.hpp"
#include "eet/bath.hpp"
#include "eet/units.hpp"

namespace eet {

namespace detail {

inline void check_tables(const LevelBasis& basis, const std::vector<LineBroadeningTable>& tables,
                         const Eigen::VectorXd& site_reorg) {
  if (int(tables.size()) != basis.sites())
    throw std::invalid_argument("one line-broadening table per site expected");
  if (site_reorg.size() != basis.sites())
    throw std::invalid_argument("one reorganization energy per site expected");
  for (const auto& t : tables)
    if (t.grid.dt != tables[0].grid.dt || t.grid.steps != tables[0].grid.steps)
      throw std::invalid_argument("line-broadening tables must share one grid");
}

}  // namespace detail

// Population transfer rates R(k, k') for the channel |k><k'| (transfer k'->k),
// one matrix per grid sample, in 1/fs. The integrand combines the overlap
// contractions of the two levels with the per-site line-broadening functions;
// the running integral is accumulated with a trapezoid rule on the grid.
inline std::vector<Eigen::MatrixXd> transfer_rate_table(
    const LevelBasis& basis, const std::vector<LineBroadeningTable>& tables,
    const Eigen::VectorXd& site_reorg) {
  detail::check_tables(basis, tables, site_reorg);
  const int levels = basis.levels();
  const int m = basis.sites();
  const TimeGrid grid = tables[0].grid;

  std::vector<Eigen::MatrixXd> rates(grid.samples(), Eigen::MatrixXd::Zero(levels, levels));
  std::vector<Complex> integrand(grid.samples());

  for (int k = 0; k < levels; ++k) {
    for (int kp = 0; kp < levels; ++kp) {
      if (k == kp) continue;
      // Per-site contraction weights for this level pair.
      Eigen::VectorXd diag_k(m), diag_kp(m), cross(m);
      for (int n = 1; n <= m; ++n) {
        diag_k(n - 1) = basis.overlap(k, k, n);
        diag_kp(n - 1) = basis.overlap(kp, kp, n);
        cross(n - 1) = basis.overlap(k, kp, n);
      }
      const Eigen::VectorXd diff = diag_k - diag_kp;
      if (cross.cwiseAbs().maxCoeff() == 0.0) continue;  // decoupled pair

      const double phase_shift = diff.cwiseProduct(diff).dot(site_reorg);
      const double phase = angular(basis.energies(kp) - basis.energies(k) - phase_shift);
      const Complex lambda_term(0.0, -2.0 * angular(cross.dot(diag_kp.cwiseProduct(site_reorg))));

      for (int s = 0; s < grid.samples(); ++s) {
        Complex decay(0.0, 0.0), curvature(0.0, 0.0), slope(0.0, 0.0);
        for (int n = 0; n < m; ++n) {
          decay += diff(n) * diff(n) * tables[n].g[s];
          curvature += cross(n) * cross(n) * tables[n].gddot[s];
          slope += cross(n) * diff(n) * tables[n].gdot[s];
        }
        const Complex factor = slope + lambda_term;
        const Complex bracket = curvature - factor * factor;
        const double tau = grid.time(s);
        integrand[s] = std::exp(Complex(0.0, phase * tau) - decay) * bracket;
      }

      Complex running(0.0, 0.0);
      for (int s = 1; s < grid.samples(); ++s) {
        running += 0.5 * grid.dt * (integrand[s - 1] + integrand[s]);
        rates[s](k, kp) = 2.0 * running.real();
      }
    }
  }
  return rates;
}

// Pure dephasing rates for every level pair, one symmetric zero-diagonal
// matrix per grid sample, in 1/fs.
inline std::vector<Eigen::MatrixXd> pure_dephasing_rate_table(
    const LevelBasis& basis, const std::vector<LineBroadeningTable>& tables) {
  if (int(tables.size()) != basis.sites())
    throw std::invalid_argument("one line-broadening table per site expected");
  const int levels = basis.levels();
  const int m = basis.sites();
  const TimeGrid grid = tables[0].grid;

  std::vector<Eigen::MatrixXd> rates(grid.samples(), Eigen::MatrixXd::Zero(levels, levels));
  for (int k = 0; k < levels; ++k) {
    for (int kp = k + 1; kp < levels; ++kp) {
      for (int s = 0; s < grid.samples(); ++s) {
        double value = 0.0;
        for (int n = 1; n <= m; ++n) {
          const double d = basis.overlap(k, k, n) - basis.overlap(kp, kp, n);
          value += d * d * tables[n - 1].gdot[s].real();
        }
        rates[s](k, kp) = rates[s](kp, k) = value;
      }
    }
  }
  return rates;
}

// Long-time plateau of a rate table: mean over the trailing fraction of the
// grid. Entries that still drift by more than the tolerance across that
// window have not converged.
struct PlateauOptions {
  double tail_fraction = 0.1;
  double drift_tolerance = 0.01;
  double magnitude_floor = 1e-10;  // 1/fs, below this an entry counts as zero
};

inline Eigen::MatrixXd stationary_transfer_rates(const std::vector<Eigen::MatrixXd>& table,
                                                 const PlateauOptions& opt = {}) {
  if (table.empty()) throw std::invalid_argument("empty rate table");
  const int samples = int(table.size());
  const int tail = std::max(2, int(samples * opt.tail_fraction));
  const int begin = samples - tail;

  Eigen::MatrixXd plateau = Eigen::MatrixXd::Zero(table[0].rows(), table[0].cols());
  for (int s = begin; s < samples; ++s) plateau += table[s];
  plateau /= tail;

  for (int i = 0; i < plateau.rows(); ++i) {
    for (int j = 0; j < plateau.cols(); ++j) {
      if (std::abs(plateau(i, j)) < opt.magnitude_floor) continue;
      const double drift = std::abs(table[samples - 1](i, j) - table[begin](i, j));
      if (drift > opt.drift_tolerance * std::abs(plateau(i, j)))
        throw std::runtime_error("rate (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") has not converged; extend the grid horizon");
    }
  }
  return plateau;
}

}  // namespace eet
