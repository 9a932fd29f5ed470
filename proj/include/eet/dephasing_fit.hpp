#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "eet/basis.hpp"

namespace eet {

// Least-squares fit of per-level dephasing strengths: for each pair (k, k')
// the pair rate is matched by (gamma_k + gamma_k') / 2. The system is solved
// in the minimum-norm sense, so under-determined cases (two levels) and
// over-determined ones (four or more) are handled uniformly. Entries may come
// out negative; the generator consuming them stays trace-preserving either
// way.
struct DephasingFit {
  Eigen::VectorXd gamma;
  double residual = 0.0;  // mean squared pair mismatch, (1/fs)^2
};

inline DephasingFit fit_level_dephasing(const Eigen::MatrixXd& pair_rates,
                                        const std::vector<int>& fit_levels) {
  const int total = int(pair_rates.rows());
  if (pair_rates.cols() != total) throw std::invalid_argument("pair rate matrix must be square");
  for (int level : fit_levels)
    if (level < 0 || level >= total) throw std::invalid_argument("fit level out of range");

  DephasingFit fit;
  fit.gamma = Eigen::VectorXd::Zero(total);
  const int active = int(fit_levels.size());
  if (active < 2) return fit;

  const int pairs = active * (active - 1) / 2;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(pairs, active);
  Eigen::VectorXd target(pairs);
  int row = 0;
  for (int a = 0; a < active; ++a) {
    for (int b = a + 1; b < active; ++b) {
      design(row, a) = 0.5;
      design(row, b) = 0.5;
      target(row) = pair_rates(fit_levels[a], fit_levels[b]);
      ++row;
    }
  }

  const Eigen::VectorXd solution = design.completeOrthogonalDecomposition().solve(target);
  for (int a = 0; a < active; ++a) fit.gamma(fit_levels[a]) = solution(a);
  fit.residual = (design * solution - target).squaredNorm() / pairs;
  return fit;
}

// Levels that couple to the bath at all: only those carry a dephasing
// strength in the fit. The rest keep gamma = 0.
inline std::vector<int> bath_coupled_levels(const LevelBasis& basis) {
  std::vector<int> levels;
  for (int k = 0; k < basis.levels(); ++k) {
    double weight = 0.0;
    for (int n = 1; n <= basis.sites(); ++n) {
      const double a = basis.overlap(k, k, n);
      weight += a * a;
    }
    if (weight > 1e-14) levels.push_back(k);
  }
  return levels;
}

}  // namespace eet
