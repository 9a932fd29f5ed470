#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "eet/model.hpp"
#include "eet/units.hpp"

namespace eet {

// Orthonormal electronic eigenbasis over {ground, site 1..M}. Rows of
// site_coeff hold the level kets in site coordinates; level 0 is always the
// ground-dominant state. energies = raw eigenvalues minus the per-level
// reorganization shift carried by the bath overlap weights.
struct LevelBasis {
  Eigen::MatrixXd site_coeff;    // (M+1) x (M+1), real orthogonal, rows = levels
  Eigen::VectorXd raw_energies;  // cm^-1
  Eigen::VectorXd shift;         // cm^-1
  Eigen::VectorXd energies;      // raw_energies - shift

  int levels() const { return int(raw_energies.size()); }
  int sites() const { return levels() - 1; }

  // Bath overlap factor a_{kk'}(n) for site n = 1..M.
  double overlap(int k, int kp, int n) const { return site_coeff(k, n) * site_coeff(kp, n); }

  // Coordinates of a site-basis ket in this basis and back.
  Eigen::VectorXcd from_site(const Eigen::VectorXcd& site) const { return site_coeff * site; }
  Eigen::VectorXcd to_site(const Eigen::VectorXcd& coeff) const {
    return site_coeff.transpose() * coeff;
  }
};

namespace detail {

// Deterministic gauge: the largest-magnitude entry of each row is made
// positive; the first index wins on ties.
inline void fix_row_signs(Eigen::MatrixXd& rows) {
  for (int r = 0; r < rows.rows(); ++r) {
    int lead = 0;
    for (int c = 1; c < rows.cols(); ++c)
      if (std::abs(rows(r, c)) > std::abs(rows(r, lead))) lead = c;
    if (rows(r, lead) < 0.0) rows.row(r) = -rows.row(r);
  }
}

inline LevelBasis finish_basis(Eigen::MatrixXd site_rows, Eigen::VectorXd raw,
                               const Eigen::VectorXd& site_reorg) {
  LevelBasis basis;
  const int m = int(site_reorg.size());
  basis.site_coeff = std::move(site_rows);
  basis.raw_energies = std::move(raw);
  basis.shift = Eigen::VectorXd::Zero(m + 1);
  for (int k = 0; k <= m; ++k) {
    double lambda = 0.0;
    for (int n = 1; n <= m; ++n) {
      const double a = basis.site_coeff(k, n) * basis.site_coeff(k, n);
      lambda += a * a * site_reorg(n - 1);
    }
    basis.shift(k) = lambda;
  }
  basis.energies = basis.raw_energies - basis.shift;
  return basis;
}

}  // namespace detail

// Diagonalizes the single-excitation block; the ground level stays untouched.
// Excited eigenvalues are sorted ascending, ties broken by the larger |c_k1|
// and then by index. site_reorg holds the per-site reorganization energies.
inline LevelBasis exciton_basis(const SiteBasisModel& model, const Eigen::VectorXd& site_reorg) {
  model.validate();
  const int m = model.sites();
  if (site_reorg.size() != m)
    throw std::invalid_argument("site_reorg must have one entry per site");

  Eigen::MatrixXd block = model.couplings;
  block.diagonal() = model.site_energies;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals(a) != vals(b)) return vals(a) < vals(b);
    return std::abs(vecs(0, a)) > std::abs(vecs(0, b));
  });

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd raw(m + 1);
  rows(0, 0) = 1.0;
  raw(0) = model.ground_energy;
  for (int k = 0; k < m; ++k) {
    rows.row(k + 1).tail(m) = vecs.col(order[k]).transpose();
    raw(k + 1) = vals(order[k]);
  }
  detail::fix_row_signs(rows);
  return detail::finish_basis(std::move(rows), std::move(raw), site_reorg);
}

// Field-dressed basis with the ground level lifted by the carrier energy and
// coupled to each excited level k with strength couplings(k-1). mixing rows
// express the dressed levels in coordinates of the undriven basis.
struct DressedBasis {
  LevelBasis basis;
  Eigen::MatrixXd mixing;  // (M+1) x (M+1)
};

inline DressedBasis dressed_basis(const LevelBasis& excitons, double omega,
                                  const Eigen::VectorXd& couplings,
                                  const Eigen::VectorXd& site_reorg) {
  const int m = excitons.sites();
  if (couplings.size() != m)
    throw std::invalid_argument("dressed couplings must have one entry per excited level");
  if (site_reorg.size() != m)
    throw std::invalid_argument("site_reorg must have one entry per site");

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m + 1);
  h(0, 0) = excitons.raw_energies(0) + omega;
  for (int k = 1; k <= m; ++k) {
    h(k, k) = excitons.raw_energies(k);
    h(0, k) = h(k, 0) = couplings(k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();

  // Level 0 tracks the state with the largest ground overlap; the rest stay
  // in ascending eigenvalue order.
  int lead = 0;
  for (int j = 1; j <= m; ++j)
    if (std::abs(vecs(0, j)) > std::abs(vecs(0, lead))) lead = j;
  std::vector<int> order;
  order.push_back(lead);
  for (int j = 0; j <= m; ++j)
    if (j != lead) order.push_back(j);

  Eigen::MatrixXd mixing(m + 1, m + 1);
  Eigen::VectorXd raw(m + 1);
  for (int k = 0; k <= m; ++k) {
    mixing.row(k) = vecs.col(order[k]).transpose();
    raw(k) = vals(order[k]);
  }
  Eigen::MatrixXd rows = mixing * excitons.site_coeff;
  detail::fix_row_signs(rows);
  // Keep the published mixing consistent with the gauged site rows.
  mixing = rows * excitons.site_coeff.transpose();

  DressedBasis dressed;
  dressed.basis = detail::finish_basis(std::move(rows), std::move(raw), site_reorg);
  dressed.mixing = std::move(mixing);
  return dressed;
}

// Rotating-frame phase on the ground amplitude: lab = phase * frame when
// leaving a frame of carrier energy omega at time t.
inline void apply_ground_phase(Eigen::VectorXcd& site_coords, double omega, double t) {
  site_coords(0) *= std::polar(1.0, angular(omega) * t);
}

inline void apply_ground_phase(Eigen::MatrixXcd& site_rho, double omega, double t) {
  const Complex phase = std::polar(1.0, angular(omega) * t);
  site_rho.row(0) *= phase;
  site_rho.col(0) *= std::conj(phase);
}

}  // namespace eet
