#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace eet {

// Electronic model: one shared ground level plus M singly excited sites.
// Double excitations are outside the state space.
struct SiteBasisModel {
  double ground_energy = 0.0;
  Eigen::VectorXd site_energies;       // size M, cm^-1
  Eigen::MatrixXd couplings;           // M x M, symmetric, zero diagonal, cm^-1
  Eigen::VectorXd transition_dipoles;  // size M or empty; |mu_k0| per level/site
  bool dipoles_in_exciton_basis = true;

  int sites() const { return int(site_energies.size()); }
  int levels() const { return sites() + 1; }

  void validate() const {
    const int m = sites();
    if (m < 1) throw std::invalid_argument("model needs at least one site");
    if (couplings.rows() != m || couplings.cols() != m)
      throw std::invalid_argument("coupling matrix must be " + std::to_string(m) + "x" +
                                  std::to_string(m));
    if ((couplings - couplings.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("coupling matrix must be symmetric");
    if (couplings.diagonal().cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("coupling diagonal belongs in site_energies");
    if (transition_dipoles.size() != 0 && transition_dipoles.size() != m)
      throw std::invalid_argument("transition dipole vector must have one entry per site");
  }

  // Full Hamiltonian over {ground, site 1..M}, ground decoupled.
  Eigen::MatrixXd hamiltonian() const {
    const int m = sites();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m + 1);
    h(0, 0) = ground_energy;
    h.block(1, 1, m, m) = couplings;
    h.block(1, 1, m, m).diagonal() = site_energies;
    return h;
  }
};

inline SiteBasisModel make_dimer(double ground, double e1, double e2, double j) {
  SiteBasisModel model;
  model.ground_energy = ground;
  model.site_energies = Eigen::Vector2d(e1, e2);
  model.couplings = Eigen::Matrix2d{{0.0, j}, {j, 0.0}};
  return model;
}

}  // namespace eet
