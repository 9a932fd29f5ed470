#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "eet/generator.hpp"
#include "eet/units.hpp"

namespace eet {

// Deterministic reference propagator for the generalized Lindblad equation in
// the level eigenbasis. Within a step the rate matrix is frozen, so the
// equation splits exactly: every coherence evolves by a scalar exponential
// (its phase and decay), while the populations obey a closed linear system
// integrated with fixed-step fourth-order Runge-Kutta. The splitting keeps
// fast optical phases exact independent of dt.
struct OracleOptions {
  int substeps = 1;  // population integrator refinement within one grid step
  double trace_tolerance = 1e-8;
};

namespace detail {

// Population flow matrix: off-diagonal transfer rates with diagonal set to
// minus the outflow into other levels; columns sum to zero.
inline Eigen::MatrixXd population_flow(const Eigen::MatrixXd& rates) {
  Eigen::MatrixXd flow = rates;
  flow.diagonal().setZero();
  const Eigen::VectorXd outflow = flow.colwise().sum();
  flow.diagonal() = -outflow;
  return flow;
}

inline void rk4_populations(const Eigen::MatrixXd& flow, double dt, int substeps,
                            Eigen::VectorXd& populations) {
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const Eigen::VectorXd k1 = flow * populations;
    const Eigen::VectorXd k2 = flow * (populations + (0.5 * h) * k1);
    const Eigen::VectorXd k3 = flow * (populations + (0.5 * h) * k2);
    const Eigen::VectorXd k4 = flow * (populations + h * k3);
    populations += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace detail

// Advances rho across the step from grid sample `step` to `step + 1`.
inline void oracle_step(const GeneratorTable& gen, int step, Eigen::MatrixXcd& rho,
                        const OracleOptions& opt = {}) {
  const int levels = gen.levels();
  if (rho.rows() != levels || rho.cols() != levels)
    throw std::invalid_argument("density matrix size does not match the generator");
  if (opt.substeps < 1) throw std::invalid_argument("substeps must be positive");

  const Eigen::MatrixXd rates = step_rates(gen, step);
  const Eigen::VectorXd outflow = total_outflow(rates);
  const double dt = gen.grid.dt;

  Eigen::VectorXd populations = rho.diagonal().real();
  detail::rk4_populations(detail::population_flow(rates), dt, opt.substeps, populations);

  for (int a = 0; a < levels; ++a) {
    for (int b = 0; b < levels; ++b) {
      if (a == b) continue;
      const double phase = -angular(gen.energies(a) - gen.energies(b)) * dt;
      const double decay = -0.5 * (outflow(a) + outflow(b)) * dt;
      rho(a, b) *= std::exp(Complex(decay, phase));
    }
  }
  rho.diagonal() = populations.cast<Complex>();
  rho = 0.5 * (rho + rho.adjoint().eval());

  const double drift = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
  if (drift > opt.trace_tolerance)
    throw std::runtime_error("oracle trace drifted beyond tolerance");
}

// Smallest eigenvalue of a (hermitized) density matrix, for positivity checks.
inline double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  return solver.eigenvalues().minCoeff();
}

}  // namespace eet
