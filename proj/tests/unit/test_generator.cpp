#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "eet/oracle.hpp"
#include "helpers.hpp"

using namespace eet;
using Catch::Approx;

namespace {

double pair_objective(const Eigen::MatrixXd& pd, const Eigen::VectorXd& gamma) {
  double obj = 0.0;
  for (int k = 0; k < pd.rows(); ++k)
    for (int kp = k + 1; kp < pd.cols(); ++kp) {
      const double miss = pd(k, kp) - 0.5 * (gamma(k) + gamma(kp));
      obj += miss * miss;
    }
  return obj;
}

std::vector<int> all_levels(int count) {
  std::vector<int> levels(count);
  for (int i = 0; i < count; ++i) levels[i] = i;
  return levels;
}

GeneratorTable coherent_only_generator(const LevelBasis& basis, TimeGrid grid) {
  GeneratorTable gen;
  gen.energies = basis.energies;
  gen.grid = grid;
  gen.rates.assign(grid.samples(), Eigen::MatrixXd::Zero(basis.levels(), basis.levels()));
  gen.fit_residual.assign(grid.samples(), 0.0);
  return gen;
}

Eigen::MatrixXcd to_site_matrix(const LevelBasis& basis, const Eigen::MatrixXcd& rho_level) {
  return basis.site_coeff.transpose() * rho_level * basis.site_coeff;
}

Eigen::MatrixXcd from_site_matrix(const LevelBasis& basis, const Eigen::MatrixXcd& rho_site) {
  return basis.site_coeff * rho_site * basis.site_coeff.transpose();
}

}  // namespace

TEST_CASE("dephasing fit reproduces pinned solutions") {
  SECTION("two levels take the minimum-norm split") {
    Eigen::MatrixXd pd = Eigen::MatrixXd::Zero(2, 2);
    pd(0, 1) = pd(1, 0) = 10.0;
    const auto fit = fit_level_dephasing(pd, all_levels(2));
    REQUIRE(fit.gamma(0) == Approx(10.0).margin(1e-12));
    REQUIRE(fit.gamma(1) == Approx(10.0).margin(1e-12));
    REQUIRE(fit.residual < 1e-24);
    REQUIRE(0.5 * (fit.gamma(0) + fit.gamma(1)) == Approx(pd(0, 1)).margin(1e-12));
  }

  SECTION("three levels are exactly determined") {
    Eigen::MatrixXd pd = Eigen::MatrixXd::Zero(3, 3);
    pd(0, 1) = pd(1, 0) = 2.0;
    pd(0, 2) = pd(2, 0) = 4.0;
    pd(1, 2) = pd(2, 1) = 6.0;
    const auto fit = fit_level_dephasing(pd, all_levels(3));

    Eigen::Matrix3d pairs;
    pairs << 0.5, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.5;
    const Eigen::Vector3d direct = pairs.colPivHouseholderQr().solve(Eigen::Vector3d(2.0, 4.0, 6.0));

    REQUIRE(fit.gamma(0) == Approx(0.0).margin(1e-12));
    REQUIRE(fit.gamma(1) == Approx(4.0).margin(1e-12));
    REQUIRE(fit.gamma(2) == Approx(8.0).margin(1e-12));
    for (int k = 0; k < 3; ++k) REQUIRE(fit.gamma(k) == Approx(direct(k)).margin(1e-10));
    REQUIRE(fit.residual < 1e-24);
  }

  SECTION("uniform pair rates give uniform strengths") {
    for (int levels = 2; levels <= 6; ++levels) {
      Eigen::MatrixXd pd = Eigen::MatrixXd::Constant(levels, levels, 3.7);
      pd.diagonal().setZero();
      const auto fit = fit_level_dephasing(pd, all_levels(levels));
      for (int k = 0; k < levels; ++k) REQUIRE(fit.gamma(k) == Approx(3.7).margin(1e-10));
    }
  }

  SECTION("negative strengths are returned when the pair rates demand them") {
    Eigen::MatrixXd pd = Eigen::MatrixXd::Zero(3, 3);
    pd(0, 1) = pd(1, 0) = 0.1;
    pd(0, 2) = pd(2, 0) = 0.1;
    pd(1, 2) = pd(2, 1) = 5.0;
    const auto fit = fit_level_dephasing(pd, all_levels(3));
    REQUIRE(fit.gamma(0) == Approx(-4.8).margin(1e-12));
    REQUIRE(fit.gamma(1) == Approx(5.0).margin(1e-12));
    REQUIRE(fit.gamma(2) == Approx(5.0).margin(1e-12));
  }

  SECTION("single level fits to zero with zero residual") {
    const auto fit = fit_level_dephasing(Eigen::MatrixXd::Zero(3, 3), {1});
    REQUIRE(fit.gamma.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(fit.residual == 0.0);
  }
}

TEST_CASE("dephasing fit is stationary under coordinate perturbations") {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  std::uniform_int_distribution<int> size(2, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const int levels = size(rng);
    Eigen::MatrixXd pd = Eigen::MatrixXd::Zero(levels, levels);
    for (int k = 0; k < levels; ++k)
      for (int kp = k + 1; kp < levels; ++kp) pd(k, kp) = pd(kp, k) = rate(rng);
    const auto fit = fit_level_dephasing(pd, all_levels(levels));
    const double base = pair_objective(pd, fit.gamma);
    REQUIRE(fit.residual == Approx(base / (levels * (levels - 1) / 2)).margin(1e-12));
    for (int k = 0; k < levels; ++k) {
      for (double sign : {-1.0, 1.0}) {
        Eigen::VectorXd perturbed = fit.gamma;
        perturbed(k) += sign * 1e-6;
        REQUIRE(pair_objective(pd, perturbed) >= base - 1e-15);
      }
    }
  }
}

TEST_CASE("bath-coupled level selection") {
  std::mt19937 rng(405);
  const auto model = test::random_model(rng, 4);
  const auto reorg = test::constant_reorg(4, 35.0);
  const auto excitons = exciton_basis(model, reorg);
  REQUIRE(bath_coupled_levels(excitons) == std::vector<int>{1, 2, 3, 4});

  Eigen::VectorXd g(4);
  g << 60.0, 40.0, 20.0, 10.0;
  const auto dressed = dressed_basis(excitons, -model.ground_energy + 12300.0, g, reorg);
  REQUIRE(bath_coupled_levels(dressed.basis) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("zero generator leaves the state fixed") {
  const auto basis = exciton_basis(make_dimer(0.0, 100.0, 200.0, 60.0), test::constant_reorg(2, 0.0));
  GeneratorTable gen = coherent_only_generator(basis, TimeGrid{1.0, 50});
  gen.energies.setZero();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
  rho(1, 1) = 0.25;
  rho(2, 2) = 0.75;
  rho(1, 2) = Complex(0.1, 0.2);
  rho(2, 1) = std::conj(rho(1, 2));
  const Eigen::MatrixXcd initial = rho;
  for (int s = 0; s < gen.grid.steps; ++s) oracle_step(gen, s, rho);
  REQUIRE((rho - initial).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("coherent dimer oscillates at the exchange period") {
  const double j = 100.0;
  const auto model = make_dimer(0.0, 150.0, 150.0, j);
  const auto basis = exciton_basis(model, test::constant_reorg(2, 0.0));
  const TimeGrid grid{0.5, 2000};
  const GeneratorTable gen = coherent_only_generator(basis, grid);

  Eigen::MatrixXcd rho_site = Eigen::MatrixXcd::Zero(3, 3);
  rho_site(1, 1) = 1.0;
  Eigen::MatrixXcd rho = from_site_matrix(basis, rho_site);

  const double period = M_PI / angular(j);
  REQUIRE(period == Approx(166.78).margin(0.01));

  for (int s = 0; s < grid.steps; ++s) {
    oracle_step(gen, s, rho);
    const double t = grid.time(s + 1);
    const Eigen::MatrixXcd site = to_site_matrix(basis, rho);
    const double expected = std::cos(angular(j) * t) * std::cos(angular(j) * t);
    REQUIRE(site(1, 1).real() == Approx(expected).margin(1e-9));
    REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("uncoupled dimer coherence decays by the dephasing integral") {
  const auto model = make_dimer(0.0, 100.0, 200.0, 0.0);
  const auto reorg = test::constant_reorg(2, 35.0);
  const auto basis = exciton_basis(model, reorg);
  const TimeGrid grid{1.0, 600};
  const auto tables = test::shared_bath(2, 35.0, 50.0, 300.0, grid);
  const auto gen = assemble_generator(basis, tables, reorg);
  const auto pd = pure_dephasing_rate_table(basis, tables);

  for (size_t s = 0; s < gen.rates.size(); ++s) {
    Eigen::MatrixXd off = gen.rates[s];
    off.diagonal().setZero();
    REQUIRE(off.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(0.5 * (gen.rates[s](1, 1) + gen.rates[s](2, 2)) == Approx(pd[s](1, 2)).margin(1e-12));
    REQUIRE(gen.fit_residual[s] < 1e-24);
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
  rho(1, 1) = rho(2, 2) = 0.5;
  rho(1, 2) = rho(2, 1) = 0.5;

  double integral = 0.0;
  for (int s = 0; s < grid.steps; ++s) {
    oracle_step(gen, s, rho);
    integral += 0.5 * grid.dt * (pd[s](1, 2) + pd[s + 1](1, 2));
    const double t = grid.time(s + 1);
    const Complex expected =
        0.5 * std::exp(-integral) * std::exp(Complex(0.0, angular(100.0) * t));
    REQUIRE(std::abs(rho(1, 2) - expected) < 1e-10);
  }
}

TEST_CASE("oracle conserves trace and hermiticity under random generators") {
  std::mt19937 rng(406);
  std::uniform_real_distribution<double> rate(0.0, 5e-3);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int levels = 3 + trial;
    GeneratorTable gen;
    gen.grid = TimeGrid{1.0, 100};
    gen.energies = Eigen::VectorXd::Zero(levels);
    for (int k = 0; k < levels; ++k) gen.energies(k) = 300.0 * amp(rng);
    gen.rates.assign(gen.grid.samples(), Eigen::MatrixXd::Zero(levels, levels));
    for (auto& r : gen.rates)
      for (int a = 0; a < levels; ++a)
        for (int b = 0; b < levels; ++b)
          if (a != b) r(a, b) = rate(rng);

    Eigen::MatrixXcd seed(levels, levels);
    for (int a = 0; a < levels; ++a)
      for (int b = 0; b < levels; ++b) seed(a, b) = Complex(amp(rng), amp(rng));
    Eigen::MatrixXcd rho = seed * seed.adjoint();
    rho /= rho.trace().real();

    for (int s = 0; s < gen.grid.steps; ++s) {
      oracle_step(gen, s, rho);
      REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-12);
      REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    REQUIRE(min_eigenvalue(rho) > -1e-10);
  }
}

TEST_CASE("population substep refinement is converged at the grid step") {
  const auto model = make_dimer(0.0, 200.0, 100.0, 120.0);
  const auto reorg = test::constant_reorg(2, 35.0);
  const auto basis = exciton_basis(model, reorg);
  const TimeGrid grid{1.0, 1000};
  const auto tables = test::shared_bath(2, 35.0, 50.0, 300.0, grid);
  const auto gen = assemble_generator(basis, tables, reorg);

  Eigen::MatrixXcd rho_site = Eigen::MatrixXcd::Zero(3, 3);
  rho_site(1, 1) = 1.0;
  Eigen::MatrixXcd coarse = from_site_matrix(basis, rho_site);
  Eigen::MatrixXcd fine = coarse;

  OracleOptions refined;
  refined.substeps = 2;
  for (int s = 0; s < grid.steps; ++s) {
    oracle_step(gen, s, coarse);
    oracle_step(gen, s, fine, refined);
  }
  REQUIRE((coarse - fine).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("seven-site generator preserves the mixed state's structure") {
  const auto model = test::seven_site_model();
  const auto reorg = test::constant_reorg(7, 35.0);
  const auto basis = exciton_basis(model, reorg);
  const TimeGrid grid{1.0, 1000};
  const double cutoff = 1.0 / (kAngularPerWavenumber * 50.0);
  const auto tables = test::shared_bath(7, 35.0, cutoff, 77.0, grid);
  const auto gen = assemble_generator(basis, tables, reorg);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(8, 8) / 8.0;
  for (int s = 0; s < grid.steps; ++s) {
    oracle_step(gen, s, rho);
    REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-10);
    REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
  REQUIRE(min_eigenvalue(rho) > -1e-10);
  REQUIRE(rho(0, 0).real() == Approx(1.0 / 8.0).margin(1e-12));
}
