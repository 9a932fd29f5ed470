#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eet/units.hpp"

namespace eet {

// Harmonic bath attached to one site. Either an Ohmic density with an
// exponential cutoff, J(w) = reorg * (w / cutoff) * exp(-w / cutoff), or a
// tabulated density read from a two-column file.
struct SpectralDensity {
  enum class Kind { Ohmic, Tabulated };
  Kind kind = Kind::Ohmic;
  double reorg = 0.0;   // cm^-1 (Ohmic parameter)
  double cutoff = 0.0;  // cm^-1
  Eigen::VectorXd tab_omega;  // strictly increasing, cm^-1
  Eigen::VectorXd tab_value;  // J(w) >= 0, cm^-1

  static SpectralDensity ohmic(double reorg, double cutoff) {
    if (reorg < 0.0) throw std::invalid_argument("reorganization energy must be >= 0");
    if (cutoff <= 0.0) throw std::invalid_argument("cutoff frequency must be > 0");
    SpectralDensity d;
    d.reorg = reorg;
    d.cutoff = cutoff;
    return d;
  }

  static SpectralDensity tabulated(Eigen::VectorXd omega, Eigen::VectorXd value) {
    if (omega.size() < 2 || omega.size() != value.size())
      throw std::invalid_argument("tabulated density needs matching omega/value columns");
    for (int i = 0; i < omega.size(); ++i) {
      if (i > 0 && omega(i) <= omega(i - 1))
        throw std::invalid_argument("tabulated density frequencies must be strictly increasing");
      if (omega(i) < 0.0) throw std::invalid_argument("tabulated density frequencies must be >= 0");
      if (value(i) < 0.0) throw std::invalid_argument("tabulated density values must be >= 0");
    }
    if (omega(0) == 0.0 && value(0) != 0.0)
      throw std::domain_error("tabulated density diverges: J(0) must vanish");
    SpectralDensity d;
    d.kind = Kind::Tabulated;
    d.tab_omega = std::move(omega);
    d.tab_value = std::move(value);
    return d;
  }

  // Linear interpolation below the first sample (through the origin) keeps
  // J(w)/w integrable.
  double value(double w) const {
    if (kind == Kind::Ohmic) return w <= 0.0 ? 0.0 : reorg * (w / cutoff) * std::exp(-w / cutoff);
    if (w <= 0.0) return 0.0;
    if (w <= tab_omega(0)) return tab_value(0) * (w / tab_omega(0));
    const int n = int(tab_omega.size());
    if (w >= tab_omega(n - 1)) return 0.0;
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (tab_omega(mid) <= w ? lo : hi) = mid;
    }
    const double f = (w - tab_omega(lo)) / (tab_omega(lo + 1) - tab_omega(lo));
    return tab_value(lo) + f * (tab_value(lo + 1) - tab_value(lo));
  }

  double max_frequency() const {
    return kind == Kind::Ohmic ? 40.0 * cutoff : tab_omega(tab_omega.size() - 1);
  }
};

// Integral of J(w)/w. Analytic for the Ohmic form; exact piecewise-linear
// segments for tabulated densities.
inline double reorganization_energy(const SpectralDensity& density) {
  if (density.kind == SpectralDensity::Kind::Ohmic) return density.reorg;
  double total = 0.0;
  const auto& w = density.tab_omega;
  const auto& j = density.tab_value;
  if (w(0) > 0.0) total += j(0);  // linear ramp from the origin integrates to J(w0)
  for (int i = 0; i + 1 < w.size(); ++i) {
    const double slope = (j(i + 1) - j(i)) / (w(i + 1) - w(i));
    const double intercept = j(i) - slope * w(i);
    double seg = slope * (w(i + 1) - w(i));
    if (intercept != 0.0) {
      if (w(i) == 0.0) throw std::domain_error("tabulated density diverges at zero frequency");
      seg += intercept * std::log(w(i + 1) / w(i));
    }
    total += seg;
  }
  return total;
}

namespace detail {

inline double coth_half(double x) {
  // coth(x/2) with the Laurent guard 2/x + x/6 near zero.
  const double h = 0.5 * x;
  if (std::abs(h) < 1e-6) return 2.0 / x + x / 6.0;
  return 1.0 / std::tanh(h);
}

inline double sin_minus_x(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
  }
  return std::sin(x) - x;
}

struct QuadratureNodes {
  Eigen::VectorXd omega;   // cm^-1
  Eigen::VectorXd weight;  // includes J(w) factor and panel weights
};

// Gauss-Legendre panels over [0, w_max]; weights already carry J(w).
inline QuadratureNodes spectral_nodes(const SpectralDensity& density, int panels,
                                      int points_per_panel) {
  // Nodes and weights come from Newton iteration on the Legendre polynomial,
  // which keeps the panel order flexible.
  const int n = points_per_panel;
  Eigen::VectorXd x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x(i) = t;
    w(i) = 2.0 / ((1.0 - t * t) * dp * dp);
  }

  const double w_max = density.max_frequency();
  QuadratureNodes nodes;
  nodes.omega.resize(panels * n);
  nodes.weight.resize(panels * n);
  const double width = w_max / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width, b = a + width;
    for (int i = 0; i < n; ++i) {
      const double wn = 0.5 * (a + b) + 0.5 * (b - a) * x(i);
      nodes.omega(p * n + i) = wn;
      nodes.weight(p * n + i) = 0.5 * (b - a) * w(i) * density.value(wn);
    }
  }
  return nodes;
}

}  // namespace detail

// Line-broadening function and its first two time derivatives on a uniform
// grid. g is dimensionless, gdot is 1/fs, gddot is 1/fs^2.
struct LineBroadeningTable {
  TimeGrid grid;
  std::vector<Complex> g;
  std::vector<Complex> gdot;
  std::vector<Complex> gddot;
};

struct QuadratureSpec {
  int panels = 160;
  int points_per_panel = 24;
};

// g(t) = integral dw J(w)/w^2 [(1 - cos wt) coth(w / 2 kB T) + i (sin wt - wt)]
// evaluated with all phases in angular units. Derivatives are taken under the
// integral sign, not by differencing.
inline LineBroadeningTable tabulate_line_broadening(const SpectralDensity& density,
                                                    double temperature, const TimeGrid& grid,
                                                    const QuadratureSpec& quad = {}) {
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be > 0");
  const auto nodes = detail::spectral_nodes(density, quad.panels, quad.points_per_panel);
  const int nn = int(nodes.omega.size());

  Eigen::VectorXd coth(nn), wang(nn);
  for (int i = 0; i < nn; ++i) {
    coth(i) = detail::coth_half(nodes.omega(i) / (kBoltzmann * temperature));
    wang(i) = angular(nodes.omega(i));
  }

  LineBroadeningTable table;
  table.grid = grid;
  table.g.resize(grid.samples());
  table.gdot.resize(grid.samples());
  table.gddot.resize(grid.samples());
  for (int s = 0; s < grid.samples(); ++s) {
    const double t = grid.time(s);
    double g_re = 0.0, g_im = 0.0, gd_re = 0.0, gd_im = 0.0, gdd_re = 0.0, gdd_im = 0.0;
    for (int i = 0; i < nn; ++i) {
      const double w = nodes.omega(i);
      const double x = wang(i) * t;
      const double sin_x = std::sin(x);
      const double half = std::sin(0.5 * x);
      const double one_minus_cos = 2.0 * half * half;
      const double cos_x = 1.0 - one_minus_cos;
      const double jw = nodes.weight(i);
      g_re += jw / (w * w) * one_minus_cos * coth(i);
      g_im += jw / (w * w) * detail::sin_minus_x(x);
      gd_re += jw / w * sin_x * coth(i);
      gd_im += jw / w * (-one_minus_cos);
      gdd_re += jw * cos_x * coth(i);
      gdd_im += jw * (-sin_x);
    }
    table.g[s] = Complex(g_re, g_im);
    table.gdot[s] = kAngularPerWavenumber * Complex(gd_re, gd_im);
    table.gddot[s] =
        kAngularPerWavenumber * kAngularPerWavenumber * Complex(gdd_re, gdd_im);
  }
  return table;
}

}  // namespace eet
