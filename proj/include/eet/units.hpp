#pragma once

#include <cmath>
#include <complex>

namespace eet {

using Complex = std::complex<double>;

// Energies are wavenumbers (cm^-1) and times are femtoseconds throughout.
// 2*pi*c with c in cm/fs converts a wavenumber to an angular frequency.
inline constexpr double kAngularPerWavenumber = 1.8836515673e-4;  // rad/fs per cm^-1
inline constexpr double kBoltzmann = 0.6950348;                   // cm^-1 per K

inline double angular(double wavenumber) { return wavenumber * kAngularPerWavenumber; }

// Uniform simulation grid: t_i = i * dt for i = 0..steps.
struct TimeGrid {
  double dt = 1.0;
  int steps = 0;

  int samples() const { return steps + 1; }
  double time(int i) const { return dt * i; }
  double horizon() const { return dt * steps; }
};

}  // namespace eet
