#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eet {

// One constant-amplitude driving interval: carrier frequency plus a coupling
// between the ground level and each excited eigen level.
struct PulseSegment {
  double start = 0.0;  // fs
  double end = 0.0;    // fs
  double omega = 0.0;  // cm^-1
  Eigen::VectorXd couplings;

  double duration() const { return end - start; }
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;

  bool empty() const { return segments.empty(); }
  double carrier() const { return segments.empty() ? 0.0 : segments.front().omega; }

  void validate() const {
    for (size_t i = 0; i < segments.size(); ++i) {
      if (!(segments[i].end > segments[i].start))
        throw std::invalid_argument("pulse segment must have positive duration");
      if (i > 0 && segments[i].start != segments[i - 1].end)
        throw std::invalid_argument("pulse segments must be contiguous");
      if (segments[i].omega != segments.front().omega)
        throw std::invalid_argument("all pulse segments must share one carrier");
    }
  }
};

inline PulseSchedule step_pulse(double t1, double omega, const Eigen::VectorXd& couplings) {
  if (!(t1 > 0.0)) throw std::invalid_argument("step pulse duration must be positive");
  PulseSchedule schedule;
  schedule.segments.push_back({0.0, t1, omega, couplings});
  return schedule;
}

struct GaussianPulseSpec {
  double center = 0.0;        // fs
  double width = 0.0;         // fs
  double omega = 0.0;         // cm^-1
  Eigen::VectorXd peak;       // cm^-1 per excited level
  double tolerance = 1e-6;    // relative area error target
  int segment_cap = (1 << 15) + 1;
};

struct DiscretizedPulse {
  PulseSchedule schedule;
  int segment_count = 0;
  double area_error = 0.0;  // relative, against the truncated profile area
};

// Splits [begin, end] into 2^n + 1 equal midpoint-sampled sub-pulses, raising
// n until the step-sum area matches the reference area of the smooth profile
// within tolerance.
inline DiscretizedPulse discretize_envelope(const std::function<double(double)>& envelope,
                                            double begin, double end, double reference_area,
                                            double omega, const Eigen::VectorXd& peak,
                                            double tolerance, int segment_cap) {
  if (!(end > begin)) throw std::invalid_argument("profile support must have positive width");
  if (!(tolerance > 0.0)) throw std::invalid_argument("area tolerance must be positive");
  if (!(reference_area > 0.0)) throw std::invalid_argument("profile area must be positive");

  for (int n = 1;; ++n) {
    const int count = (1 << n) + 1;
    if (count > segment_cap)
      throw std::runtime_error("area tolerance unreachable below the segment-count cap of " +
                               std::to_string(segment_cap) + " sub-pulses");
    const double step = (end - begin) / count;
    double area = 0.0;
    for (int i = 0; i < count; ++i) area += envelope(begin + (i + 0.5) * step) * step;
    const double error = std::abs(area - reference_area) / reference_area;
    if (error >= tolerance) continue;

    DiscretizedPulse result;
    result.segment_count = count;
    result.area_error = error;
    result.schedule.segments.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double lo = begin + i * step;
      const double hi = (i + 1 == count) ? end : begin + (i + 1) * step;
      result.schedule.segments.push_back(
          {lo, hi, omega, peak * envelope(begin + (i + 0.5) * step)});
    }
    return result;
  }
}

// Gaussian profile exp[-2 (t - t0)^2 / T^2] truncated to [t0 - T, t0 + T];
// the truncated area has the closed form T sqrt(pi/2) erf(sqrt(2)).
inline DiscretizedPulse discretize_gaussian(const GaussianPulseSpec& spec) {
  if (!(spec.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  const double t0 = spec.center;
  const double w = spec.width;
  const auto envelope = [t0, w](double t) {
    const double x = (t - t0) / w;
    return std::exp(-2.0 * x * x);
  };
  const double reference = w * std::sqrt(M_PI / 2.0) * std::erf(std::sqrt(2.0));
  return discretize_envelope(envelope, t0 - w, t0 + w, reference, spec.omega, spec.peak,
                             spec.tolerance, spec.segment_cap);
}

}  // namespace eet
