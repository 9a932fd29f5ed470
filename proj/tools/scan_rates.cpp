#include <cstdio>

#include "eet/segments.hpp"

using namespace eet;

namespace {

SiteBasisModel dimer(double coupling) {
  SiteBasisModel model;
  model.ground_energy = -12800.0;
  model.site_energies = Eigen::Vector2d(200.0, 100.0);
  model.couplings = Eigen::MatrixXd::Zero(2, 2);
  model.couplings(0, 1) = model.couplings(1, 0) = coupling;
  return model;
}

void scan(const char* name, const GeneratorTable& gen) {
  const int levels = gen.levels();
  double min_rate = 0.0;
  int min_sample = -1, min_k = -1, min_kp = -1;
  double min_late = 0.0;
  int late_sample = -1, late_k = -1, late_kp = -1;
  for (size_t s = 0; s < gen.rates.size(); ++s) {
    for (int k = 0; k < levels; ++k)
      for (int kp = 0; kp < levels; ++kp) {
        const double r = gen.rates[s](k, kp);
        if (r < min_rate) {
          min_rate = r;
          min_sample = int(s);
          min_k = k;
          min_kp = kp;
        }
        if (s >= 100 && r < min_late) {
          min_late = r;
          late_sample = int(s);
          late_k = k;
          late_kp = kp;
        }
      }
  }
  std::printf("%s: samples=%zu min=%.3e at s=%d (%d,%d); min after s=100: %.3e at s=%d (%d,%d)\n",
              name, gen.rates.size(), min_rate, min_sample, min_k, min_kp, min_late, late_sample,
              late_k, late_kp);
  std::printf("  sample rates at s=5:\n");
  for (int k = 0; k < levels; ++k) {
    std::printf("   ");
    for (int kp = 0; kp < levels; ++kp) std::printf(" % .4e", gen.rates[5](k, kp));
    std::printf("\n");
  }
}

}  // namespace

int main() {
  for (const double j : {120.0, 20.0}) {
    const auto model = dimer(j);
    const Eigen::VectorXd reorg = Eigen::VectorXd::Constant(2, 35.0);
    const TimeGrid grid{1.0, 1000};
    const auto density = SpectralDensity::ohmic(35.0, 50.0);
    const auto table = tabulate_line_broadening(density, 300.0, grid);
    const std::vector<LineBroadeningTable> tables(2, table);

    std::printf("== dimer J=%g ==\n", j);
    const auto free_plan = build_segment_plan(model, tables, reorg, {}, grid);
    scan("free", free_plan.segments[0].data->generator);

    const auto driven_plan = build_segment_plan(
        model, tables, reorg, step_pulse(100.0, 13000.0, Eigen::Vector2d(100.0, 200.0)), grid);
    scan("driven", driven_plan.segments[0].data->generator);
    scan("tail", driven_plan.segments[1].data->generator);
  }
  return 0;
}
