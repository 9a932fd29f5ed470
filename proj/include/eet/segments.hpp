#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eet/basis.hpp"
#include "eet/bath.hpp"
#include "eet/generator.hpp"
#include "eet/model.hpp"
#include "eet/pulses.hpp"

namespace eet {

// One piecewise-constant stretch of the run: a driving value (possibly zero),
// the level basis diagonalizing that stretch's Hamiltonian in the global
// rotating frame, and the rate generator on the stretch's local clock.
struct SegmentData {
  LevelBasis basis;
  GeneratorTable generator;
  bool driven = false;
};

struct RuntimeSegment {
  int begin_step = 0;
  int end_step = 0;
  std::shared_ptr<const SegmentData> data;

  int steps() const { return end_step - begin_step; }
};

struct SegmentPlan {
  double frame_omega = 0.0;  // cm^-1 shift applied to the ground level
  TimeGrid grid;
  LevelBasis excitons;  // undriven basis without the frame shift
  std::vector<RuntimeSegment> segments;
};

namespace detail {

inline int step_of(double time, double dt) {
  const double real = time / dt;
  const int step = int(std::lround(real));
  if (std::abs(real - step) > 1e-9 * std::max(1.0, std::abs(real)))
    throw std::invalid_argument("pulse segment boundaries must lie on the time grid");
  return step;
}

inline LineBroadeningTable slice_table(const LineBroadeningTable& table, int steps) {
  LineBroadeningTable out;
  out.grid = TimeGrid{table.grid.dt, steps};
  out.g.assign(table.g.begin(), table.g.begin() + steps + 1);
  out.gdot.assign(table.gdot.begin(), table.gdot.begin() + steps + 1);
  out.gddot.assign(table.gddot.begin(), table.gddot.begin() + steps + 1);
  return out;
}

inline std::string coupling_key(const Eigen::VectorXd& couplings, int steps) {
  std::string key(sizeof(int) + couplings.size() * sizeof(double), '\0');
  std::memcpy(key.data(), &steps, sizeof(int));
  std::memcpy(key.data() + sizeof(int), couplings.data(), couplings.size() * sizeof(double));
  return key;
}

}  // namespace detail

// Lays the pulse schedule onto the grid: leading/trailing field-free
// stretches added, zero-coupling segments normalized to field-free ones,
// abutting identical segments merged. Every stretch gets its own basis and
// generator; stretches with bitwise-equal couplings share them.
inline SegmentPlan build_segment_plan(const SiteBasisModel& model,
                                      const std::vector<LineBroadeningTable>& site_tables,
                                      const Eigen::VectorXd& site_reorg,
                                      const PulseSchedule& schedule, TimeGrid grid) {
  schedule.validate();
  const int sites = model.sites();
  const Eigen::VectorXd no_drive = Eigen::VectorXd::Zero(sites);

  SegmentPlan plan;
  plan.grid = grid;
  plan.frame_omega = schedule.carrier();

  struct Stretch {
    int begin, end;
    Eigen::VectorXd couplings;
  };
  std::vector<Stretch> stretches;
  auto push = [&](int begin, int end, const Eigen::VectorXd& g) {
    if (end <= begin) return;
    const Eigen::VectorXd& value = (g.size() && g.cwiseAbs().maxCoeff() > 0.0) ? g : no_drive;
    if (!stretches.empty() && stretches.back().end == begin &&
        stretches.back().couplings == value) {
      stretches.back().end = end;
      return;
    }
    stretches.push_back({begin, end, value});
  };

  int cursor = 0;
  for (const auto& segment : schedule.segments) {
    const int begin = detail::step_of(segment.start, grid.dt);
    const int end = detail::step_of(segment.end, grid.dt);
    if (begin < cursor) throw std::invalid_argument("pulse segments overlap the covered range");
    if (end > grid.steps)
      throw std::invalid_argument("pulse schedule extends beyond the run horizon");
    if (end == begin)
      throw std::invalid_argument("pulse segment shorter than one grid step");
    if (segment.couplings.size() != sites)
      throw std::invalid_argument("one pulse coupling per excited level expected");
    push(cursor, begin, no_drive);
    push(begin, end, segment.couplings);
    cursor = end;
  }
  push(cursor, grid.steps, no_drive);
  if (stretches.empty()) push(0, grid.steps, no_drive);

  plan.excitons = exciton_basis(model, site_reorg);
  const LevelBasis& excitons = plan.excitons;
  std::map<std::string, std::shared_ptr<const SegmentData>> cache;
  for (const auto& stretch : stretches) {
    const int steps = stretch.end - stretch.begin;
    const std::string key = detail::coupling_key(stretch.couplings, steps);
    auto found = cache.find(key);
    if (found == cache.end()) {
      auto data = std::make_shared<SegmentData>();
      data->driven = stretch.couplings.cwiseAbs().maxCoeff() > 0.0;
      if (data->driven) {
        data->basis = dressed_basis(excitons, plan.frame_omega, stretch.couplings, site_reorg).basis;
      } else {
        data->basis = excitons;
        data->basis.raw_energies(0) += plan.frame_omega;
        data->basis.energies(0) += plan.frame_omega;
      }
      std::vector<LineBroadeningTable> local(site_tables.size());
      for (size_t n = 0; n < site_tables.size(); ++n)
        local[n] = detail::slice_table(site_tables[n], steps);
      data->generator = assemble_generator(data->basis, local, site_reorg);
      found = cache.emplace(key, std::move(data)).first;
    }
    plan.segments.push_back({stretch.begin, stretch.end, found->second});
  }
  return plan;
}

}  // namespace eet
