#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "eet/basis.hpp"
#include "eet/generator.hpp"
#include "eet/rng.hpp"
#include "eet/segments.hpp"
#include "eet/units.hpp"

namespace eet {

// Discrete ensemble states. Entries 0..levels-1 are the eigenstates of the
// current stretch; later entries are superpositions registered at the start of
// the run or whenever a stretch boundary re-expresses occupied eigenstates.
// Entries are never removed. A superposition whose occupation reaches zero is
// flagged dead: reverse jumps weight their sources by occupation, so such an
// entry can never be repopulated and stops being evolved.
struct StateRegistry {
  int levels = 0;
  std::vector<Eigen::VectorXcd> kets;  // level coordinates of the current stretch
  std::vector<char> dead;

  int size() const { return int(kets.size()); }
  bool is_eigen(int index) const { return index < levels; }
  int superpositions() const { return size() - levels; }
};

inline StateRegistry make_registry(int levels) {
  if (levels < 1) throw std::invalid_argument("registry needs at least one level");
  StateRegistry reg;
  reg.levels = levels;
  reg.kets.resize(levels);
  reg.dead.assign(levels, 0);
  for (int k = 0; k < levels; ++k) {
    reg.kets[k] = Eigen::VectorXcd::Zero(levels);
    reg.kets[k](k) = 1.0;
  }
  return reg;
}

// Integer ensemble bookkeeping. member_entry is authoritative; counts mirrors
// it and is kept in step so occupation ratios never require a member scan.
struct TrajectoryEnsemble {
  uint64_t seed = 0;
  std::vector<int32_t> member_entry;
  std::vector<int64_t> counts;

  int64_t members() const { return int64_t(member_entry.size()); }
};

inline int register_superposition(StateRegistry& reg, TrajectoryEnsemble& ens,
                                  Eigen::VectorXcd ket, int64_t count) {
  reg.kets.push_back(std::move(ket));
  reg.dead.push_back(count == 0 ? 1 : 0);
  ens.counts.push_back(count);
  return reg.size() - 1;
}

namespace detail {

struct Outcome {
  double cumulative = 0.0;
  int32_t target = 0;
};

// Per-entry single-draw outcome tables for one step under a frozen rate
// matrix. Positive channels carry exactly integrated first-jump weights, so a
// lone decay channel reproduces e^{-R dt} survival to rounding. Channels with
// negative rate move members from the destination eigenstate back into every
// occupied source, weighted by frozen occupation ratios.
inline std::vector<std::vector<Outcome>> build_outcome_tables(const StateRegistry& reg,
                                                              const TrajectoryEnsemble& ens,
                                                              const Eigen::MatrixXd& rates,
                                                              double dt) {
  const int levels = reg.levels;
  const int entries = reg.size();
  std::vector<std::vector<Outcome>> tables(entries);

  auto append = [](std::vector<Outcome>& out, double probability, int32_t target) {
    const double base = out.empty() ? 0.0 : out.back().cumulative;
    out.push_back({base + probability, target});
  };

  for (int alpha = 0; alpha < entries; ++alpha) {
    if (ens.counts[alpha] == 0 || reg.dead[alpha]) continue;
    auto& out = tables[alpha];
    if (reg.is_eigen(alpha)) {
      double outflow = 0.0;
      for (int k = 0; k < levels; ++k)
        if (k != alpha && rates(k, alpha) > 0.0) outflow += rates(k, alpha);
      if (outflow > 0.0) {
        const double factor = -std::expm1(-outflow * dt) / outflow;
        for (int k = 0; k < levels; ++k)
          if (k != alpha && rates(k, alpha) > 0.0) append(out, rates(k, alpha) * factor, k);
      }
    } else {
      const Eigen::VectorXcd& ket = reg.kets[alpha];
      for (int c = 0; c < levels; ++c) {
        const double weight = std::norm(ket(c));
        if (weight == 0.0) continue;
        double outflow = 0.0;
        for (int k = 0; k < levels; ++k)
          if (rates(k, c) > 0.0) outflow += rates(k, c);
        if (outflow <= 0.0) continue;
        const double factor = -weight * std::expm1(-outflow * dt) / outflow;
        for (int k = 0; k < levels; ++k)
          if (rates(k, c) > 0.0) append(out, rates(k, c) * factor, k);
      }
    }
  }

  // Reverse channels: rate(k, k') < 0 moves members out of eigenstate k into
  // each occupied source beta at (N_beta / N_k) |rate| dt |<k'|beta>|^2.
  for (int k = 0; k < levels; ++k) {
    if (ens.counts[k] == 0) continue;
    auto& out = tables[k];
    for (int kp = 0; kp < levels; ++kp) {
      const double rate = rates(k, kp);
      if (rate >= 0.0) continue;
      for (int beta = 0; beta < entries; ++beta) {
        if (beta == k || ens.counts[beta] == 0 || reg.dead[beta]) continue;
        const double weight =
            reg.is_eigen(beta) ? (beta == kp ? 1.0 : 0.0) : std::norm(reg.kets[beta](kp));
        if (weight == 0.0) continue;
        const double probability =
            double(ens.counts[beta]) / double(ens.counts[k]) * (-rate) * dt * weight;
        append(out, probability, int32_t(beta));
      }
    }
  }

  for (int alpha = 0; alpha < entries; ++alpha)
    if (!tables[alpha].empty() && tables[alpha].back().cumulative > 1.0)
      throw std::runtime_error(
          "per-step jump probability exceeded 1; reduce the time step and rerun");
  return tables;
}

}  // namespace detail

// One stochastic step: every member draws one uniform number keyed by
// (seed, member index, global step) and scans its entry's outcome table.
// Workers split the member range into contiguous blocks and merge integer
// count deltas, so the result is identical for any worker count.
inline void jump_step(StateRegistry& reg, TrajectoryEnsemble& ens, const Eigen::MatrixXd& rates,
                      double dt, uint64_t global_step, int workers = 1) {
  if (rates.rows() != reg.levels || rates.cols() != reg.levels)
    throw std::invalid_argument("rate matrix does not match the registry level count");
  const auto tables = detail::build_outcome_tables(reg, ens, rates, dt);
  const int64_t members = ens.members();
  const int entries = reg.size();

  auto scan = [&](int64_t begin, int64_t end, std::vector<int64_t>& delta) {
    for (int64_t i = begin; i < end; ++i) {
      const int32_t entry = ens.member_entry[i];
      const auto& out = tables[entry];
      if (out.empty()) continue;
      const double u = uniform_draw(ens.seed, uint64_t(i), global_step);
      if (u >= out.back().cumulative) continue;
      auto hit = std::upper_bound(out.begin(), out.end(), u,
                                  [](double v, const detail::Outcome& o) { return v < o.cumulative; });
      ens.member_entry[i] = hit->target;
      ++delta[hit->target];
      --delta[entry];
    }
  };

  std::vector<int64_t> delta(entries, 0);
  const int used = int(std::max<int64_t>(1, std::min<int64_t>(workers, members)));
  if (used == 1) {
    scan(0, members, delta);
  } else {
    std::vector<std::vector<int64_t>> parts(used, std::vector<int64_t>(entries, 0));
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int w = 0; w < used; ++w)
      pool.emplace_back(scan, members * w / used, members * (w + 1) / used, std::ref(parts[w]));
    for (auto& t : pool) t.join();
    for (const auto& part : parts)
      for (int e = 0; e < entries; ++e) delta[e] += part[e];
  }

  int64_t total = 0;
  for (int e = 0; e < entries; ++e) {
    ens.counts[e] += delta[e];
    if (ens.counts[e] < 0) throw std::logic_error("trajectory count went negative");
    total += ens.counts[e];
  }
  if (total != members) throw std::logic_error("trajectory count conservation violated");
  for (int e = reg.levels; e < entries; ++e)
    if (ens.counts[e] == 0) reg.dead[e] = 1;
}

// Deterministic drift of the occupied superpositions: exact per-component
// phase and half-outflow decay under the frozen generator, followed by
// renormalization. The decay exponent uses the algebraic column sums, so
// negative channels feed amplitude back coherently.
inline void evolve_superpositions(StateRegistry& reg, const TrajectoryEnsemble& ens,
                                  const Eigen::VectorXd& energies, const Eigen::MatrixXd& rates,
                                  double dt) {
  const Eigen::VectorXd outflow = total_outflow(rates);
  for (int alpha = reg.levels; alpha < reg.size(); ++alpha) {
    if (reg.dead[alpha] || ens.counts[alpha] == 0) continue;
    Eigen::VectorXcd& ket = reg.kets[alpha];
    for (int c = 0; c < reg.levels; ++c)
      ket(c) *= std::exp(Complex(-0.5 * outflow(c) * dt, -angular(energies(c)) * dt));
    const double norm = ket.norm();
    if (norm < 1e-12)
      throw std::runtime_error("superposition norm collapsed during deterministic evolution");
    ket /= norm;
  }
}

// Carries the registry across a stretch boundary. Superposition kets are
// re-expressed in the new eigenbasis. Each old eigenstate either coincides
// with a new one (pure relabeling, counts merged) or is registered as a new
// superposition carrying its occupation; either way every old eigen entry is
// accounted for and members are remapped in place.
inline void boundary_transition(StateRegistry& reg, TrajectoryEnsemble& ens,
                                const LevelBasis& old_basis, const LevelBasis& new_basis) {
  const int levels = reg.levels;
  if (old_basis.levels() != levels || new_basis.levels() != levels)
    throw std::invalid_argument("boundary bases must share the registry level count");
  const Eigen::MatrixXd transform = new_basis.site_coeff * old_basis.site_coeff.transpose();

  for (int alpha = levels; alpha < reg.size(); ++alpha) {
    reg.kets[alpha] = transform * reg.kets[alpha];
    const double norm = reg.kets[alpha].norm();
    if (norm > 0.0) reg.kets[alpha] /= norm;
  }

  std::vector<int64_t> old_counts(ens.counts.begin(), ens.counts.begin() + levels);
  for (int k = 0; k < levels; ++k) ens.counts[k] = 0;

  std::vector<int32_t> remap(levels);
  for (int k = 0; k < levels; ++k) {
    const Eigen::VectorXd image = transform.col(k);
    int coincident = -1;
    for (int j = 0; j < levels; ++j)
      if (image(j) * image(j) > 1.0 - 1e-12) {
        coincident = j;
        break;
      }
    if (coincident >= 0) {
      ens.counts[coincident] += old_counts[k];
      remap[k] = int32_t(coincident);
    } else {
      remap[k] = int32_t(
          register_superposition(reg, ens, image.cast<Complex>().normalized(), old_counts[k]));
    }
  }

  for (auto& entry : ens.member_entry)
    if (entry < levels) entry = remap[entry];
}

// Ensemble average in the level coordinates of the current stretch.
inline Eigen::MatrixXcd reconstruct_density(const StateRegistry& reg,
                                            const TrajectoryEnsemble& ens) {
  const int levels = reg.levels;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(levels, levels);
  const double total = double(ens.members());
  for (int alpha = 0; alpha < reg.size(); ++alpha) {
    if (ens.counts[alpha] == 0) continue;
    const double weight = double(ens.counts[alpha]) / total;
    if (reg.is_eigen(alpha))
      rho(alpha, alpha) += weight;
    else
      rho.noalias() += weight * (reg.kets[alpha] * reg.kets[alpha].adjoint());
  }
  return rho;
}

enum class InitialKind { Ground, Site, Exciton };

struct InitialState {
  InitialKind kind = InitialKind::Ground;
  int index = 0;  // site 1..M or excited level 1..M
};

inline Eigen::VectorXcd initial_site_ket(const InitialState& init, const LevelBasis& excitons) {
  const int sites = excitons.sites();
  Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(sites + 1);
  switch (init.kind) {
    case InitialKind::Ground:
      ket(0) = 1.0;
      break;
    case InitialKind::Site:
      if (init.index < 1 || init.index > sites)
        throw std::invalid_argument("initial site index out of range");
      ket(init.index) = 1.0;
      break;
    case InitialKind::Exciton:
      if (init.index < 1 || init.index > sites)
        throw std::invalid_argument("initial excited level index out of range");
      ket = excitons.site_coeff.row(init.index).transpose().cast<Complex>();
      break;
  }
  return ket;
}

struct EnsembleOptions {
  int64_t trajectories = 0;
  uint64_t seed = 0;
  int stride = 1;
  int workers = 1;
};

struct EnsembleSnapshot {
  double t = 0.0;
  Eigen::MatrixXcd rho_site;  // lab frame
};

struct EnsembleResult {
  std::vector<EnsembleSnapshot> snapshots;
  int registry_entries = 0;
  int registry_eigen = 0;
  int registry_superpositions = 0;
  std::vector<int64_t> final_counts;
};

// Full stochastic run over a segment plan: jump step and deterministic drift
// per grid step, registry expansion at stretch boundaries, density snapshots
// every `stride` steps converted to the site basis in the lab frame.
inline EnsembleResult run_ensemble(const SegmentPlan& plan, const InitialState& init,
                                   const EnsembleOptions& opt) {
  if (plan.segments.empty()) throw std::invalid_argument("segment plan is empty");
  if (opt.trajectories < 1) throw std::invalid_argument("at least one trajectory is required");
  if (opt.stride < 1) throw std::invalid_argument("snapshot stride must be >= 1");
  if (opt.workers < 1) throw std::invalid_argument("worker count must be >= 1");

  const int levels = plan.excitons.levels();
  StateRegistry reg = make_registry(levels);
  TrajectoryEnsemble ens;
  ens.seed = opt.seed;
  ens.counts.assign(levels, 0);

  const Eigen::VectorXcd site_ket = initial_site_ket(init, plan.excitons);
  const Eigen::VectorXcd coeff = plan.segments.front().data->basis.from_site(site_ket);
  int start_entry = -1;
  for (int j = 0; j < levels; ++j)
    if (std::norm(coeff(j)) > 1.0 - 1e-12) {
      start_entry = j;
      break;
    }
  if (start_entry >= 0)
    ens.counts[start_entry] = opt.trajectories;
  else
    start_entry = register_superposition(reg, ens, coeff.normalized(), opt.trajectories);
  ens.member_entry.assign(size_t(opt.trajectories), int32_t(start_entry));

  EnsembleResult result;
  const LevelBasis* basis = &plan.segments.front().data->basis;
  auto snapshot = [&](double t) {
    const Eigen::MatrixXcd rho_level = reconstruct_density(reg, ens);
    Eigen::MatrixXcd rho_site =
        basis->site_coeff.transpose() * rho_level * basis->site_coeff;
    apply_ground_phase(rho_site, plan.frame_omega, t);
    result.snapshots.push_back({t, std::move(rho_site)});
  };
  snapshot(0.0);

  for (const auto& segment : plan.segments) {
    if (segment.begin_step > 0)
      boundary_transition(reg, ens, *basis, segment.data->basis);
    basis = &segment.data->basis;
    for (int local = 0; local < segment.steps(); ++local) {
      const int global = segment.begin_step + local;
      const Eigen::MatrixXd rates = step_rates(segment.data->generator, local);
      jump_step(reg, ens, rates, plan.grid.dt, uint64_t(global), opt.workers);
      evolve_superpositions(reg, ens, segment.data->generator.energies, rates, plan.grid.dt);
      if ((global + 1) % opt.stride == 0) snapshot(plan.grid.dt * (global + 1));
    }
  }

  result.registry_entries = reg.size();
  result.registry_eigen = reg.levels;
  result.registry_superpositions = reg.superpositions();
  result.final_counts = ens.counts;
  return result;
}

}  // namespace eet
