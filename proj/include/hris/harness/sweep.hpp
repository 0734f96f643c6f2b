#pragma once

// Monte-Carlo sweep: every (sweep value, scheme, realization) cell is an
// independent job. Channel and design seeds depend only on the realization
// index, so cells can run in any order and schemes see the same channels.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "hris/channel.hpp"
#include "hris/harness/config.hpp"
#include "hris/optimizer.hpp"
#include "hris/sysmodel.hpp"
#include "hris/units.hpp"

namespace hris::harness {

enum class RowStatus { Ok, Infeasible, Fallback };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Infeasible: return "infeasible";
    case RowStatus::Fallback: return "fallback";
  }
  return "?";
}

struct SweepResult {
  SweepVariable sweep_var = SweepVariable::Pt;
  double sweep_value = 0.0;
  opt::Scheme scheme = opt::Scheme::Hybrid;
  int realization = 0;
  double wc_illum_dbm = std::numeric_limits<double>::quiet_NaN();
  double min_sinr_db = std::numeric_limits<double>::quiet_NaN();
  double max_tgt_noise_dbm = std::numeric_limits<double>::quiet_NaN();
  double pris_dbm = std::numeric_limits<double>::quiet_NaN();
  double thm1_bound_dbm = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  RowStatus status = RowStatus::Infeasible;

  // not written to the CSV
  std::vector<double> best_so_far;
  double tr_r = 0.0;    // Tr(R) of the returned beamformers, mW
  double p_t = 0.0;     // power budget at this sweep point, mW
  std::string detail;  // failure reason for infeasible rows

  bool feasible() const { return status != RowStatus::Infeasible; }
};

struct Realization {
  channel::ScenarioGeometry geometry;
  channel::ChannelSet channels;
};

inline Realization draw_realization(const SimulationConfig& cfg, int r) {
  const auto index = static_cast<std::uint64_t>(r);
  Realization out;
  out.geometry = channel::place_uniform(cfg.geometry, cfg.area, cfg.users, cfg.targets, derive_seed(cfg.seed, {index, 0}));
  out.channels = channel::synthesize(out.geometry, cfg.fading, derive_seed(cfg.seed, {index, 1}));
  return out;
}

inline SweepResult run_cell(const SimulationConfig& cfg, const Realization& real, double value, opt::Scheme scheme,
                            int r) {
  SweepResult row;
  row.sweep_var = cfg.sweep;
  row.sweep_value = value;
  row.scheme = scheme;
  row.realization = r;

  DesignConfig design;
  HybridRisSpec spec;
  apply_sweep(cfg.sweep, value, cfg, design, spec);
  row.p_t = design.p_t;

  const auto trace = opt::run_scheme(scheme, real.channels, design, spec, derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), 2}));
  row.iterations = static_cast<int>(trace.iterations.size());
  for (const auto& it : trace.iterations) row.best_so_far.push_back(it.best_so_far);
  if (!trace.feasible()) {
    row.status = RowStatus::Infeasible;
    row.detail = trace.failure;
    return row;
  }

  const auto m = evaluate_metrics(real.channels, trace.ris, trace.beamformers, trace.spec, design.sigma2);
  row.wc_illum_dbm = units::mw_to_dbm(m.worst_illumination);
  row.min_sinr_db = units::linear_to_db(m.min_sinr);
  row.max_tgt_noise_dbm = units::mw_to_dbm(m.max_target_noise);
  row.pris_dbm = units::mw_to_dbm(m.ris_power);
  const double zeta = channel::dfbs_ris_pathloss(real.geometry, cfg.fading);
  row.thm1_bound_dbm =
      units::mw_to_dbm(theorem1_bound(trace.spec, zeta, design.p_t, cfg.fading.rician_factor, cfg.geometry.antennas));
  row.tr_r = trace.beamformers.covariance().trace().real();
  row.status = trace.any_fallback ? RowStatus::Fallback : RowStatus::Ok;
  return row;
}

/// Rows in canonical order: sweep value, then scheme as listed, then realization.
inline std::vector<SweepResult> run_sweep(const SimulationConfig& cfg) {
  cfg.validate();
  const std::size_t values = cfg.sweep_values.size();
  const std::size_t schemes = cfg.schemes.size();
  const auto reals = static_cast<std::size_t>(cfg.realizations);
  const std::size_t cells = values * schemes * reals;
  std::vector<SweepResult> rows(cells);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells && !failed; i = next++) {
      const std::size_t v = i / (schemes * reals);
      const std::size_t s = (i / reals) % schemes;
      const int r = static_cast<int>(i % reals);
      try {
        const auto real = draw_realization(cfg, r);
        rows[i] = run_cell(cfg, real, cfg.sweep_values[v], cfg.schemes[s], r);
      } catch (...) {
        // a bug, not an infeasible cell: stop everyone and rethrow below
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };

  std::size_t threads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(1, std::min(threads, cells));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

/// The per-row checks every feasible row must pass.
struct RowCheck {
  bool sinr = true;
  bool noise = true;
  bool power = true;
  bool monotone = true;
  bool ok() const { return sinr && noise && power && monotone; }
};

inline RowCheck check_row(const SweepResult& row, double gamma_db, double r_max_dbm) {
  RowCheck c;
  for (std::size_t i = 1; i < row.best_so_far.size(); ++i)
    if (row.best_so_far[i] < row.best_so_far[i - 1]) c.monotone = false;
  if (!row.feasible()) return c;
  c.sinr = row.min_sinr_db >= gamma_db - 0.01;
  c.noise = row.max_tgt_noise_dbm <= r_max_dbm + 0.01;
  c.power = row.tr_r <= row.p_t + 1e-6;
  return c;
}

/// Gamma in dB at a row's sweep point.
inline double row_gamma_db(const SimulationConfig& cfg, const SweepResult& row) {
  return cfg.sweep == SweepVariable::Gamma ? row.sweep_value : cfg.gamma_db;
}

}  // namespace hris::harness
