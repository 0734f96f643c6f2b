#pragma once

// Alternating beamformer / RIS design and the baseline schemes it is compared
// against.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hris/bf_design.hpp"
#include "hris/ris_design.hpp"
#include "hris/rng.hpp"
#include "hris/sysmodel.hpp"

namespace hris::opt {

enum class Scheme { Hybrid, PassiveRIS, RandomRIS, NoRIS };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Hybrid: return "hybrid";
    case Scheme::PassiveRIS: return "passive";
    case Scheme::RandomRIS: return "random";
    case Scheme::NoRIS: return "noris";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::Hybrid, Scheme::PassiveRIS, Scheme::RandomRIS, Scheme::NoRIS})
    if (name == to_string(s)) return s;
  throw ValidationError("unknown scheme '" + name + "'");
}

enum class RunStatus {
  Ok,
  InfeasibleRealization,  // the first beamformer problem has no solution
  SolverFailure,          // the first beamformer problem could not be solved
};

struct IterationRecord {
  double bf_relaxed = 0.0;
  double bf_objective = 0.0;  // recovered beamformers, RIS state entering the iteration
  double ris_relaxed = std::numeric_limits<double>::quiet_NaN();
  double ris_objective = std::numeric_limits<double>::quiet_NaN();
  double best_so_far = 0.0;
  double min_sinr = 0.0;  // at the pair the iteration ends with
  bool ris_fallback = false;
  sdp::Status bf_status = sdp::Status::NumericalFailure;
  sdp::Status ris_status = sdp::Status::NumericalFailure;
};

struct AlternationTrace {
  RunStatus status = RunStatus::SolverFailure;
  std::vector<IterationRecord> iterations;
  BeamformerSet beamformers;
  RisState ris;
  HybridRisSpec spec;  // the surface model the final pair is evaluated under
  double objective = 0.0;
  bool any_fallback = false;
  std::string failure;  // why the run stopped early, if it did

  bool feasible() const { return status == RunStatus::Ok; }
};

/// Uniform phases; active entries start at full gain eta.
inline RisState initialize_ris(const HybridRisSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  RisState out{CVector(spec.elements), false};
  for (Eigen::Index i = 0; i < spec.elements; ++i) out.omega(i) = std::polar(spec.is_active(i) ? spec.eta : 1.0, phase(engine));
  return out;
}

namespace detail {

inline double min_sinr(const channel::ChannelSet& ch, const RisState& ris, const BeamformerSet& bf,
                       const HybridRisSpec& spec, double sigma2) {
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ch.users(); ++k) out = std::min(out, user_sinr(ch, ris, bf, k, sigma2, spec));
  return out;
}

/// One beamformer solve; recovery failures count as a numerical failure.
inline bf::BfDesign solve_bf(const channel::ChannelSet& ch, const RisState& ris, const DesignConfig& cfg,
                             const HybridRisSpec& spec, std::string& failure) {
  try {
    auto d = bf::design_beamformers(ch, ris, cfg, spec);
    if (d.status != sdp::Status::Optimal) failure = std::string("beamformer SDP: ") + sdp::to_string(d.status);
    return d;
  } catch (const DegenerateBeamformer& e) {
    failure = e.what();
  } catch (const NotPsd& e) {
    failure = e.what();
  }
  bf::BfDesign d;
  d.status = sdp::Status::NumericalFailure;
  return d;
}

inline bool noise_within_cap(const channel::ChannelSet& ch, const RisState& ris, const DesignConfig& cfg,
                             const HybridRisSpec& spec) {
  for (std::size_t m = 0; m < ch.targets(); ++m)
    if (target_ris_noise(ch, ris, m, spec) > cfg.r_max * (1.0 + 1e-6)) return false;
  return true;
}

inline RunStatus first_failure(sdp::Status s) {
  return s == sdp::Status::Infeasible ? RunStatus::InfeasibleRealization : RunStatus::SolverFailure;
}

}  // namespace detail

/// Up to cfg.max_iterations rounds of (beamformers | RIS) then (RIS | beamformers).
/// The returned pair is the best feasible one seen at any half-step.
inline AlternationTrace alternate(const channel::ChannelSet& ch, const DesignConfig& cfg, const HybridRisSpec& spec,
                                  std::uint64_t seed) {
  cfg.validate();
  spec.validate();
  AlternationTrace out;
  out.spec = spec;
  RisState ris = initialize_ris(spec, derive_seed(seed, {0}));
  double best = -std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::quiet_NaN();

  auto consider = [&](const BeamformerSet& bf, const RisState& state, double value) {
    if (value > best) {
      best = value;
      out.beamformers = bf;
      out.ris = state;
    }
  };

  for (int it = 0; it < cfg.max_iterations; ++it) {
    IterationRecord rec;
    std::string failure;
    const auto bfd = detail::solve_bf(ch, ris, cfg, spec, failure);
    rec.bf_status = bfd.status;
    if (bfd.status != sdp::Status::Optimal) {
      if (it == 0) {
        out.status = detail::first_failure(bfd.status);
        out.failure = failure;
        return out;
      }
      out.failure = failure;
      break;
    }
    rec.bf_relaxed = bfd.relaxed_objective;
    rec.bf_objective = bfd.objective;
    // the beamformer step cannot see r_m, so the entering state may exceed r_max
    if (detail::noise_within_cap(ch, ris, cfg, spec)) consider(bfd.beamformers, ris, bfd.objective);

    const auto rd = ris::design_ris(ch, bfd.beamformers, cfg, spec, ris, derive_seed(seed, {1, static_cast<std::uint64_t>(it)}));
    rec.ris_status = rd.status;
    rec.ris_fallback = rd.fallback;
    out.any_fallback = out.any_fallback || rd.fallback;
    if (rd.status == sdp::Status::Optimal) rec.ris_relaxed = rd.relaxed_objective;
    rec.ris_objective = rd.objective;
    // a fallback hands back the incumbent, which the beamformer step just scored
    if (!rd.fallback) consider(bfd.beamformers, rd.ris, rd.objective);
    ris = rd.ris;

    rec.best_so_far = best;
    rec.min_sinr = detail::min_sinr(ch, ris, bfd.beamformers, spec, cfg.sigma2);
    out.iterations.push_back(rec);

    const bool settled = std::isfinite(previous) && std::abs(bfd.objective - previous) <= cfg.convergence_tolerance * std::abs(previous);
    previous = bfd.objective;
    if (settled) break;
  }
  out.status = RunStatus::Ok;
  out.objective = best;
  return out;
}

/// One beamformer design against a fixed RIS state.
inline AlternationTrace single_pass(const channel::ChannelSet& ch, const DesignConfig& cfg, const HybridRisSpec& spec,
                                    const RisState& ris) {
  cfg.validate();
  AlternationTrace out;
  out.spec = spec;
  IterationRecord rec;
  std::string failure;
  const auto bfd = detail::solve_bf(ch, ris, cfg, spec, failure);
  rec.bf_status = bfd.status;
  if (bfd.status != sdp::Status::Optimal) {
    out.status = detail::first_failure(bfd.status);
    out.failure = failure;
    return out;
  }
  rec.bf_relaxed = bfd.relaxed_objective;
  rec.bf_objective = bfd.objective;
  rec.best_so_far = bfd.objective;
  rec.min_sinr = detail::min_sinr(ch, ris, bfd.beamformers, spec, cfg.sigma2);
  out.iterations.push_back(rec);
  out.beamformers = bfd.beamformers;
  out.ris = ris;
  out.objective = bfd.objective;
  out.status = RunStatus::Ok;
  return out;
}

inline AlternationTrace run_scheme(Scheme scheme, const channel::ChannelSet& ch, const DesignConfig& cfg,
                                   const HybridRisSpec& spec, std::uint64_t seed) {
  HybridRisSpec passive = spec;
  passive.active = 0;
  switch (scheme) {
    case Scheme::Hybrid: return alternate(ch, cfg, spec, seed);
    case Scheme::PassiveRIS: return alternate(ch, cfg, passive, seed);
    case Scheme::RandomRIS: return single_pass(ch, cfg, passive, initialize_ris(passive, derive_seed(seed, {2})));
    case Scheme::NoRIS: return single_pass(ch, cfg, passive, RisState::none(spec.elements));
  }
  throw ValidationError("unknown scheme");
}

}  // namespace hris::opt
