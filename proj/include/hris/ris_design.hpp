#pragma once

// RIS coefficient design for fixed beamformers. Every received power is a
// quadratic form in v = [conj(omega); 1], so the subproblem lifts to an SDP over
// V = v v^H. A rank-one v is then picked by Gaussian randomization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hris/errors.hpp"
#include "hris/rng.hpp"
#include "hris/sdp/solver.hpp"
#include "hris/sysmodel.hpp"

namespace hris::ris {

struct LiftedMatrices {
  std::vector<CMatrix> t;  // illumination, one per target
  std::vector<CMatrix> e;  // target RIS noise, one per target
  std::vector<CMatrix> a;  // desired signal, one per user
  std::vector<CMatrix> b;  // interference plus user RIS noise, one per user
};

/// v = [conj(omega); 1]. With h^H = h_bu^H + h_ru^H diag(omega) H_br the
/// received amplitude h^H x equals v^H [diag(h_ru^H) H_br x; h_bu^H x].
inline CVector lift(const RisState& ris) {
  CVector v(ris.omega.size() + 1);
  v.head(ris.omega.size()) = ris.omega.conjugate();
  v(ris.omega.size()) = 1.0;
  return v;
}

inline RisState unlift(const CVector& v) {
  return {v.head(v.size() - 1).conjugate(), false};
}

namespace detail {

inline CVector stacked(const CVector& ris_link, const CVector& direct, const CMatrix& h_br, const CVector& beam) {
  const auto n = ris_link.size();
  CVector out(n + 1);
  out.head(n) = ris_link.conjugate().cwiseProduct(h_br * beam);
  out(n) = direct.dot(beam);
  return out;
}

inline void add_outer(CMatrix& acc, const CVector& x) { acc.noalias() += x * x.adjoint(); }

/// nu2 diag(|w_i|^2) on active indices, zero elsewhere and on the last coordinate
inline CMatrix noise_block(const CVector& w, const HybridRisSpec& spec) {
  const auto n = w.size();
  CMatrix out = CMatrix::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < std::min(spec.active, n); ++i) out(i, i) = spec.nu2 * std::norm(w(i));
  return out;
}

inline double quad(const CMatrix& m, const CVector& v) { return v.dot(m * v).real(); }

}  // namespace detail

inline LiftedMatrices build_lifted(const channel::ChannelSet& ch, const BeamformerSet& bf, const HybridRisSpec& spec) {
  ch.validate();
  if (bf.c.rows() != ch.antennas() || bf.c.cols() != static_cast<Eigen::Index>(ch.users()))
    throw ValidationError("beamformer dimensions differ from the channel set");
  const auto n = ch.elements();
  LiftedMatrices out;

  for (std::size_t m = 0; m < ch.targets(); ++m) {
    CMatrix t = CMatrix::Zero(n + 1, n + 1);
    for (Eigen::Index j = 0; j < bf.c.cols(); ++j)
      detail::add_outer(t, detail::stacked(ch.g_rt[m], ch.g_bt[m], ch.h_br, bf.c.col(j)));
    for (Eigen::Index j = 0; j < bf.s.cols(); ++j)
      detail::add_outer(t, detail::stacked(ch.g_rt[m], ch.g_bt[m], ch.h_br, bf.s.col(j)));
    out.t.push_back(hermitian_part(t));
    out.e.push_back(detail::noise_block(ch.g_rt[m], spec));
  }

  for (std::size_t k = 0; k < ch.users(); ++k) {
    CMatrix a = CMatrix::Zero(n + 1, n + 1);
    CMatrix b = detail::noise_block(ch.h_ru[k], spec);
    for (Eigen::Index j = 0; j < bf.c.cols(); ++j) {
      const CVector x = detail::stacked(ch.h_ru[k], ch.h_bu[k], ch.h_br, bf.c.col(j));
      detail::add_outer(j == static_cast<Eigen::Index>(k) ? a : b, x);
    }
    for (Eigen::Index j = 0; j < bf.s.cols(); ++j)
      detail::add_outer(b, detail::stacked(ch.h_ru[k], ch.h_bu[k], ch.h_br, bf.s.col(j)));
    out.a.push_back(hermitian_part(a));
    out.b.push_back(hermitian_part(b));
  }
  return out;
}

struct RisProblem {
  sdp::SdpProblem problem;
  sdp::BlockId v;
  sdp::ScalarId t;
  double illumination_scale = 1.0;  // objective = illumination_scale * t'
};

/// `illumination_scale` only conditions the epigraph rows; any positive value
/// gives the same optimizer.
inline RisProblem assemble_ris_sdp(const LiftedMatrices& lifted, const DesignConfig& cfg, const HybridRisSpec& spec,
                                   double illumination_scale) {
  cfg.validate();
  spec.validate();
  if (lifted.t.empty()) throw ValidationError("RIS design needs at least one target");
  if (!(illumination_scale > 0.0) || !std::isfinite(illumination_scale))
    throw ValidationError("illumination scale must be positive");
  const auto dim = lifted.t.front().rows();
  if (dim != spec.elements + 1) throw ValidationError("lifted dimension differs from N + 1");

  RisProblem out;
  out.illumination_scale = illumination_scale;
  auto& p = out.problem;
  out.v = p.add_block("V", dim);
  out.t = p.add_scalar("t");
  p.set_objective(sdp::Goal::Maximize, sdp::LinearForm{}.add(out.t, 1.0));

  for (std::size_t m = 0; m < lifted.t.size(); ++m)
    p.add_constraint(sdp::LinearForm{}.add(out.v, lifted.t[m] / illumination_scale).add(out.t, -1.0),
                     sdp::Relation::GreaterEqual, 0.0, "illumination_" + std::to_string(m));

  // Tr((A - G B) V) >= G sigma^2 as Tr((A / G - B) V) / sigma^2 >= 1, times min(1, G)
  const double weight = std::min(1.0, cfg.gamma);
  for (std::size_t k = 0; k < lifted.a.size(); ++k) {
    const CMatrix row = (lifted.a[k] / cfg.gamma - lifted.b[k]) * (weight / cfg.sigma2);
    p.add_constraint(sdp::LinearForm{}.add(out.v, row), sdp::Relation::GreaterEqual, weight,
                     "sinr_" + std::to_string(k));
  }

  for (std::size_t m = 0; m < lifted.e.size(); ++m) {
    // an all-zero row (no active elements or no RIS noise) is trivially met
    if (lifted.e[m].cwiseAbs().maxCoeff() == 0.0) continue;
    if (cfg.r_max == 0.0) {
      p.add_constraint(sdp::LinearForm{}.add(out.v, lifted.e[m] / lifted.e[m].trace().real()),
                       sdp::Relation::LessEqual, 0.0, "ris_noise_" + std::to_string(m));
    } else {
      p.add_constraint(sdp::LinearForm{}.add(out.v, lifted.e[m] / cfg.r_max), sdp::Relation::LessEqual, 1.0,
                       "ris_noise_" + std::to_string(m));
    }
  }

  for (Eigen::Index i = 0; i < dim; ++i) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(i, i) = 1.0;
    const bool active = i < spec.elements && spec.is_active(i);
    p.add_constraint(sdp::LinearForm{}.add(out.v, e), active ? sdp::Relation::LessEqual : sdp::Relation::Equal,
                     active ? spec.eta * spec.eta : 1.0, "diag_" + std::to_string(i));
  }
  return out;
}

struct CandidateScore {
  double objective = 0.0;  // min_m v^H T_m v
  bool feasible = false;
};

inline CandidateScore score(const LiftedMatrices& lifted, const CVector& v, const DesignConfig& cfg) {
  CandidateScore out;
  out.objective = std::numeric_limits<double>::infinity();
  for (const auto& t : lifted.t) out.objective = std::min(out.objective, detail::quad(t, v));
  out.feasible = true;
  for (std::size_t k = 0; k < lifted.a.size(); ++k) {
    const double sinr = detail::quad(lifted.a[k], v) / (detail::quad(lifted.b[k], v) + cfg.sigma2);
    if (sinr < cfg.gamma * (1.0 - 1e-6)) out.feasible = false;
  }
  for (const auto& e : lifted.e)
    if (detail::quad(e, v) > cfg.r_max * (1.0 + 1e-6)) out.feasible = false;
  return out;
}

/// Passive entries onto the unit circle, active entries clipped to |u| <= eta.
inline void project(CVector& u, const HybridRisSpec& spec) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    if (spec.is_active(i)) {
      if (mag > spec.eta) u(i) *= spec.eta / mag;
    } else {
      u(i) = mag > 0.0 ? u(i) / mag : std::complex<double>(1.0, 0.0);
    }
  }
}

struct Randomized {
  RisState ris;
  double objective = 0.0;
  bool fallback = false;  // no feasible candidate; incumbent returned
  int feasible_candidates = 0;
};

/// Candidate i draws x ~ CN(0, V_opt) from its own seed, removes the phase of
/// the last coordinate and projects the first N entries.
inline Randomized gaussian_randomization(const CMatrix& v_opt, const LiftedMatrices& lifted, const DesignConfig& cfg,
                                         const HybridRisSpec& spec, const RisState& incumbent, std::uint64_t seed) {
  const auto n = spec.elements;
  if (v_opt.rows() != n + 1 || v_opt.cols() != n + 1) throw ValidationError("V_opt must be (N+1) x (N+1)");
  // eigenvalues at round-off level would otherwise add ~sqrt(eps) noise to every draw
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(v_opt));
  const double floor = 1e-12 * std::max(0.0, es.eigenvalues().maxCoeff());
  const RVector root = es.eigenvalues().unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  const CMatrix factor = es.eigenvectors() * root.asDiagonal();

  Randomized out;
  out.ris = incumbent;
  const auto base = score(lifted, lift(incumbent), cfg);
  double best = base.feasible ? base.objective : -std::numeric_limits<double>::infinity();

  for (int i = 0; i < cfg.n_rand; ++i) {
    ComplexGaussian rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const CVector x = factor * rng.vector(factor.cols());
    const double last = std::abs(x(n));
    const std::complex<double> phase = last > 0.0 ? x(n) / last : std::complex<double>(1.0, 0.0);
    CVector u = x.head(n) * std::conj(phase);
    project(u, spec);
    CVector v(n + 1);
    v.head(n) = u;
    v(n) = 1.0;
    const auto s = score(lifted, v, cfg);
    if (!s.feasible) continue;
    ++out.feasible_candidates;
    if (s.objective > best) {
      best = s.objective;
      out.ris = unlift(v);
    }
  }
  out.fallback = out.feasible_candidates == 0;
  out.objective = score(lifted, lift(out.ris), cfg).objective;
  return out;
}

struct RisDesign {
  sdp::Status status = sdp::Status::NumericalFailure;
  RisState ris;
  double objective = 0.0;         // min_m p_m at the returned state
  double relaxed_bound = 0.0;     // epigraph value
  double relaxed_objective = 0.0;  // min_m Tr(T_m V)
  bool fallback = false;
  int feasible_candidates = 0;
  CMatrix v_opt;
  sdp::SdpSolution solution;
};

inline RisDesign design_ris(const channel::ChannelSet& ch, const BeamformerSet& bf, const DesignConfig& cfg,
                            const HybridRisSpec& spec, const RisState& incumbent, std::uint64_t seed,
                            const sdp::SolverOptions& options = {}) {
  if (incumbent.omega.size() != spec.elements) throw ValidationError("incumbent RIS state length differs from N");
  const LiftedMatrices lifted = build_lifted(ch, bf, spec);
  const CVector v0 = lift(incumbent);
  double scale = score(lifted, v0, cfg).objective;
  if (!(scale > 0.0)) {
    scale = 0.0;
    for (const auto& t : lifted.t) scale = std::max(scale, t.trace().real() / static_cast<double>(t.rows()));
  }
  if (!(scale > 0.0)) throw ValidationError("every target is unreachable");

  const RisProblem rp = assemble_ris_sdp(lifted, cfg, spec, scale);
  RisDesign out;
  out.solution = sdp::solve(rp.problem, options);
  out.status = out.solution.status;
  if (out.status != sdp::Status::Optimal) {
    out.ris = incumbent;
    out.objective = score(lifted, v0, cfg).objective;
    out.fallback = true;
    return out;
  }

  out.v_opt = hermitian_part(out.solution.blocks[rp.v.index]);
  out.relaxed_bound = scale * out.solution.scalars[rp.t.index];
  out.relaxed_objective = std::numeric_limits<double>::infinity();
  for (const auto& t : lifted.t) out.relaxed_objective = std::min(out.relaxed_objective, trace_product(t, out.v_opt));

  const Randomized r = gaussian_randomization(out.v_opt, lifted, cfg, spec, incumbent, seed);
  out.ris = r.ris;
  out.objective = r.objective;
  out.fallback = r.fallback;
  out.feasible_candidates = r.feasible_candidates;
  return out;
}

}  // namespace hris::ris
