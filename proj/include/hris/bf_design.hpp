#pragma once

// Transmit beamformer design for a fixed RIS state: SDP relaxation over the
// covariance R and per-user matrices C_k, followed by rank-one recovery of the
// communication beamformers and a factorization of the sensing residual.
//
// The SDP is solved in normalized units so that every quantity the solver sees
// is O(1): R' = R / P_t, C'_k = C_k / P_t, the target channels are scaled by
// the weakest target gain and each SINR row is divided by its right-hand side.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hris/errors.hpp"
#include "hris/sdp/solver.hpp"
#include "hris/sysmodel.hpp"

namespace hris::bf {

struct BfProblem {
  sdp::SdpProblem problem;
  sdp::BlockId r;
  std::vector<sdp::BlockId> c;
  sdp::BlockId residual;  // R - sum_k C_k
  sdp::ScalarId t;
  double power_scale = 1.0;         // R = power_scale * R'
  double illumination_scale = 1.0;  // objective = illumination_scale * t'
  std::vector<CVector> user_channels;
  std::vector<CVector> target_channels;
};

inline BfProblem assemble_bf_sdp(const channel::ChannelSet& ch, const RisState& ris, const DesignConfig& cfg,
                                 const HybridRisSpec& spec) {
  cfg.validate();
  const auto m = ch.antennas();
  const auto users = ch.users();
  const auto targets = ch.targets();
  if (targets == 0) throw ValidationError("beamformer design needs at least one target");

  BfProblem out;
  out.power_scale = cfg.p_t;
  for (std::size_t k = 0; k < users; ++k) out.user_channels.push_back(effective_user_channel(ch, ris, k));
  for (std::size_t i = 0; i < targets; ++i) out.target_channels.push_back(effective_target_channel(ch, ris, i));

  double weakest = std::numeric_limits<double>::infinity();
  for (const auto& g : out.target_channels) weakest = std::min(weakest, g.squaredNorm());
  if (!(weakest > 0.0)) throw ValidationError("a target has a zero effective channel");
  out.illumination_scale = cfg.p_t * weakest;

  auto& p = out.problem;
  out.r = p.add_block("R", m);
  for (std::size_t k = 0; k < users; ++k) out.c.push_back(p.add_block("C" + std::to_string(k + 1), m));
  out.residual = p.add_block("R_minus_C", m);
  out.t = p.add_scalar("t");
  p.set_objective(sdp::Goal::Maximize, sdp::LinearForm{}.add(out.t, 1.0));

  for (std::size_t i = 0; i < targets; ++i) {
    const CVector g = out.target_channels[i] / std::sqrt(weakest);
    p.add_constraint(sdp::LinearForm{}.add(out.r, hermitian_part(g * g.adjoint())).add(out.t, -1.0),
                     sdp::Relation::GreaterEqual, 0.0, "illumination_" + std::to_string(i));
  }

  for (std::size_t k = 0; k < users; ++k) {
    const CVector& h = out.user_channels[k];
    const double gain = h.squaredNorm();
    if (!(gain > 0.0)) throw ValidationError("a user has a zero effective channel");
    const double floor = user_ris_noise(ch, ris, k, spec) + cfg.sigma2;
    // (1 + 1/G) h^H C_k h - h^H R h >= z_k + sigma^2, divided through by its
    // rhs; thresholds below one also multiply through by G to keep 1/G bounded
    const double weight = std::min(1.0, cfg.gamma);
    const double rhs = floor / (cfg.p_t * gain);
    const CMatrix hh = hermitian_part(h * h.adjoint()) * (weight / (gain * rhs));
    p.add_constraint(sdp::LinearForm{}.add(out.c[k], (1.0 + 1.0 / cfg.gamma) * hh).add(out.r, -hh),
                     sdp::Relation::GreaterEqual, weight, "sinr_" + std::to_string(k));
  }

  p.add_constraint(sdp::LinearForm{}.add(out.r, CMatrix::Identity(m, m)), sdp::Relation::LessEqual, 1.0, "power");

  // R - sum_k C_k - residual = 0, one row per real Hermitian basis element
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      for (int part = 0; part < (a == b ? 1 : 2); ++part) {
        CMatrix e = CMatrix::Zero(m, m);
        if (part == 0) {
          e(a, b) += 0.5;
          e(b, a) += 0.5;
        } else {
          e(a, b) = {0.0, 0.5};
          e(b, a) = {0.0, -0.5};
        }
        sdp::LinearForm row;
        row.add(out.r, e);
        for (const auto& id : out.c) row.add(id, -e);
        row.add(out.residual, -e);
        p.add_constraint(std::move(row), sdp::Relation::Equal, 0.0,
                         "coupling_" + std::to_string(a) + "_" + std::to_string(b) + (part ? "i" : "r"));
      }
    }
  }
  return out;
}

/// c = C h / sqrt(h^H C h), so that h^H c c^H h = h^H C h.
inline CVector recover_rank1(const CMatrix& c_hat, const CVector& h) {
  const CMatrix c = hermitian_part(c_hat);
  const CVector ch = c * h;
  const double gain = h.dot(ch).real();
  const double trace = std::max(0.0, c.trace().real());
  if (!(gain > 1e-12 * trace) || !(gain > 0.0))
    throw DegenerateBeamformer("communication matrix has no gain toward its user");
  return ch / std::sqrt(gain);
}

/// S with S S^H = R - sum_k c_k c_k^H after clipping round-off negatives.
inline CMatrix recover_sensing(const CMatrix& r_hat, const CMatrix& c) {
  const CMatrix residual = hermitian_part(r_hat - c * c.adjoint());
  const double slack = 1e-8 * (1.0 + std::abs(r_hat.trace().real()));
  if (min_eigenvalue(residual) < -slack) throw NotPsd("sensing residual is not positive semidefinite");
  return psd_factor(residual);
}

struct BfDesign {
  sdp::Status status = sdp::Status::NumericalFailure;
  BeamformerSet beamformers;
  CMatrix r_hat;              // relaxed covariance in mW
  double relaxed_bound = 0.0;  // epigraph value t in mW
  double relaxed_objective = 0.0;  // min_m g_m^H R_hat g_m
  double objective = 0.0;          // same metric after recovery
  double min_residual_eigenvalue = 0.0;
  sdp::SdpSolution solution;
};

inline double worst_illumination(const std::vector<CVector>& targets, const CMatrix& r) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& g : targets) worst = std::min(worst, g.dot(r * g).real());
  return worst;
}

inline BfDesign design_beamformers(const channel::ChannelSet& ch, const RisState& ris, const DesignConfig& cfg,
                                   const HybridRisSpec& spec, const sdp::SolverOptions& options = {}) {
  const BfProblem bp = assemble_bf_sdp(ch, ris, cfg, spec);
  BfDesign out;
  // no beamformer beats the single-user matched filter, so a threshold above
  // P_t |h_k|^2 / (z_k + sigma^2) is infeasible without solving anything
  for (std::size_t k = 0; k < ch.users(); ++k) {
    const double ceiling = cfg.p_t * bp.user_channels[k].squaredNorm() / (user_ris_noise(ch, ris, k, spec) + cfg.sigma2);
    if (cfg.gamma > ceiling * (1.0 + 1e-9)) {
      out.status = out.solution.status = sdp::Status::Infeasible;
      return out;
    }
  }
  out.solution = sdp::solve(bp.problem, options);
  out.status = out.solution.status;
  if (out.status != sdp::Status::Optimal) return out;

  const auto& blocks = out.solution.blocks;
  out.r_hat = bp.power_scale * hermitian_part(blocks[bp.r.index]);
  out.relaxed_bound = bp.illumination_scale * out.solution.scalars[bp.t.index];
  out.relaxed_objective = worst_illumination(bp.target_channels, out.r_hat);

  const auto m = ch.antennas();
  CMatrix c(m, static_cast<Eigen::Index>(ch.users()));
  for (std::size_t k = 0; k < ch.users(); ++k)
    c.col(static_cast<Eigen::Index>(k)) =
        recover_rank1(bp.power_scale * blocks[bp.c[k].index], bp.user_channels[k]);
  out.min_residual_eigenvalue = min_eigenvalue(out.r_hat - c * c.adjoint());
  out.beamformers.c = c;
  out.beamformers.s = recover_sensing(out.r_hat, c);

  // the solver meets Tr(R') <= 1 only to its feasibility tolerance
  const double trace = out.beamformers.covariance().trace().real();
  if (trace > cfg.p_t) {
    const double shrink = std::sqrt(cfg.p_t / trace);
    out.beamformers.c *= shrink;
    out.beamformers.s *= shrink;
  }
  out.objective = worst_illumination(bp.target_channels, out.beamformers.covariance());
  return out;
}

}  // namespace hris::bf
