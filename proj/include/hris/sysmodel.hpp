#pragma once

// Hybrid-RIS state, effective channels and the scalar performance metrics.
// The first L RIS elements are active (gain up to eta, adding noise nu2 per
// element); the remaining N - L are passive unit-modulus phase shifters.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "hris/channel.hpp"
#include "hris/errors.hpp"
#include "hris/linalg.hpp"

namespace hris {

struct HybridRisSpec {
  Eigen::Index elements = 100;  // N
  Eigen::Index active = 20;     // L
  double eta = std::sqrt(10.0);  // linear amplitude cap
  double nu2 = 1e-6;             // mW

  bool is_active(Eigen::Index i) const { return i < active; }

  void validate() const {
    if (elements < 1) throw ValidationError("RIS needs at least one element");
    if (active < 0 || active > elements) throw ValidationError("active count must lie in [0, N]");
    if (active > 0 && !(eta >= 1.0)) throw ValidationError("active gain eta must be >= 1");
    if (!(nu2 >= 0.0) || !std::isfinite(nu2)) throw ValidationError("RIS noise power must be finite and >= 0");
  }
};

struct RisState {
  CVector omega;
  bool no_ris = false;  // all-zero baseline; exempt from the modulus check

  static RisState none(Eigen::Index n) { return {CVector::Zero(n), true}; }

  /// Largest modulus-constraint violation, 0 for the no-RIS state.
  double modulus_violation(const HybridRisSpec& spec) const {
    if (no_ris) return 0.0;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
      const double mag = std::abs(omega(i));
      worst = std::max(worst, spec.is_active(i) ? mag - spec.eta : std::abs(mag - 1.0));
    }
    return worst;
  }

  void validate(const HybridRisSpec& spec) const {
    if (omega.size() != spec.elements) throw ValidationError("RIS state length differs from N");
    if (!omega.allFinite()) throw ValidationError("RIS state has non-finite entries");
    if (modulus_violation(spec) > 1e-9) throw ValidationError("RIS state violates the modulus constraints");
  }
};

struct BeamformerSet {
  CMatrix c;  // M x K, column k serves user k
  CMatrix s;  // M x M sensing beamformers

  CMatrix covariance() const {
    CMatrix r = c * c.adjoint();
    if (s.size() > 0) r += s * s.adjoint();
    return hermitian_part(r);
  }
};

struct DesignConfig {
  double p_t = 16.0;          // mW
  double gamma = std::pow(10.0, 0.5);
  double r_max = 1e-9;        // mW
  double sigma2 = std::pow(10.0, -9.4);  // mW
  double p_max = 1e3;         // mW, redundancy check only
  int n_rand = 200;
  int max_iterations = 10;
  double convergence_tolerance = 1e-3;

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(p_t) || !positive(sigma2) || !positive(p_max) || !positive(gamma))
      throw ValidationError("design powers and the SINR threshold must be positive");
    if (!(r_max >= 0.0) || !std::isfinite(r_max)) throw ValidationError("r_max must be >= 0");
    if (n_rand < 0 || max_iterations < 1 || !(convergence_tolerance >= 0.0))
      throw ValidationError("invalid iteration settings");
  }
};

namespace detail {
inline void check_dims(const channel::ChannelSet& ch, const RisState& ris) {
  if (ris.omega.size() != ch.elements()) throw ValidationError("RIS state length differs from the channel set");
}

inline void check_dims(const channel::ChannelSet& ch, const BeamformerSet& bf) {
  if (bf.c.rows() != ch.antennas() || (bf.s.size() > 0 && bf.s.rows() != ch.antennas()))
    throw ValidationError("beamformer rows differ from the antenna count");
  if (bf.c.cols() != static_cast<Eigen::Index>(ch.users())) throw ValidationError("need one beamformer per user");
}

/// sum over active i of |w_i|^2 |omega_i|^2
inline double active_weighted(const CVector& w, const RisState& ris, const HybridRisSpec& spec) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < std::min(spec.active, w.size()); ++i) acc += std::norm(w(i)) * std::norm(ris.omega(i));
  return acc;
}
}  // namespace detail

/// h_k with h_k^H = h_bu^H + h_ru^H diag(omega) H_br.
inline CVector effective_user_channel(const channel::ChannelSet& ch, const RisState& ris, std::size_t k) {
  detail::check_dims(ch, ris);
  if (k >= ch.users()) throw ValidationError("user index out of range");
  return ch.h_bu[k] + ch.h_br.adjoint() * (ris.omega.conjugate().asDiagonal() * ch.h_ru[k]);
}

inline CVector effective_target_channel(const channel::ChannelSet& ch, const RisState& ris, std::size_t m) {
  detail::check_dims(ch, ris);
  if (m >= ch.targets()) throw ValidationError("target index out of range");
  return ch.g_bt[m] + ch.h_br.adjoint() * (ris.omega.conjugate().asDiagonal() * ch.g_rt[m]);
}

/// RIS noise power reaching user k.
inline double user_ris_noise(const channel::ChannelSet& ch, const RisState& ris, std::size_t k,
                             const HybridRisSpec& spec) {
  detail::check_dims(ch, ris);
  return spec.nu2 * detail::active_weighted(ch.h_ru.at(k), ris, spec);
}

inline double target_ris_noise(const channel::ChannelSet& ch, const RisState& ris, std::size_t m,
                               const HybridRisSpec& spec) {
  detail::check_dims(ch, ris);
  return spec.nu2 * detail::active_weighted(ch.g_rt.at(m), ris, spec);
}

inline double user_sinr(const channel::ChannelSet& ch, const RisState& ris, const BeamformerSet& bf, std::size_t k,
                        double sigma2, const HybridRisSpec& spec) {
  detail::check_dims(ch, bf);
  const CVector h = effective_user_channel(ch, ris, k);
  const auto kk = static_cast<Eigen::Index>(k);
  double signal = 0.0;
  double interference = 0.0;
  for (Eigen::Index j = 0; j < bf.c.cols(); ++j) {
    const double p = std::norm(h.dot(bf.c.col(j)));
    (j == kk ? signal : interference) += p;
  }
  if (bf.s.size() > 0) interference += (bf.s.adjoint() * h).squaredNorm();
  return signal / (interference + user_ris_noise(ch, ris, k, spec) + sigma2);
}

/// p_m = g_m^H R g_m
inline double target_illumination(const channel::ChannelSet& ch, const RisState& ris, const CMatrix& r,
                                  std::size_t m) {
  const CVector g = effective_target_channel(ch, ris, m);
  return std::max(0.0, g.dot(r * g).real());
}

inline double target_illumination(const channel::ChannelSet& ch, const RisState& ris, const BeamformerSet& bf,
                                  std::size_t m) {
  detail::check_dims(ch, bf);
  return target_illumination(ch, ris, bf.covariance(), m);
}

/// sum over active i of |omega_i|^2 (h_br,i^H R h_br,i + nu2), h_br,i^H being row i of H_br.
inline double ris_output_power(const channel::ChannelSet& ch, const RisState& ris, const BeamformerSet& bf,
                               const HybridRisSpec& spec) {
  detail::check_dims(ch, ris);
  detail::check_dims(ch, bf);
  const CMatrix r = bf.covariance();
  double total = 0.0;
  for (Eigen::Index i = 0; i < std::min(spec.active, ch.elements()); ++i) {
    const double incident = std::max(0.0, (ch.h_br.row(i) * r * ch.h_br.row(i).adjoint())(0, 0).real());
    total += std::norm(ris.omega(i)) * (incident + spec.nu2);
  }
  return total;
}

/// Upper bound on the active-element output power for any Tr(R) <= p_t design.
inline double theorem1_bound(const HybridRisSpec& spec, double zeta_br, double p_t, double rho, Eigen::Index antennas) {
  const double m = static_cast<double>(antennas);
  return static_cast<double>(spec.active) * spec.eta * spec.eta *
         (zeta_br * p_t * (rho * m + 1.0) / (rho + 1.0) + spec.nu2);
}

/// (min_m p_m, argmin); ties go to the lowest index.
inline std::pair<double, std::size_t> worst_case_illumination(const channel::ChannelSet& ch, const RisState& ris,
                                                              const BeamformerSet& bf) {
  if (ch.targets() == 0) throw ValidationError("no targets");
  const CMatrix r = bf.covariance();
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t m = 0; m < ch.targets(); ++m) {
    const double p = target_illumination(ch, ris, r, m);
    if (p < best) {
      best = p;
      arg = m;
    }
  }
  return {best, arg};
}

struct Metrics {
  double worst_illumination = 0.0;
  double min_sinr = 0.0;
  double max_target_noise = 0.0;
  double ris_power = 0.0;
};

inline Metrics evaluate_metrics(const channel::ChannelSet& ch, const RisState& ris, const BeamformerSet& bf,
                                const HybridRisSpec& spec, double sigma2) {
  Metrics out;
  out.worst_illumination = worst_case_illumination(ch, ris, bf).first;
  out.min_sinr = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ch.users(); ++k) out.min_sinr = std::min(out.min_sinr, user_sinr(ch, ris, bf, k, sigma2, spec));
  for (std::size_t m = 0; m < ch.targets(); ++m)
    out.max_target_noise = std::max(out.max_target_noise, target_ris_noise(ch, ris, m, spec));
  out.ris_power = ris_output_power(ch, ris, bf, spec);
  return out;
}

}  // namespace hris
