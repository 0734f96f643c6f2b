#pragma once

#include <cstdint>
#include <numbers>

#include "hris/channel.hpp"
#include "hris/rng.hpp"
#include "hris/sysmodel.hpp"

namespace hris::testing {

struct Instance {
  channel::ScenarioGeometry geometry;
  channel::ChannelSet channels;
  HybridRisSpec spec;
  RisState ris;
  BeamformerSet bf;
};

inline channel::ScenarioGeometry desk_geometry(std::uint64_t seed, Eigen::Index m = 8, Eigen::Index n = 16,
                                               std::size_t k = 2, std::size_t t = 2) {
  channel::ScenarioGeometry g;
  g.antennas = m;
  g.ris_elements = n;
  return channel::place_uniform(g, channel::PlacementArea{}, k, t, seed);
}

/// Random feasible-modulus RIS state: passive unit modulus, active magnitude in [0, eta].
inline RisState random_ris(const HybridRisSpec& spec, ComplexGaussian& rng) {
  RisState s{CVector(spec.elements), false};
  for (Eigen::Index i = 0; i < spec.elements; ++i) {
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double mag = spec.is_active(i) ? rng.uniform(0.0, spec.eta) : 1.0;
    s.omega(i) = std::polar(mag, phase);
  }
  return s;
}

/// Beamformers with Tr(R) = p_t split between communication and sensing.
inline BeamformerSet random_beamformers(Eigen::Index m, Eigen::Index k, double p_t, ComplexGaussian& rng) {
  BeamformerSet bf{rng.matrix(m, k), rng.matrix(m, m)};
  const double scale = std::sqrt(p_t / bf.covariance().trace().real());
  bf.c *= scale;
  bf.s *= scale;
  return bf;
}

inline Instance random_instance(std::uint64_t seed, Eigen::Index m = 8, Eigen::Index n = 16, std::size_t k = 2,
                                std::size_t t = 2, Eigen::Index active = 4) {
  Instance out;
  out.geometry = desk_geometry(derive_seed(seed, {0}), m, n, k, t);
  out.channels = channel::synthesize(out.geometry, channel::FadingParams{}, derive_seed(seed, {1}));
  out.spec.elements = n;
  out.spec.active = active;
  out.spec.eta = std::sqrt(10.0);
  out.spec.nu2 = 1e-6;
  ComplexGaussian rng(derive_seed(seed, {2}));
  out.ris = random_ris(out.spec, rng);
  out.bf = random_beamformers(m, static_cast<Eigen::Index>(k), static_cast<double>(m), rng);
  return out;
}

}  // namespace hris::testing
