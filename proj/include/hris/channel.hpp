#pragma once

// Seeded synthesis of every link in the DFBS / hybrid-RIS / users / targets
// topology. Channel vectors follow the column convention: the signal received
// over a link with vector h from transmit vector x is h^H x.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hris/errors.hpp"
#include "hris/linalg.hpp"
#include "hris/rng.hpp"

namespace hris::channel {

using Position = Eigen::Vector3d;

struct PathlossLaw {
  double intercept_db = 30.0;
  double slope = 22.0;
};

/// DFBS ULA lies along the y axis; the square RIS lies in the x-z plane and
/// faces +y. Both use half-wavelength spacing.
struct ScenarioGeometry {
  Position dfbs{0.0, 0.0, 0.0};
  Position ris{10.0, -8.0, 5.0};
  std::vector<Position> users;
  std::vector<Position> targets;
  Eigen::Index antennas = 16;
  Eigen::Index ris_elements = 100;

  Eigen::Index ris_side() const {
    auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(ris_elements))));
    return side;
  }

  void validate() const {
    if (antennas < 1) throw ValidationError("DFBS needs at least one antenna");
    if (ris_elements < 1 || ris_side() * ris_side() != ris_elements)
      throw ValidationError("RIS element count must be a positive perfect square");
    std::vector<Position> all{dfbs, ris};
    all.insert(all.end(), users.begin(), users.end());
    all.insert(all.end(), targets.begin(), targets.end());
    for (const auto& p : all)
      if (!p.allFinite()) throw ValidationError("non-finite position");
    auto check = [](const Position& a, const Position& b, const char* what) {
      if ((a - b).norm() <= 0.0) throw ValidationError(std::string("zero distance: ") + what);
    };
    check(dfbs, ris, "DFBS-RIS");
    for (const auto& u : users) {
      check(dfbs, u, "DFBS-user");
      check(ris, u, "RIS-user");
    }
    for (const auto& t : targets) {
      check(dfbs, t, "DFBS-target");
      check(ris, t, "RIS-target");
    }
  }
};

struct FadingParams {
  double rician_factor = 10.0;
  PathlossLaw direct{30.0, 22.0};
  PathlossLaw ris_link{30.0, 35.0};

  void validate() const {
    if (!(rician_factor >= 0.0) || !std::isfinite(rician_factor))
      throw ValidationError("Rician factor must be finite and >= 0");
    for (const auto& law : {direct, ris_link})
      if (!std::isfinite(law.intercept_db) || !std::isfinite(law.slope))
        throw ValidationError("pathloss law must be finite");
  }
};

struct ChannelSet {
  CMatrix h_br;                // N x M, DFBS -> RIS
  std::vector<CVector> h_bu;   // K x (M), DFBS -> user
  std::vector<CVector> h_ru;   // K x (N), RIS -> user
  std::vector<CVector> g_bt;   // T x (M), DFBS -> target
  std::vector<CVector> g_rt;   // T x (N), RIS -> target

  Eigen::Index antennas() const { return h_br.cols(); }
  Eigen::Index elements() const { return h_br.rows(); }
  std::size_t users() const { return h_bu.size(); }
  std::size_t targets() const { return g_bt.size(); }

  void validate() const {
    const auto m = antennas();
    const auto n = elements();
    if (h_ru.size() != h_bu.size() || g_rt.size() != g_bt.size())
      throw ValidationError("channel set: inconsistent user/target counts");
    for (std::size_t k = 0; k < h_bu.size(); ++k)
      if (h_bu[k].size() != m || h_ru[k].size() != n) throw ValidationError("channel set: user link size mismatch");
    for (std::size_t t = 0; t < g_bt.size(); ++t)
      if (g_bt[t].size() != m || g_rt[t].size() != n) throw ValidationError("channel set: target link size mismatch");
  }
};

/// entry m = exp(i pi m sin(angle)), m = 0..M-1
inline CVector steering_ula(double angle, Eigen::Index antennas) {
  CVector a(antennas);
  const double phase = std::numbers::pi * std::sin(angle);
  for (Eigen::Index m = 0; m < antennas; ++m) a(m) = std::polar(1.0, phase * static_cast<double>(m));
  return a;
}

/// Planar response: kron(ULA along the horizontal axis, ULA along the vertical
/// axis) with direction cosines cos(el) sin(az) and sin(el).
inline CVector steering_upa(double azimuth, double elevation, Eigen::Index side) {
  const double u1 = std::cos(elevation) * std::sin(azimuth);
  const double u2 = std::sin(elevation);
  CVector a(side * side);
  for (Eigen::Index p = 0; p < side; ++p)
    for (Eigen::Index q = 0; q < side; ++q)
      a(p * side + q) = std::polar(1.0, std::numbers::pi * (u1 * static_cast<double>(p) + u2 * static_cast<double>(q)));
  return a;
}

inline double pathloss_linear(double distance, const PathlossLaw& law) {
  if (!(distance > 0.0)) throw ValidationError("pathloss distance must be > 0");
  return std::pow(10.0, -(law.intercept_db + law.slope * std::log10(distance)) / 10.0);
}

/// Response of the DFBS ULA toward `to`.
inline CVector dfbs_response(const ScenarioGeometry& g, const Position& to) {
  const Position u = (to - g.dfbs).normalized();
  return steering_ula(std::asin(std::clamp(u.y(), -1.0, 1.0)), g.antennas);
}

/// Response of the RIS UPA toward `to`.
inline CVector ris_response(const ScenarioGeometry& g, const Position& to) {
  const Position u = (to - g.ris).normalized();
  const double elevation = std::asin(std::clamp(u.z(), -1.0, 1.0));
  const double azimuth = std::atan2(u.x(), u.y());
  return steering_upa(azimuth, elevation, g.ris_side());
}

inline double dfbs_ris_pathloss(const ScenarioGeometry& g, const FadingParams& f) {
  return pathloss_linear((g.ris - g.dfbs).norm(), f.ris_link);
}

inline ChannelSet synthesize(const ScenarioGeometry& g, const FadingParams& f, std::uint64_t seed) {
  g.validate();
  f.validate();
  ComplexGaussian rng(seed);
  const double rho = f.rician_factor;
  const double los = std::sqrt(rho / (rho + 1.0));
  const double nlos = std::sqrt(1.0 / (rho + 1.0));
  const auto m = g.antennas;
  const auto n = g.ris_elements;

  ChannelSet ch;
  const double zeta_br = dfbs_ris_pathloss(g, f);
  const CMatrix los_br = ris_response(g, g.dfbs) * dfbs_response(g, g.ris).adjoint();
  ch.h_br = std::sqrt(zeta_br) * (los * los_br + nlos * rng.matrix(n, m));

  for (const auto& u : g.users) {
    const double zeta_ru = pathloss_linear((u - g.ris).norm(), f.ris_link);
    ch.h_ru.push_back(std::sqrt(zeta_ru) * (los * ris_response(g, u) + nlos * rng.vector(n)));
  }
  for (const auto& u : g.users) {
    const double zeta_bu = pathloss_linear((u - g.dfbs).norm(), f.direct);
    ch.h_bu.push_back(std::sqrt(zeta_bu) * rng.vector(m));
  }
  for (const auto& t : g.targets) {
    ch.g_bt.push_back(std::sqrt(pathloss_linear((t - g.dfbs).norm(), f.direct)) * dfbs_response(g, t));
    ch.g_rt.push_back(std::sqrt(pathloss_linear((t - g.ris).norm(), f.ris_link)) * ris_response(g, t));
  }
  return ch;
}

/// Axis-aligned rectangle in the z = corner.z() plane.
struct PlacementArea {
  Position corner{5.0, -2.0, 0.0};
  double width = 10.0;
  double depth = 10.0;
};

inline std::vector<Position> draw_positions(const PlacementArea& area, std::size_t count, ComplexGaussian& rng) {
  std::vector<Position> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, area.width);
    const double y = rng.uniform(0.0, area.depth);
    out.emplace_back(area.corner.x() + x, area.corner.y() + y, area.corner.z());
  }
  return out;
}

/// Users then targets, uniform over `area`, from the stream of `seed`.
inline ScenarioGeometry place_uniform(ScenarioGeometry base, const PlacementArea& area, std::size_t users,
                                      std::size_t targets, std::uint64_t seed) {
  ComplexGaussian rng(seed);
  base.users = draw_positions(area, users, rng);
  base.targets = draw_positions(area, targets, rng);
  return base;
}

// ---------------------------------------------------------------------------
// CHSET v1 text format:
//   CHSET v1
//   dims <M> <N> <K> <T>
//   <name> <index> <rows> <cols>      then <rows> lines of re/im pairs
// Blocks appear in the order H_br, h_bu[0..K), h_ru, g_bt, g_rt.

namespace detail {
inline void write_matrix(std::ostream& os, const std::string& name, std::size_t index, const CMatrix& m) {
  os << name << ' ' << index << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << ' ';
      os << m(r, c).real() << ' ' << m(r, c).imag();
    }
    os << '\n';
  }
}

inline CMatrix read_matrix(std::istream& is, const std::string& name, std::size_t index, Eigen::Index rows,
                           Eigen::Index cols) {
  std::string tag;
  std::size_t idx = 0;
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  if (!(is >> tag >> idx >> r >> c) || tag != name || idx != index || r != rows || c != cols)
    throw ParseError("CHSET: expected block '" + name + " " + std::to_string(index) + "'", 0, name);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(is >> re >> im)) throw ParseError("CHSET: truncated block '" + name + "'", 0, name);
      m(i, j) = {re, im};
    }
  return m;
}
}  // namespace detail

inline void write_channels(std::ostream& os, const ChannelSet& ch) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  os << "CHSET v1\n";
  os << "dims " << ch.antennas() << ' ' << ch.elements() << ' ' << ch.users() << ' ' << ch.targets() << '\n';
  detail::write_matrix(os, "H_br", 0, ch.h_br);
  for (std::size_t k = 0; k < ch.users(); ++k) detail::write_matrix(os, "h_bu", k, ch.h_bu[k]);
  for (std::size_t k = 0; k < ch.users(); ++k) detail::write_matrix(os, "h_ru", k, ch.h_ru[k]);
  for (std::size_t t = 0; t < ch.targets(); ++t) detail::write_matrix(os, "g_bt", t, ch.g_bt[t]);
  for (std::size_t t = 0; t < ch.targets(); ++t) detail::write_matrix(os, "g_rt", t, ch.g_rt[t]);
  os.flags(flags);
  os.precision(precision);
}

inline ChannelSet read_channels(std::istream& is) {
  std::string magic;
  std::string version;
  if (!(is >> magic >> version) || magic != "CHSET" || version != "v1")
    throw ParseError("CHSET: missing 'CHSET v1' header", 1, "header");
  std::string dims;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::size_t k = 0;
  std::size_t t = 0;
  if (!(is >> dims >> m >> n >> k >> t) || dims != "dims" || m < 1 || n < 1)
    throw ParseError("CHSET: malformed dims line", 2, "dims");
  ChannelSet ch;
  ch.h_br = detail::read_matrix(is, "H_br", 0, n, m);
  for (std::size_t i = 0; i < k; ++i) ch.h_bu.push_back(detail::read_matrix(is, "h_bu", i, m, 1));
  for (std::size_t i = 0; i < k; ++i) ch.h_ru.push_back(detail::read_matrix(is, "h_ru", i, n, 1));
  for (std::size_t i = 0; i < t; ++i) ch.g_bt.push_back(detail::read_matrix(is, "g_bt", i, m, 1));
  for (std::size_t i = 0; i < t; ++i) ch.g_rt.push_back(detail::read_matrix(is, "g_rt", i, n, 1));
  ch.validate();
  return ch;
}

inline void save_channels(const std::string& path, const ChannelSet& ch) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.imbue(std::locale::classic());
  write_channels(os, ch);
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline ChannelSet load_channels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  is.imbue(std::locale::classic());
  return read_channels(is);
}

}  // namespace hris::channel
