#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "hris/errors.hpp"
#include "hris/sdp/problem.hpp"

// Plain-text dump of an SdpProblem for offline inspection.
//
//   SDPDUMP v1
//   goal maximize|minimize
//   blocks <count>            followed by: block <name> <dim>
//   scalars <count>           followed by: scalar <name>
//   objective <nblock> <nscalar>
//   constraint <tag> <=|=|>= <rhs> <nblock> <nscalar>   (one per constraint)
//
// Each block term is "bterm <index>" followed by <dim> rows of re/im pairs,
// row-major; each scalar term is "sterm <index> <coeff>".
namespace hris::sdp {

namespace detail {
inline std::string token(const std::string& s) {
  if (s.empty()) return "-";
  std::string out = s;
  for (auto& ch : out)
    if (ch == ' ' || ch == '\t' || ch == '\n') ch = '_';
  return out;
}

inline void write_form(std::ostream& os, const LinearForm& f) {
  for (const auto& t : f.blocks) {
    os << "bterm " << t.block.index << '\n';
    for (Eigen::Index r = 0; r < t.coeff.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.coeff.cols(); ++c) {
        if (c > 0) os << ' ';
        os << t.coeff(r, c).real() << ' ' << t.coeff(r, c).imag();
      }
      os << '\n';
    }
  }
  for (const auto& t : f.scalars) os << "sterm " << t.scalar.index << ' ' << t.coeff << '\n';
}

inline const char* relation_token(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
  }
  return "?";
}
}  // namespace detail

inline void write_dump(std::ostream& os, const SdpProblem& p) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  os << "SDPDUMP v1\n";
  os << "goal " << (p.goal() == Goal::Maximize ? "maximize" : "minimize") << '\n';
  os << "blocks " << p.blocks().size() << '\n';
  for (const auto& b : p.blocks()) os << "block " << detail::token(b.name) << ' ' << b.dim << '\n';
  os << "scalars " << p.scalars().size() << '\n';
  for (const auto& s : p.scalars()) os << "scalar " << detail::token(s) << '\n';
  os << "objective " << p.objective().blocks.size() << ' ' << p.objective().scalars.size() << '\n';
  detail::write_form(os, p.objective());
  os << "constraints " << p.constraints().size() << '\n';
  for (const auto& c : p.constraints()) {
    os << "constraint " << detail::token(c.tag) << ' ' << detail::relation_token(c.relation) << ' ' << c.rhs << ' '
       << c.lhs.blocks.size() << ' ' << c.lhs.scalars.size() << '\n';
    detail::write_form(os, c.lhs);
  }
  os.flags(flags);
  os.precision(precision);
}

inline void write_dump(const std::string& path, const SdpProblem& p) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.imbue(std::locale::classic());
  write_dump(os, p);
  if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace hris::sdp
