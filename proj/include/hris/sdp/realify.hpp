#pragma once

#include <vector>

#include "hris/sdp/problem.hpp"

namespace hris::sdp {

/// H -> [[Re H, -Im H], [Im H, Re H]]
inline RMatrix embed_hermitian(const CMatrix& h) {
  const auto n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

/// Inverse of the embedding, X = T^H Xr T with T = [I; -iI]/sqrt(2). Preserves
/// PSD-ness and reproduces every embedded linear functional exactly, even when
/// Xr does not carry the embedding's block structure.
inline CMatrix collapse_symmetric(const RMatrix& xr) {
  const auto n = xr.rows() / 2;
  const RMatrix p = xr.topLeftCorner(n, n);
  const RMatrix q = xr.topRightCorner(n, n);
  const RMatrix qt = xr.bottomLeftCorner(n, n);
  const RMatrix s = xr.bottomRightCorner(n, n);
  CMatrix x(n, n);
  x.real() = 0.5 * (p + s);
  x.imag() = 0.5 * (qt - q);
  return hermitian_part(x);
}

struct RealBlockTerm {
  std::size_t block = 0;
  RMatrix coeff;
};

struct RealLinearForm {
  std::vector<RealBlockTerm> blocks;
  std::vector<ScalarTerm> scalars;

  double evaluate(const std::vector<RMatrix>& x, const std::vector<double>& s) const {
    double v = 0.0;
    for (const auto& t : blocks) v += (t.coeff.array() * x[t.block].array()).sum();
    for (const auto& t : scalars) v += t.coeff * s[t.scalar.index];
    return v;
  }
};

struct RealConstraint {
  RealLinearForm lhs;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
  std::string tag;
};

/// Real symmetric form of an SdpProblem. Every n x n Hermitian block becomes a
/// 2n x 2n symmetric block; coefficients are embedded with a factor 1/2 so
/// that Tr(A_r X_r) = Re Tr(A X) whenever X_r is the embedding of X.
struct RealSdp {
  std::vector<Eigen::Index> block_dims;
  std::size_t scalar_count = 0;
  Goal goal = Goal::Minimize;
  RealLinearForm objective;
  std::vector<RealConstraint> constraints;

  std::vector<CMatrix> to_complex(const std::vector<RMatrix>& xr) const {
    std::vector<CMatrix> out;
    out.reserve(xr.size());
    for (const auto& x : xr) out.push_back(collapse_symmetric(x));
    return out;
  }

  std::vector<RMatrix> to_real(const std::vector<CMatrix>& x) const {
    std::vector<RMatrix> out;
    out.reserve(x.size());
    for (const auto& b : x) out.push_back(embed_hermitian(b));
    return out;
  }
};

namespace detail {
inline RealLinearForm realify_form(const LinearForm& f) {
  RealLinearForm out;
  out.scalars = f.scalars;
  out.blocks.reserve(f.blocks.size());
  for (const auto& t : f.blocks) out.blocks.push_back({t.block.index, 0.5 * embed_hermitian(hermitian_part(t.coeff))});
  return out;
}
}  // namespace detail

inline RealSdp realify(const SdpProblem& problem) {
  problem.validate();
  RealSdp out;
  for (const auto& b : problem.blocks()) out.block_dims.push_back(2 * b.dim);
  out.scalar_count = problem.scalars().size();
  out.goal = problem.goal();
  out.objective = detail::realify_form(problem.objective());
  for (const auto& c : problem.constraints())
    out.constraints.push_back({detail::realify_form(c.lhs), c.relation, c.rhs, c.tag});
  return out;
}

}  // namespace hris::sdp
