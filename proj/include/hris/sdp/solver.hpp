#pragma once

// Primal-dual path-following interior-point method for dense SDPs.
//
// The complex problem is realified, inequalities receive nonnegative slacks and
// everything is cast into the standard primal form
//
//   min <C, X>  s.t.  <A_i, X> = b_i,  X in S_+^{n_1} x ... x S_+^{n_B} x R_+^p
//
// whose dual is  max b'y  s.t.  sum_i y_i A_i + Z = C,  Z in the same cone.
// Search directions use Nesterov-Todd scaling with a Mehrotra
// predictor-corrector; the start is X = tau I, not necessarily feasible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "hris/sdp/problem.hpp"
#include "hris/sdp/realify.hpp"

namespace hris::sdp {

namespace detail {

struct SparseEntry {
  Eigen::Index row;
  Eigen::Index col;
  double value;
};

/// Coefficient of one constraint row on one PSD block.
struct ConeTerm {
  std::size_t row = 0;
  RMatrix dense;
  std::vector<SparseEntry> entries;
  bool sparse = false;

  double dot(const RMatrix& x) const {
    if (!sparse) return (dense.array() * x.array()).sum();
    double v = 0.0;
    for (const auto& e : entries) v += e.value * x(e.row, e.col);
    return v;
  }

  void add_scaled_to(RMatrix& out, double alpha) const {
    if (!sparse) {
      out += alpha * dense;
      return;
    }
    for (const auto& e : entries) out(e.row, e.col) += alpha * e.value;
  }

  /// W A W for symmetric W.
  RMatrix sandwich(const RMatrix& w) const {
    if (!sparse) return w * dense * w;
    RMatrix out = RMatrix::Zero(w.rows(), w.cols());
    for (const auto& e : entries) out.noalias() += e.value * w.col(e.row) * w.row(e.col);
    return out;
  }
};

/// Standard form in solver units: rows scaled to unit norm, cost scaled to
/// unit norm, sign flipped for maximization.
struct StandardForm {
  std::vector<Eigen::Index> dims;
  std::vector<RMatrix> cost;
  std::vector<std::vector<ConeTerm>> terms;
  RVector lp_cost;
  RMatrix lp_a;
  RVector b;
  RVector row_scale;
  RVector original_rhs;
  double cost_scale = 1.0;
  double cost_norm = 0.0;  // 1 after scaling unless the objective is zero
  double sign = 1.0;
  std::size_t scalar_count = 0;
  std::size_t rows() const { return static_cast<std::size_t>(b.size()); }
  bool trivially_infeasible = false;
};

inline ConeTerm make_term(std::size_t row, RMatrix coeff) {
  ConeTerm t;
  t.row = row;
  const Eigen::Index nnz = (coeff.array() != 0.0).count();
  if (nnz * 4 <= coeff.rows()) {
    t.sparse = true;
    for (Eigen::Index c = 0; c < coeff.cols(); ++c)
      for (Eigen::Index r = 0; r < coeff.rows(); ++r)
        if (coeff(r, c) != 0.0) t.entries.push_back({r, c, coeff(r, c)});
  }
  t.dense = std::move(coeff);
  return t;
}

inline StandardForm standardize(const RealSdp& p) {
  StandardForm f;
  f.dims = p.block_dims;
  f.scalar_count = p.scalar_count;
  f.sign = p.goal == Goal::Maximize ? -1.0 : 1.0;
  const std::size_t nb = p.block_dims.size();

  // Rows with no variable coefficients carry no information except through
  // their slack; equality rows of that kind are dropped or flag infeasibility.
  std::vector<std::size_t> kept;
  std::vector<double> norms;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    double sq = 0.0;
    for (const auto& t : c.lhs.blocks) sq += t.coeff.squaredNorm();
    for (const auto& t : c.lhs.scalars) sq += t.coeff * t.coeff;
    const double norm = std::sqrt(sq);
    if (norm == 0.0) {
      const bool ok = (c.relation == Relation::Equal && c.rhs == 0.0) ||
                      (c.relation == Relation::LessEqual && c.rhs >= 0.0) ||
                      (c.relation == Relation::GreaterEqual && c.rhs <= 0.0);
      if (!ok) f.trivially_infeasible = true;
      if (c.relation == Relation::Equal) continue;
    }
    kept.push_back(i);
    norms.push_back(norm == 0.0 ? 1.0 : norm);
  }

  std::size_t slack_count = 0;
  for (auto i : kept)
    if (p.constraints[i].relation != Relation::Equal) ++slack_count;

  const auto m = static_cast<Eigen::Index>(kept.size());
  const auto lp = static_cast<Eigen::Index>(p.scalar_count + slack_count);
  f.terms.assign(nb, {});
  f.lp_a = RMatrix::Zero(m, lp);
  f.b.resize(m);
  f.row_scale.resize(m);
  f.original_rhs.resize(m);

  Eigen::Index slack = static_cast<Eigen::Index>(p.scalar_count);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& c = p.constraints[kept[r]];
    const double s = norms[r];
    f.row_scale(r) = s;
    f.original_rhs(r) = c.rhs;
    f.b(r) = c.rhs / s;
    std::vector<RMatrix> merged(nb);
    for (const auto& t : c.lhs.blocks) {
      if (merged[t.block].size() == 0) merged[t.block] = RMatrix::Zero(t.coeff.rows(), t.coeff.cols());
      merged[t.block] += t.coeff / s;
    }
    for (std::size_t blk = 0; blk < nb; ++blk)
      if (merged[blk].size() != 0 && merged[blk].squaredNorm() > 0.0)
        f.terms[blk].push_back(make_term(static_cast<std::size_t>(r), 0.5 * (merged[blk] + merged[blk].transpose())));
    for (const auto& t : c.lhs.scalars) f.lp_a(r, static_cast<Eigen::Index>(t.scalar.index)) += t.coeff / s;
    if (c.relation == Relation::LessEqual) f.lp_a(r, slack++) = 1.0;
    if (c.relation == Relation::GreaterEqual) f.lp_a(r, slack++) = -1.0;
  }

  f.cost.resize(nb);
  for (std::size_t blk = 0; blk < nb; ++blk) f.cost[blk] = RMatrix::Zero(p.block_dims[blk], p.block_dims[blk]);
  f.lp_cost = RVector::Zero(lp);
  for (const auto& t : p.objective.blocks) f.cost[t.block] += f.sign * t.coeff;
  for (const auto& t : p.objective.scalars) f.lp_cost(static_cast<Eigen::Index>(t.scalar.index)) += f.sign * t.coeff;
  double sq = f.lp_cost.squaredNorm();
  for (const auto& c : f.cost) sq += c.squaredNorm();
  f.cost_scale = sq > 0.0 ? std::sqrt(sq) : 1.0;
  f.cost_norm = sq > 0.0 ? 1.0 : 0.0;
  for (auto& c : f.cost) {
    c /= f.cost_scale;
    c = 0.5 * (c + c.transpose()).eval();
  }
  f.lp_cost /= f.cost_scale;
  return f;
}

/// Per-block NT scaling data.
struct Scaling {
  RMatrix l_inv;  // X = L L', L^{-1}
  RMatrix g;      // W = G G', G' Z G = G^{-1} X G^{-T} = D
  RMatrix g_inv;
  RMatrix w;
  RMatrix z_step;  // G D^{-1}: congruence that maps Z-steps to the identity frame
  RVector d;
};

inline bool nt_scaling(const RMatrix& x, const RMatrix& z, Scaling& s) {
  Eigen::SelfAdjointEigenSolver<RMatrix> ex(x);
  if (ex.info() != Eigen::Success) return false;
  const RVector lx = ex.eigenvalues();
  if (!(lx.minCoeff() > 0.0)) return false;
  const RVector root = lx.cwiseSqrt();
  const RMatrix l = ex.eigenvectors() * root.asDiagonal();
  s.l_inv = root.cwiseInverse().asDiagonal() * ex.eigenvectors().transpose();
  RMatrix inner = l.transpose() * z * l;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> ez(inner);
  if (ez.info() != Eigen::Success) return false;
  const RVector lam = ez.eigenvalues();
  if (!(lam.minCoeff() > 0.0)) return false;
  s.d = lam.cwiseSqrt();
  const RVector d_half = s.d.cwiseSqrt();
  const RMatrix lu = l * ez.eigenvectors();
  s.g = lu * d_half.cwiseInverse().asDiagonal();
  s.g_inv = d_half.asDiagonal() * ez.eigenvectors().transpose() * s.l_inv;
  s.w = s.g * s.g.transpose();
  s.w = 0.5 * (s.w + s.w.transpose()).eval();
  s.z_step = lu * s.d.cwiseInverse().asDiagonal();
  return true;
}

/// Largest alpha with I + alpha * M still PSD (M symmetric); +inf if unbounded.
inline double max_step_identity(const RMatrix& m) {
  RMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_step_lp(const RVector& v, const RVector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

struct Iterate {
  std::vector<RMatrix> x;
  std::vector<RMatrix> z;
  RVector xl;
  RVector zl;
  RVector y;
};

struct Direction {
  std::vector<RMatrix> dx;
  std::vector<RMatrix> dz;
  RVector dxl;
  RVector dzl;
  RVector dy;
};

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& f, const SolverOptions& opt) : f_(f), opt_(opt) {}

  struct Outcome {
    Iterate it;
    Status status = Status::MaxIterations;
    int iterations = 0;
    std::vector<double> gap_history;
  };

  Outcome run() {
    Outcome out;
    const std::size_t nb = f_.dims.size();
    const auto m = static_cast<Eigen::Index>(f_.rows());
    nu_ = static_cast<double>(f_.lp_cost.size());
    for (auto n : f_.dims) nu_ += static_cast<double>(n);

    const double tau = 1.0 + (m > 0 ? f_.b.cwiseAbs().maxCoeff() : 0.0);
    double cmax = f_.lp_cost.size() > 0 ? f_.lp_cost.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& c : f_.cost) cmax = std::max(cmax, c.norm());
    const double tau_z = 1.0 + cmax;

    Iterate& it = out.it;
    for (std::size_t blk = 0; blk < nb; ++blk) {
      it.x.push_back(tau * RMatrix::Identity(f_.dims[blk], f_.dims[blk]));
      it.z.push_back(tau_z * RMatrix::Identity(f_.dims[blk], f_.dims[blk]));
    }
    it.xl = RVector::Constant(f_.lp_cost.size(), tau);
    it.zl = RVector::Constant(f_.lp_cost.size(), tau_z);
    it.y = RVector::Zero(m);

    if (f_.trivially_infeasible) {
      out.status = Status::Infeasible;
      return out;
    }

    std::vector<double> pinf_history;
    int tiny_steps = 0;

    for (int k = 0; k <= opt_.max_iterations; ++k) {
      out.iterations = k;
      const RVector rp = f_.b - apply_a(it.x, it.xl);
      std::vector<RMatrix> rd;
      RVector rdl;
      dual_residual(it, rd, rdl);

      double pobj = f_.lp_cost.dot(it.xl);
      for (std::size_t blk = 0; blk < nb; ++blk) pobj += (f_.cost[blk].array() * it.x[blk].array()).sum();
      const double dobj = f_.b.dot(it.y);
      const double comp = complementarity(it.x, it.z, it.xl, it.zl);
      const double mu = comp / nu_;
      if (!std::isfinite(comp) || !std::isfinite(pobj) || !std::isfinite(dobj)) {
        out.status = Status::NumericalFailure;
        return out;
      }
      if (out.gap_history.empty()) out.gap_history.push_back(mu);
      double pinf = 0.0;
      double raw = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        pinf = std::max(pinf, std::abs(rp(i)) / (1.0 + std::abs(f_.b(i))));
        raw = std::max(raw, std::abs(rp(i)) * f_.row_scale(i) / (1.0 + std::abs(f_.original_rhs(i))));
      }
      double rd_sq = rdl.squaredNorm();
      for (const auto& r : rd) rd_sq += r.squaredNorm();
      const double dinf = std::sqrt(rd_sq) / (1.0 + f_.cost_norm);
      const double p_user = f_.cost_scale * pobj;
      const double d_user = f_.cost_scale * dobj;
      const double user_gap = std::abs(p_user - d_user) / (1.0 + std::abs(p_user) + std::abs(d_user));
      const double rel_comp = comp / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (opt_.verbose)
        std::fprintf(stderr, "%3d pobj %+.6e dobj %+.6e mu %.2e pinf %.2e raw %.2e dinf %.2e\n", k, pobj, dobj, mu,
                     pinf, raw, dinf);

      if (pinf <= opt_.feasibility_tolerance && raw <= opt_.feasibility_tolerance &&
          dinf <= opt_.feasibility_tolerance && rel_comp <= opt_.gap_tolerance && user_gap <= opt_.gap_tolerance) {
        out.status = Status::Optimal;
        return out;
      }

      pinf_history.push_back(pinf);
      if (pinf_history.size() > 10) {
        const double before = pinf_history[pinf_history.size() - 11];
        const bool stagnant = pinf > 0.5 * before && pinf > opt_.feasibility_tolerance;
        if (dobj > kDivergence && stagnant) {
          out.status = Status::Infeasible;
          return out;
        }
      }
      if (pobj < -kDivergence && dinf > opt_.feasibility_tolerance) {
        out.status = Status::Infeasible;
        return out;
      }
      if (k == opt_.max_iterations) break;

      // Scaling and Schur complement.
      std::vector<Scaling> sc(nb);
      for (std::size_t blk = 0; blk < nb; ++blk) {
        if (!nt_scaling(it.x[blk], it.z[blk], sc[blk])) {
          out.status = Status::NumericalFailure;
          return out;
        }
      }
      const RVector wl = it.xl.cwiseQuotient(it.zl);
      RMatrix schur = RMatrix::Zero(m, m);
      for (std::size_t blk = 0; blk < nb; ++blk) {
        const auto& terms = f_.terms[blk];
        for (std::size_t a = 0; a < terms.size(); ++a) {
          const RMatrix p = terms[a].sandwich(sc[blk].w);
          for (std::size_t c = a; c < terms.size(); ++c) {
            const double v = terms[c].dot(p);
            schur(terms[a].row, terms[c].row) += v;
            if (c != a) schur(terms[c].row, terms[a].row) += v;
          }
        }
      }
      if (f_.lp_a.cols() > 0) schur.noalias() += f_.lp_a * wl.asDiagonal() * f_.lp_a.transpose();

      Eigen::LDLT<RMatrix> ldlt;
      Eigen::LLT<RMatrix> llt(schur);
      bool use_llt = llt.info() == Eigen::Success;
      if (!use_llt) {
        const double reg = 1e-13 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        RMatrix shifted = schur;
        shifted.diagonal().array() += reg;
        llt.compute(shifted);
        use_llt = llt.info() == Eigen::Success;
        if (!use_llt) ldlt.compute(shifted);
      }
      auto factor_solve = [&](const RVector& rhs) -> RVector {
        return use_llt ? RVector(llt.solve(rhs)) : RVector(ldlt.solve(rhs));
      };
      // Refine against the unassembled operator; the assembled Schur matrix
      // loses digits once mu is small and the SINR-type rows are nearly active.
      auto solve = [&](const RVector& rhs) -> RVector {
        RVector dy = factor_solve(rhs);
        for (int pass = 0; pass < kRefinementPasses; ++pass) {
          const RVector r = rhs - apply_schur(sc, wl, dy);
          if (!(r.norm() > 0.0)) break;
          dy += factor_solve(r);
        }
        return dy;
      };

      // Predictor: sigma = 0.
      std::vector<RMatrix> q(nb);
      for (std::size_t blk = 0; blk < nb; ++blk) q[blk] = -RMatrix(sc[blk].d.asDiagonal());
      RVector rcl = -it.xl;
      Direction aff;
      if (!direction(sc, wl, rp, rd, rdl, q, rcl, solve, aff)) {
        out.status = Status::NumericalFailure;
        return out;
      }
      double ap = std::min(1.0, primal_step(sc, it, aff));
      double ad = std::min(1.0, dual_step(sc, it, aff));
      const double mu_aff = trial_complementarity(it, aff, ap, ad) / nu_;
      const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
      const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

      // Corrector with second-order term.
      auto scaled_target = [&](bool second_order) {
        for (std::size_t blk = 0; blk < nb; ++blk) {
          const auto& s = sc[blk];
          RMatrix r = RMatrix::Zero(s.d.size(), s.d.size());
          if (second_order) {
            const RMatrix dxs = s.g_inv * aff.dx[blk] * s.g_inv.transpose();
            const RMatrix dzs = s.g.transpose() * aff.dz[blk] * s.g;
            r = -(dxs * dzs + dzs * dxs);
          }
          r.diagonal().array() += 2.0 * sigma * mu;
          r.diagonal() -= 2.0 * s.d.cwiseAbs2();
          const auto n = r.rows();
          for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) r(i, j) /= (s.d(i) + s.d(j));
          q[blk] = 0.5 * (r + r.transpose());
        }
        RVector target = RVector::Constant(it.xl.size(), sigma * mu) - it.xl.cwiseProduct(it.zl);
        if (second_order) target -= aff.dxl.cwiseProduct(aff.dzl);
        rcl = target.cwiseQuotient(it.zl);
      };

      // Backtrack so the complementarity gap does not increase.
      auto accept = [&](const Direction& d, double& ap_io, double& ad_io, bool common) {
        double bp = ap_io;
        double bd = ad_io;
        if (common) bp = bd = std::min(bp, bd);
        double next = trial_complementarity(it, d, bp, bd);
        for (int tries = 0; tries < 40 && next > comp; ++tries) {
          bp *= 0.8;
          bd *= 0.8;
          next = trial_complementarity(it, d, bp, bd);
        }
        if (next > comp) return false;
        ap_io = bp;
        ad_io = bd;
        return true;
      };

      scaled_target(true);
      Direction dir;
      if (!direction(sc, wl, rp, rd, rdl, q, rcl, solve, dir)) {
        out.status = Status::NumericalFailure;
        return out;
      }
      ap = std::min(1.0, kBoundaryFraction * primal_step(sc, it, dir));
      ad = std::min(1.0, kBoundaryFraction * dual_step(sc, it, dir));

      if (!accept(dir, ap, ad, false) && !accept(dir, ap, ad, true)) {
        // The first-order direction decreases the gap whenever sigma < 1.
        // If that fails too the iterates are diverging (infeasible problem)
        // and the full corrector step lets the certificate build up.
        Direction plain;
        scaled_target(false);
        if (direction(sc, wl, rp, rd, rdl, q, rcl, solve, plain)) {
          double pp = std::min(1.0, kBoundaryFraction * primal_step(sc, it, plain));
          double pd = std::min(1.0, kBoundaryFraction * dual_step(sc, it, plain));
          if (accept(plain, pp, pd, true)) {
            dir = std::move(plain);
            ap = pp;
            ad = pd;
          }
        }
      }
      tiny_steps = (ap < 1e-10 && ad < 1e-10) ? tiny_steps + 1 : 0;
      if (opt_.verbose) std::fprintf(stderr, "    ap %.3e ad %.3e sigma %.3e\n", ap, ad, sigma);
      if (tiny_steps >= 3) {
        out.status = Status::NumericalFailure;
        return out;
      }

      for (std::size_t blk = 0; blk < nb; ++blk) {
        it.x[blk] += ap * dir.dx[blk];
        it.z[blk] += ad * dir.dz[blk];
        it.x[blk] = 0.5 * (it.x[blk] + it.x[blk].transpose()).eval();
        it.z[blk] = 0.5 * (it.z[blk] + it.z[blk].transpose()).eval();
      }
      it.xl += ap * dir.dxl;
      it.zl += ad * dir.dzl;
      it.y += ad * dir.dy;
      out.gap_history.push_back(complementarity(it.x, it.z, it.xl, it.zl) / nu_);
    }
    out.status = Status::MaxIterations;
    return out;
  }

 private:
  static constexpr double kBoundaryFraction = 0.99;
  static constexpr double kDivergence = 1e8;
  static constexpr int kRefinementPasses = 2;

  /// M v = A(W A'(v) W) + A_l diag(wl) A_l' v
  RVector apply_schur(const std::vector<Scaling>& sc, const RVector& wl, const RVector& v) const {
    std::vector<RMatrix> at;
    RVector atl;
    apply_at(v, at, atl);
    for (std::size_t blk = 0; blk < at.size(); ++blk) at[blk] = sc[blk].w * at[blk] * sc[blk].w;
    return apply_a(at, wl.cwiseProduct(atl));
  }

  RVector apply_a(const std::vector<RMatrix>& x, const RVector& xl) const {
    RVector out = f_.lp_a.cols() > 0 ? RVector(f_.lp_a * xl) : RVector::Zero(f_.b.size());
    for (std::size_t blk = 0; blk < f_.dims.size(); ++blk)
      for (const auto& t : f_.terms[blk]) out(static_cast<Eigen::Index>(t.row)) += t.dot(x[blk]);
    return out;
  }

  void apply_at(const RVector& y, std::vector<RMatrix>& out, RVector& outl) const {
    out.resize(f_.dims.size());
    for (std::size_t blk = 0; blk < f_.dims.size(); ++blk) {
      out[blk] = RMatrix::Zero(f_.dims[blk], f_.dims[blk]);
      for (const auto& t : f_.terms[blk]) t.add_scaled_to(out[blk], y(static_cast<Eigen::Index>(t.row)));
    }
    outl = f_.lp_a.transpose() * y;
  }

  void dual_residual(const Iterate& it, std::vector<RMatrix>& rd, RVector& rdl) const {
    apply_at(it.y, rd, rdl);
    for (std::size_t blk = 0; blk < f_.dims.size(); ++blk) rd[blk] = f_.cost[blk] - it.z[blk] - rd[blk];
    rdl = f_.lp_cost - it.zl - rdl;
  }

  static double complementarity(const std::vector<RMatrix>& x, const std::vector<RMatrix>& z, const RVector& xl,
                                const RVector& zl) {
    double v = xl.dot(zl);
    for (std::size_t blk = 0; blk < x.size(); ++blk) v += (x[blk].array() * z[blk].array()).sum();
    return v;
  }

  static double trial_complementarity(const Iterate& it, const Direction& d, double ap, double ad) {
    double v = (it.xl + ap * d.dxl).dot(it.zl + ad * d.dzl);
    for (std::size_t blk = 0; blk < it.x.size(); ++blk)
      v += ((it.x[blk] + ap * d.dx[blk]).array() * (it.z[blk] + ad * d.dz[blk]).array()).sum();
    return v;
  }

  template <typename Solve>
  bool direction(const std::vector<Scaling>& sc, const RVector& wl, const RVector& rp, const std::vector<RMatrix>& rd,
                 const RVector& rdl, const std::vector<RMatrix>& q, const RVector& rcl, Solve&& solve,
                 Direction& out) const {
    const std::size_t nb = f_.dims.size();
    std::vector<RMatrix> h(nb);
    for (std::size_t blk = 0; blk < nb; ++blk)
      h[blk] = sc[blk].g * q[blk] * sc[blk].g.transpose() - sc[blk].w * rd[blk] * sc[blk].w;
    const RVector hl = rcl - wl.cwiseProduct(rdl);
    const RVector rhs = rp - apply_a(h, hl);
    out.dy = solve(rhs);
    if (!out.dy.allFinite()) return false;
    apply_at(out.dy, out.dz, out.dzl);
    out.dx.resize(nb);
    for (std::size_t blk = 0; blk < nb; ++blk) {
      out.dz[blk] = rd[blk] - out.dz[blk];
      out.dz[blk] = 0.5 * (out.dz[blk] + out.dz[blk].transpose()).eval();
      RMatrix dx = sc[blk].g * q[blk] * sc[blk].g.transpose() - sc[blk].w * out.dz[blk] * sc[blk].w;
      out.dx[blk] = 0.5 * (dx + dx.transpose());
    }
    out.dzl = rdl - out.dzl;
    out.dxl = rcl - wl.cwiseProduct(out.dzl);

    // Forming dZ = Rd - A'(dy) cancels heavily when y is large, which leaves
    // A(dX) visibly off rp. Push the primal step back onto A(dX) = rp along
    // W A'(.) W; the dual side is untouched.
    for (int pass = 0; pass < kRefinementPasses; ++pass) {
      const RVector miss = rp - apply_a(out.dx, out.dxl);
      if (!(miss.norm() > 0.0)) break;
      const RVector delta = solve(miss);
      if (!delta.allFinite()) break;
      std::vector<RMatrix> at;
      RVector atl;
      apply_at(delta, at, atl);
      for (std::size_t blk = 0; blk < nb; ++blk) {
        const RMatrix corr = sc[blk].w * at[blk] * sc[blk].w;
        out.dx[blk] += 0.5 * (corr + corr.transpose());
      }
      out.dxl += wl.cwiseProduct(atl);
    }
    return true;
  }

  double primal_step(const std::vector<Scaling>& sc, const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.xl, d.dxl);
    for (std::size_t blk = 0; blk < sc.size(); ++blk)
      a = std::min(a, max_step_identity(sc[blk].l_inv * d.dx[blk] * sc[blk].l_inv.transpose()));
    return a;
  }

  double dual_step(const std::vector<Scaling>& sc, const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.zl, d.dzl);
    for (std::size_t blk = 0; blk < sc.size(); ++blk)
      a = std::min(a, max_step_identity(sc[blk].z_step.transpose() * d.dz[blk] * sc[blk].z_step));
    return a;
  }

  const StandardForm& f_;
  SolverOptions opt_;
  double nu_ = 1.0;
};

}  // namespace detail

struct ResidualReport {
  /// Signed violation per constraint, positive = violated.
  std::vector<double> violations;
  /// Minimum eigenvalue of every block.
  std::vector<double> min_eigenvalues;
  /// Most negative scalar value (0 if all scalars are nonnegative).
  double scalar_negativity = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;
  /// max_i max(0, v_i) / (1 + |rhs_i|)
  double max_relative_violation = 0.0;
};

inline ResidualReport check_residuals(const SdpProblem& problem, const std::vector<CMatrix>& blocks,
                                      const std::vector<double>& scalars) {
  if (blocks.size() != problem.blocks().size() || scalars.size() != problem.scalars().size())
    throw ValidationError("solution does not match problem variable count");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto n = problem.blocks()[b].dim;
    if (blocks[b].rows() != n || blocks[b].cols() != n)
      throw ValidationError("solution block '" + problem.blocks()[b].name + "' has wrong dimension");
  }
  ResidualReport r;
  r.objective = problem.objective().evaluate(blocks, scalars);
  for (const auto& c : problem.constraints()) {
    const double v = c.violation(c.lhs.evaluate(blocks, scalars));
    r.violations.push_back(v);
    r.max_violation = std::max(r.max_violation, v);
    r.max_relative_violation = std::max(r.max_relative_violation, std::max(0.0, v) / (1.0 + std::abs(c.rhs)));
  }
  for (const auto& b : blocks) r.min_eigenvalues.push_back(min_eigenvalue(b));
  for (double s : scalars) r.scalar_negativity = std::min(r.scalar_negativity, s);
  return r;
}

inline ResidualReport check_residuals(const SdpProblem& problem, const SdpSolution& solution) {
  return check_residuals(problem, solution.blocks, solution.scalars);
}

inline SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {}) {
  const RealSdp real = realify(problem);
  const detail::StandardForm form = detail::standardize(real);
  detail::InteriorPoint ipm(form, options);
  auto outcome = ipm.run();

  SdpSolution sol;
  sol.status = outcome.status;
  sol.iterations = outcome.iterations;
  sol.gap_history = std::move(outcome.gap_history);
  sol.blocks = real.to_complex(outcome.it.x);
  sol.scalars.assign(outcome.it.xl.data(), outcome.it.xl.data() + real.scalar_count);
  const auto report = check_residuals(problem, sol.blocks, sol.scalars);
  sol.objective = report.objective;
  sol.residuals = report.violations;
  sol.dual_objective = form.sign * form.cost_scale * form.b.dot(outcome.it.y);
  sol.duality_gap = std::abs(sol.objective - sol.dual_objective) /
                    (1.0 + std::abs(sol.objective) + std::abs(sol.dual_objective));
  return sol;
}

}  // namespace hris::sdp
