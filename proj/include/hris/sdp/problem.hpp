#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hris/errors.hpp"
#include "hris/linalg.hpp"

namespace hris::sdp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Goal { Maximize, Minimize };

struct BlockId {
  std::size_t index = 0;
};

struct ScalarId {
  std::size_t index = 0;
};

struct BlockTerm {
  BlockId block;
  CMatrix coeff;
};

struct ScalarTerm {
  ScalarId scalar;
  double coeff = 0.0;
};

/// sum_b Re Tr(A_b X_b) + sum_s a_s x_s
struct LinearForm {
  std::vector<BlockTerm> blocks;
  std::vector<ScalarTerm> scalars;

  LinearForm& add(BlockId b, CMatrix coeff) {
    blocks.push_back({b, std::move(coeff)});
    return *this;
  }
  LinearForm& add(ScalarId s, double coeff) {
    scalars.push_back({s, coeff});
    return *this;
  }

  double evaluate(const std::vector<CMatrix>& x, const std::vector<double>& s) const {
    double v = 0.0;
    for (const auto& t : blocks) v += trace_product(t.coeff, x[t.block.index]);
    for (const auto& t : scalars) v += t.coeff * s[t.scalar.index];
    return v;
  }
};

struct Constraint {
  LinearForm lhs;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
  std::string tag;

  /// Signed violation: positive means the constraint is broken by that amount.
  double violation(double lhs_value) const {
    switch (relation) {
      case Relation::LessEqual: return lhs_value - rhs;
      case Relation::GreaterEqual: return rhs - lhs_value;
      case Relation::Equal: return std::abs(lhs_value - rhs);
    }
    return 0.0;
  }
};

struct BlockInfo {
  std::string name;
  Eigen::Index dim = 0;
};

/// Dense SDP over Hermitian PSD blocks and nonnegative scalars.
class SdpProblem {
 public:
  static constexpr double kHermitianTolerance = 1e-12;

  BlockId add_block(std::string name, Eigen::Index dim) {
    if (dim < 1) throw ValidationError("block '" + name + "' must have dimension >= 1");
    blocks_.push_back({std::move(name), dim});
    return {blocks_.size() - 1};
  }

  ScalarId add_scalar(std::string name) {
    scalars_.push_back(std::move(name));
    return {scalars_.size() - 1};
  }

  void set_objective(Goal goal, LinearForm form) {
    goal_ = goal;
    objective_ = std::move(form);
  }

  void add_constraint(LinearForm lhs, Relation rel, double rhs, std::string tag = {}) {
    constraints_.push_back({std::move(lhs), rel, rhs, std::move(tag)});
  }

  const std::vector<BlockInfo>& blocks() const { return blocks_; }
  const std::vector<std::string>& scalars() const { return scalars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearForm& objective() const { return objective_; }
  Goal goal() const { return goal_; }

  void validate() const {
    if (blocks_.empty() && scalars_.empty()) throw ValidationError("SDP has no variables");
    check_form(objective_, "objective");
    for (const auto& c : constraints_) {
      check_form(c.lhs, c.tag.empty() ? std::string("constraint") : c.tag);
      if (!std::isfinite(c.rhs)) throw ValidationError("non-finite rhs in " + c.tag);
    }
  }

 private:
  void check_form(const LinearForm& f, const std::string& where) const {
    for (const auto& t : f.blocks) {
      if (t.block.index >= blocks_.size()) throw ValidationError(where + ": unknown block");
      const auto n = blocks_[t.block.index].dim;
      if (t.coeff.rows() != n || t.coeff.cols() != n)
        throw ValidationError(where + ": coefficient size does not match block '" +
                              blocks_[t.block.index].name + "'");
      if (!t.coeff.allFinite()) throw ValidationError(where + ": non-finite coefficient");
      if (hermitian_asymmetry(t.coeff) > kHermitianTolerance)
        throw ValidationError(where + ": coefficient is not Hermitian");
    }
    for (const auto& t : f.scalars) {
      if (t.scalar.index >= scalars_.size()) throw ValidationError(where + ": unknown scalar");
      if (!std::isfinite(t.coeff)) throw ValidationError(where + ": non-finite coefficient");
    }
  }

  std::vector<BlockInfo> blocks_;
  std::vector<std::string> scalars_;
  Goal goal_ = Goal::Minimize;
  LinearForm objective_;
  std::vector<Constraint> constraints_;
};

enum class Status { Optimal, Infeasible, MaxIterations, NumericalFailure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::MaxIterations: return "MaxIterations";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

struct SdpSolution {
  std::vector<CMatrix> blocks;
  std::vector<double> scalars;
  double objective = 0.0;
  double dual_objective = 0.0;
  Status status = Status::NumericalFailure;
  /// |primal - dual| / (1 + |primal| + |dual|) in the caller's units.
  double duality_gap = 0.0;
  /// Signed violation per constraint (positive = violated).
  std::vector<double> residuals;
  int iterations = 0;
  /// Complementarity <X,Z>/nu of every accepted iterate, in solver units.
  std::vector<double> gap_history;
};

struct SolverOptions {
  double gap_tolerance = 1e-7;
  double feasibility_tolerance = 1e-7;
  int max_iterations = 100;
  /// Print one line per iteration to stderr.
  bool verbose = false;
};

}  // namespace hris::sdp
