#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hris/rng.hpp"
#include "hris/sdp/dump.hpp"
#include "hris/sdp/solver.hpp"

using namespace hris;
using namespace hris::sdp;

namespace {

CMatrix random_hermitian(ComplexGaussian& g, Eigen::Index n) {
  CMatrix a = g.matrix(n, n);
  return hermitian_part(a);
}

CMatrix random_pd(ComplexGaussian& g, Eigen::Index n) {
  CMatrix a = g.matrix(n, n);
  return a * a.adjoint() + 0.5 * CMatrix::Identity(n, n);
}

SdpProblem lambda_max_problem(const CMatrix& c) {
  SdpProblem p;
  auto x = p.add_block("X", c.rows());
  p.set_objective(Goal::Maximize, LinearForm{}.add(x, c));
  p.add_constraint(LinearForm{}.add(x, CMatrix::Identity(c.rows(), c.rows())), Relation::Equal, 1.0, "trace");
  return p;
}

double largest_eigenvalue(const CMatrix& c) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(c.rows() - 1);
}

// Problem with a known strictly feasible point X0 (and s0 for scalars).
struct Generated {
  SdpProblem problem;
};

Generated random_feasible(std::uint64_t seed) {
  ComplexGaussian g(seed);
  std::mt19937_64 pick(seed);
  Generated out;
  auto& p = out.problem;
  const int nblocks = 1 + static_cast<int>(pick() % 2);
  std::vector<BlockId> ids;
  std::vector<CMatrix> x0;
  for (int b = 0; b < nblocks; ++b) {
    const auto n = static_cast<Eigen::Index>(2 + pick() % 3);
    ids.push_back(p.add_block("B" + std::to_string(b), n));
    x0.push_back(random_pd(g, n));
  }
  auto s = p.add_scalar("s");
  const double s0 = 0.7;

  LinearForm obj;
  for (int b = 0; b < nblocks; ++b) obj.add(ids[b], random_pd(g, x0[b].rows()));
  obj.add(s, 1.3);
  p.set_objective(Goal::Minimize, obj);

  const int m = 3 + static_cast<int>(pick() % 3);
  for (int i = 0; i < m; ++i) {
    LinearForm row;
    double value = 0.0;
    for (int b = 0; b < nblocks; ++b) {
      CMatrix a = random_hermitian(g, x0[b].rows());
      value += trace_product(a, x0[b]);
      row.add(ids[b], a);
    }
    const double sc = g.uniform(-1.0, 1.0);
    row.add(s, sc);
    value += sc * s0;
    const auto rel = static_cast<Relation>(i % 3);
    const double rhs = rel == Relation::LessEqual ? value + 0.5 : rel == Relation::GreaterEqual ? value - 0.5 : value;
    p.add_constraint(row, rel, rhs, "row" + std::to_string(i));
  }
  return out;
}

}  // namespace

TEST(Realify, ScalarBlockEmbedsAsScaledIdentity) {
  CMatrix h(1, 1);
  h(0, 0) = 3.5;
  RMatrix e = embed_hermitian(h);
  EXPECT_EQ(e.rows(), 2);
  EXPECT_DOUBLE_EQ(e(0, 0), 3.5);
  EXPECT_DOUBLE_EQ(e(1, 1), 3.5);
  EXPECT_DOUBLE_EQ(e(0, 1), 0.0);

  SdpProblem p;
  auto x = p.add_block("x", 1);
  p.set_objective(Goal::Maximize, LinearForm{}.add(x, h));
  auto real = realify(p);
  std::vector<CMatrix> value{CMatrix::Constant(1, 1, 2.0)};
  EXPECT_NEAR(real.objective.evaluate(real.to_real(value), {}), p.objective().evaluate(value, {}), 1e-15);
}

TEST(Realify, KnownEigenstructure) {
  CMatrix h(2, 2);
  h << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 1.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(embed_hermitian(h));
  RVector ev = es.eigenvalues();
  EXPECT_NEAR(ev(0), 0.0, 1e-14);
  EXPECT_NEAR(ev(1), 0.0, 1e-14);
  EXPECT_NEAR(ev(2), 2.0, 1e-14);
  EXPECT_NEAR(ev(3), 2.0, 1e-14);
}

TEST(Realify, RandomEigenvaluesDoubleInMultiplicity) {
  ComplexGaussian g(11);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix h = random_hermitian(g, 3);
    RVector ec = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    RVector er = Eigen::SelfAdjointEigenSolver<RMatrix>(embed_hermitian(h), Eigen::EigenvaluesOnly).eigenvalues();
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(er(2 * i), ec(i), 1e-12);
      EXPECT_NEAR(er(2 * i + 1), ec(i), 1e-12);
    }
  }
}

TEST(Realify, RejectsNonHermitianCoefficient) {
  SdpProblem p;
  auto x = p.add_block("X", 2);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  p.set_objective(Goal::Maximize, LinearForm{}.add(x, bad));
  EXPECT_THROW(realify(p), ValidationError);
}

TEST(Realify, CollapseIsExactForLinearFunctionalsOfUnstructuredBlocks) {
  ComplexGaussian g(5);
  CMatrix h = random_hermitian(g, 3);
  RMatrix a = RMatrix::Random(6, 6);
  RMatrix xr = a * a.transpose();
  const double real_value = (0.5 * embed_hermitian(h)).cwiseProduct(xr).sum();
  EXPECT_NEAR(real_value, trace_product(h, collapse_symmetric(xr)), 1e-12);
  EXPECT_GE(min_eigenvalue(collapse_symmetric(xr)), -1e-12);
}

TEST(Validation, DimensionMismatchAndEmptyProblem) {
  SdpProblem empty;
  EXPECT_THROW(empty.validate(), ValidationError);
  SdpProblem p;
  auto x = p.add_block("X", 2);
  p.add_constraint(LinearForm{}.add(x, CMatrix::Identity(3, 3)), Relation::Equal, 1.0);
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Solve, LambdaMaxDiagonal) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = 2.0;
  auto sol = solve(lambda_max_problem(c));
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-6);
  EXPECT_NEAR(sol.blocks[0](1, 1).real(), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(sol.blocks[0](0, 0)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(sol.blocks[0](0, 1)), 0.0, 1e-6);
}

TEST(Solve, LambdaMaxRandomHermitianMatchesEigensolver) {
  ComplexGaussian g(2024);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix c = random_hermitian(g, 5);
    auto sol = solve(lambda_max_problem(c));
    ASSERT_EQ(sol.status, Status::Optimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, largest_eigenvalue(c), 1e-6);
    EXPECT_LE(sol.duality_gap, 1e-6);
  }
}

TEST(Solve, ContradictoryTraceBoundsAreInfeasible) {
  SdpProblem p;
  auto x = p.add_block("X", 2);
  p.set_objective(Goal::Maximize, LinearForm{}.add(x, CMatrix::Identity(2, 2)));
  p.add_constraint(LinearForm{}.add(x, CMatrix::Identity(2, 2)), Relation::LessEqual, 1.0);
  p.add_constraint(LinearForm{}.add(x, CMatrix::Identity(2, 2)), Relation::GreaterEqual, 2.0);
  EXPECT_EQ(solve(p).status, Status::Infeasible);
}

TEST(Solve, ScalarOnlyLinearProgram) {
  SdpProblem p;
  auto a = p.add_scalar("a");
  auto b = p.add_scalar("b");
  p.set_objective(Goal::Maximize, LinearForm{}.add(a, 1.0).add(b, 2.0));
  p.add_constraint(LinearForm{}.add(a, 1.0).add(b, 1.0), Relation::LessEqual, 4.0);
  p.add_constraint(LinearForm{}.add(b, 1.0), Relation::LessEqual, 3.0);
  auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective, 7.0, 1e-6);
  EXPECT_NEAR(sol.scalars[0], 1.0, 1e-6);
  EXPECT_NEAR(sol.scalars[1], 3.0, 1e-6);
}

TEST(Solve, ZeroCoefficientInequalityIsHarmless) {
  CMatrix c = CMatrix::Identity(2, 2);
  c(1, 1) = 3.0;
  auto p = lambda_max_problem(c);
  auto x = BlockId{0};
  p.add_constraint(LinearForm{}.add(x, CMatrix::Zero(2, 2)), Relation::LessEqual, 1e-9, "empty");
  auto sol = solve(p);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective, 3.0, 1e-6);
}

TEST(Solve, RandomFeasibleProblemsMeetTolerances) {
  const SolverOptions opt;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto gen = random_feasible(seed);
    auto sol = solve(gen.problem, opt);
    ASSERT_EQ(sol.status, Status::Optimal) << "seed " << seed;
    auto rep = check_residuals(gen.problem, sol);
    EXPECT_LE(rep.max_relative_violation, opt.feasibility_tolerance) << "seed " << seed;
    EXPECT_LE(std::abs(sol.objective - sol.dual_objective), 1e-6 * (1.0 + std::abs(sol.objective)));
    for (std::size_t b = 0; b < sol.blocks.size(); ++b) {
      EXPECT_LE(hermitian_asymmetry(sol.blocks[b]), 1e-10);
      EXPECT_GE(rep.min_eigenvalues[b], -1e-8 * (1.0 + real_trace(sol.blocks[b])));
    }
    EXPECT_GE(rep.scalar_negativity, 0.0);
    for (std::size_t k = 1; k < sol.gap_history.size(); ++k)
      EXPECT_LE(sol.gap_history[k], sol.gap_history[k - 1]) << "seed " << seed << " iteration " << k;

    // The realified objective at the embedded solution equals the complex one.
    auto real = realify(gen.problem);
    EXPECT_NEAR(real.objective.evaluate(real.to_real(sol.blocks), sol.scalars), sol.objective,
                1e-9 * (1.0 + std::abs(sol.objective)));
  }
}

TEST(Solve, DeterministicForIdenticalInput) {
  auto gen = random_feasible(77);
  auto a = solve(gen.problem);
  auto b = solve(gen.problem);
  ASSERT_EQ(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) EXPECT_TRUE(a.blocks[i] == b.blocks[i]);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solve, ObjectiveScalingLeavesArgmaxUnchanged) {
  ComplexGaussian g(99);
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix c = random_hermitian(g, 4);
    const double alpha = 37.5;
    auto base = solve(lambda_max_problem(c));
    auto scaled = solve(lambda_max_problem(alpha * c));
    ASSERT_EQ(base.status, Status::Optimal);
    ASSERT_EQ(scaled.status, Status::Optimal);
    EXPECT_LE((base.blocks[0] - scaled.blocks[0]).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(scaled.objective, alpha * base.objective, 1e-6 * alpha * (1.0 + std::abs(base.objective)));
  }
}

TEST(CheckResiduals, AnalyticSolutionIsFeasible) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = 2.0;
  auto p = lambda_max_problem(c);
  CMatrix x = CMatrix::Zero(2, 2);
  x(1, 1) = 1.0;
  auto rep = check_residuals(p, {x}, {});
  EXPECT_LE(rep.max_violation, 1e-9);
  EXPECT_DOUBLE_EQ(rep.objective, 2.0);
  EXPECT_NEAR(rep.min_eigenvalues[0], 0.0, 1e-15);
}

TEST(CheckResiduals, ZeroMatrixViolatesTraceByOne) {
  auto p = lambda_max_problem(CMatrix::Identity(2, 2));
  auto rep = check_residuals(p, {CMatrix::Zero(2, 2)}, {});
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.violations[0], 1.0);
}

TEST(CheckResiduals, DimensionMismatchThrows) {
  auto p = lambda_max_problem(CMatrix::Identity(2, 2));
  EXPECT_THROW(check_residuals(p, {CMatrix::Zero(3, 3)}, {}), ValidationError);
  EXPECT_THROW(check_residuals(p, {}, {}), ValidationError);
}

TEST(Dump, WritesVersionedHeaderAndCounts) {
  auto gen = random_feasible(3);
  std::ostringstream os;
  write_dump(os, gen.problem);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "SDPDUMP v1");
  std::getline(is, line);
  EXPECT_EQ(line, "goal minimize");
  std::getline(is, line);
  EXPECT_EQ(line, "blocks " + std::to_string(gen.problem.blocks().size()));
  const auto text = os.str();
  std::size_t count = 0;
  for (std::size_t pos = text.find("\nconstraint "); pos != std::string::npos; pos = text.find("\nconstraint ", pos + 1))
    ++count;
  EXPECT_EQ(count, gen.problem.constraints().size());
}
