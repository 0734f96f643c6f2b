#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace hris {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// max_ij |H_ij - conj(H_ji)|
inline double hermitian_asymmetry(const CMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix hermitian_part(const CMatrix& h) { return 0.5 * (h + h.adjoint()); }

inline double min_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double real_trace(const CMatrix& h) { return h.trace().real(); }

/// Re Tr(A B) for square matrices, without forming the product.
inline double trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.transpose().array()).sum().real();
}

/// Factor F with F F^H equal to `h` after clipping negative eigenvalues to zero.
inline CMatrix psd_factor(const CMatrix& h) {
  if (h.size() == 0) return CMatrix(h.rows(), 0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace hris
