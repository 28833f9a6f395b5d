#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace freespec {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr cdouble I{0.0, 1.0};

/// Largest singular value, computed as sqrt(lambda_max(A^H A)).
inline double opnorm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

/// Hermitian imaginary part (A - A^H) / 2i.
inline CMat herm_im(const CMat& a) { return (a - a.adjoint()) / (2.0 * I); }

inline double max_eig_hermitian(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double min_eig_hermitian(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_pos_def_hermitian(const CMat& a, double tol = 0.0) {
  if (opnorm(a - a.adjoint()) > 1e-12 * (1.0 + opnorm(a))) return false;
  return min_eig_hermitian((a + a.adjoint()) / 2.0) > tol;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace freespec
