#include "mfl/types.hpp"

#include <string>

#include <Eigen/Eigenvalues>

namespace mfl {

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw Error(ErrorKind::ShapeError, "DensityMatrix: matrix must be square and nonempty");
  }
  if (!is_hermitian(m_, 1e-12)) {
    throw Error(ErrorKind::NotHermitian,
                "DensityMatrix: hermiticity error " + std::to_string(hermiticity_error(m_)));
  }
  m_ = hermitian_part(m_);
  const double lo = min_eigenvalue();
  if (lo < -1e-10) {
    throw Error(ErrorKind::NotPSD, "DensityMatrix: eigenvalue " + std::to_string(lo));
  }
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) { return {std::move(m), NoCheck{}}; }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m_), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

namespace {

int infer_arity(const ComplexMatrix& kernel, int d) {
  if (kernel.rows() != kernel.cols() || d < 1) {
    throw Error(ErrorKind::ShapeError, "PObservable: kernel must be square");
  }
  Index dim = 1;
  int p = 0;
  while (dim < kernel.rows()) {
    dim *= d;
    ++p;
  }
  if (dim != kernel.rows() || p == 0) {
    throw Error(ErrorKind::ShapeError, "PObservable: kernel size is not a positive power of d");
  }
  return p;
}

// U_σ a U_σ† = a for every σ. P_S-supported kernels qualify, and so do I and swap-symmetric V.
bool kernel_is_symmetric(const ComplexMatrix& kernel, int p, int d) {
  const double scale = std::max(1.0, kernel.cwiseAbs().maxCoeff());
  return (permutation_average(kernel, p, d) - kernel).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

PObservable::PObservable(ComplexMatrix kernel, int d) {
  p_ = infer_arity(kernel, d);
  d_ = d;
  if (kernel_is_symmetric(kernel, p_, d)) {
    kernel_ = std::move(kernel);
  } else {
    kernel_ = symmetrize_sandwich(kernel, p_, d);
    symmetrized_ = true;
  }
  symmetric_ = true;
}

PObservable PObservable::as_given(ComplexMatrix kernel, int d) {
  PObservable a;
  a.p_ = infer_arity(kernel, d);
  a.d_ = d;
  a.symmetric_ = kernel_is_symmetric(kernel, a.p_, d);
  a.kernel_ = std::move(kernel);
  return a;
}

void require_symmetric(const PObservable& a, const char* where) {
  if (!a.symmetric()) {
    throw Error(ErrorKind::NotSymmetric, std::string(where) + ": kernel is not permutation symmetric");
  }
}

}  // namespace mfl
