#pragma once

#include "mfl/tensor_core.hpp"

namespace mfl {

/// Hermitian, positive semidefinite one-particle state. Trace may differ from 1.
class DensityMatrix {
 public:
  /// Validates: Hermitian to 1e-12 (relative to the largest entry) and
  /// eigenvalues ≥ -1e-10. Throws NotHermitian / NotPSD.
  explicit DensityMatrix(ComplexMatrix m);

  /// Skips validation. Used for integrator output, where positivity is a
  /// property to be measured rather than assumed.
  static DensityMatrix unchecked(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double trace() const { return m_.trace().real(); }
  double min_eigenvalue() const;

 private:
  struct NoCheck {};
  DensityMatrix(ComplexMatrix m, NoCheck) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// p-particle observable kernel a on (C^d)^{⊗p}.
///
/// Symmetric means U_σ a U_σ† = a for every slot permutation σ. The default
/// constructor symmetrizes any other kernel with P_S^p and
/// records that it did so; `as_given` keeps the kernel untouched so that the
/// operations requiring symmetry can reject it.
class PObservable {
 public:
  PObservable(ComplexMatrix kernel, int d);
  static PObservable as_given(ComplexMatrix kernel, int d);

  int arity() const { return p_; }
  int modes() const { return d_; }
  const ComplexMatrix& kernel() const { return kernel_; }
  bool symmetric() const { return symmetric_; }
  bool symmetrized_on_construction() const { return symmetrized_; }
  double norm() const { return op_norm(kernel_); }

 private:
  PObservable() = default;
  int p_ = 0;
  int d_ = 0;
  ComplexMatrix kernel_;
  bool symmetric_ = false;
  bool symmetrized_ = false;
};

/// Throws NotSymmetric unless the observable is permutation symmetric.
void require_symmetric(const PObservable& a, const char* where);

}  // namespace mfl
