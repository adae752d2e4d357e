#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "mfl/tensor_core.hpp"

namespace mfl {

/// Seeded generator whose output is fixed across platforms: mt19937_64 bits,
/// 53-bit uniforms and Box-Muller normals (std::normal_distribution is
/// implementation-defined, so it is not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  /// Independent stream for a named sub-task.
  Rng fork(std::uint64_t salt);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// G with standard normal real and imaginary parts.
ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng);

/// (G + G†)/2
ComplexMatrix random_hermitian(Index n, Rng& rng);

/// G G† / Tr(G G†)
ComplexMatrix random_density(Index n, Rng& rng);

ComplexVector random_unit_vector(Index n, Rng& rng);

/// Hermitian and SWAP-symmetric two-particle operator on C^d ⊗ C^d.
ComplexMatrix random_swap_symmetric(int d, Rng& rng);

/// Real symmetric weight table w(x, y) = w(y, x), d × d.
Eigen::MatrixXd random_pair_table(int d, Rng& rng);

/// Hermitian kernel with P_S a P_S = a on (C^d)^{⊗p}.
ComplexMatrix random_symmetric_kernel(int d, int p, Rng& rng);

}  // namespace mfl
