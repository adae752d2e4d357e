#include "mfl/random.hpp"

#include <cmath>
#include <numbers>

namespace mfl {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  return r * std::cos(phi);
}

Rng Rng::fork(std::uint64_t salt) {
  // splitmix64 of (next draw ^ salt)
  std::uint64_t z = engine_() ^ (salt + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  // Row-major fill so the draw order does not depend on Eigen's storage order.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

ComplexMatrix random_hermitian(Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_density(Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

ComplexVector random_unit_vector(Index n, Rng& rng) {
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v.normalized();
}

ComplexMatrix random_swap_symmetric(int d, Rng& rng) {
  const ComplexMatrix w = random_hermitian(d * d, rng);
  const ComplexMatrix s = swap_operator(d);
  return hermitian_part(0.5 * (w + s * w * s));
}

Eigen::MatrixXd random_pair_table(int d, Rng& rng) {
  Eigen::MatrixXd w(d, d);
  for (int x = 0; x < d; ++x)
    for (int y = x; y < d; ++y) w(x, y) = w(y, x) = rng.normal();
  return w;
}

ComplexMatrix random_symmetric_kernel(int d, int p, Rng& rng) {
  const auto dim = static_cast<Index>(tensor_dim(d, p));
  return hermitian_part(symmetrize_sandwich(random_hermitian(dim, rng), p, d));
}

}  // namespace mfl
