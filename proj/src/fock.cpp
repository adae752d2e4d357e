#include "mfl/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mfl/kernels.hpp"

namespace mfl {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (out > std::numeric_limits<std::uint64_t>::max() / num) {
      throw Error(ErrorKind::InstanceTooLarge, "binomial overflow");
    }
    out = out * num / static_cast<std::uint64_t>(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// OccupationBasis

OccupationBasis::OccupationBasis(int modes, int particles) : modes_(modes), particles_(particles) {
  if (modes < 1 || particles < 0) {
    throw Error(ErrorKind::ShapeError, "OccupationBasis: need modes >= 1 and particles >= 0");
  }
  states_with_.assign(modes + 1, std::vector<std::uint64_t>(particles + 1, 0));
  states_with_[0][0] = 1;
  for (int m = 1; m <= modes; ++m)
    for (int r = 0; r <= particles; ++r) states_with_[m][r] = binomial(r + m - 1, m - 1);

  const std::uint64_t count = states_with_[modes][particles];
  if (count > element_cap() / static_cast<std::uint64_t>(modes)) {
    throw Error(ErrorKind::InstanceTooLarge,
                "OccupationBasis: " + std::to_string(count) + " states exceed the element cap");
  }
  count_ = static_cast<std::size_t>(count);
  occupations_.reserve(count_ * static_cast<std::size_t>(modes));

  std::vector<int> cur(modes, 0);
  auto fill = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == modes - 1) {
      cur[pos] = remaining;
      occupations_.insert(occupations_.end(), cur.begin(), cur.end());
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      cur[pos] = n;
      self(self, pos + 1, remaining - n);
    }
  };
  fill(fill, 0, particles);
}

std::optional<std::size_t> OccupationBasis::index_of(std::span<const int> occupation) const {
  if (static_cast<int>(occupation.size()) != modes_) return std::nullopt;
  int total = 0;
  for (int n : occupation) {
    if (n < 0) return std::nullopt;
    total += n;
  }
  if (total != particles_) return std::nullopt;
  std::uint64_t idx = 0;
  int remaining = particles_;
  for (int k = 0; k + 1 < modes_; ++k) {
    for (int j = occupation[k] + 1; j <= remaining; ++j) idx += states_with_[modes_ - k - 1][remaining - j];
    remaining -= occupation[k];
  }
  return static_cast<std::size_t>(idx);
}

std::vector<int> OccupationBasis::occupation_of_tensor_index(std::size_t flat, int slots) const {
  std::vector<int> occ(modes_, 0);
  for (int s = 0; s < slots; ++s) {
    ++occ[flat % static_cast<std::size_t>(modes_)];
    flat /= static_cast<std::size_t>(modes_);
  }
  return occ;
}

// ---------------------------------------------------------------------------
// Second quantization

ComplexMatrix second_quantize_1body(const ComplexMatrix& h, const OccupationBasis& basis) {
  if (h.rows() != basis.modes() || h.cols() != basis.modes()) {
    throw Error(ErrorKind::ShapeError, "second_quantize_1body: h is not d x d");
  }
  if (!is_hermitian(h)) throw Error(ErrorKind::NotHermitian, "second_quantize_1body: h");
  return kernels::normal_ordered(h, 1, basis);
}

void validate_pair_potential(const ComplexMatrix& v, int d, const char* where) {
  if (v.rows() != d * d || v.cols() != d * d) {
    throw Error(ErrorKind::ShapeError, std::string(where) + ": V is not d^2 x d^2");
  }
  if (!is_hermitian(v)) throw Error(ErrorKind::NotHermitian, std::string(where) + ": V");
  const ComplexMatrix s = swap_operator(d);
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((s * v * s - v).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::NotSwapSymmetric, std::string(where) + ": SWAP V SWAP != V");
  }
}

ComplexMatrix second_quantize_2body(const ComplexMatrix& v, double g, const OccupationBasis& basis) {
  validate_pair_potential(v, basis.modes(), "second_quantize_2body");
  if (g == 0.0) return ComplexMatrix::Zero(basis.size(), basis.size());
  return (0.5 * g) * kernels::normal_ordered(v, 2, basis);
}

ComplexMatrix embed_p_observable(const PObservable& a, int N, const OccupationBasis& basis) {
  if (a.modes() != basis.modes() || N != basis.particles()) {
    throw Error(ErrorKind::ShapeError, "embed_p_observable: basis does not match (d, N)");
  }
  const int p = a.arity();
  if (p > N) {
    throw Error(ErrorKind::BadArity,
                "embed_p_observable: arity " + std::to_string(p) + " > N = " + std::to_string(N));
  }
  require_symmetric(a, "embed_p_observable");
  double coeff = 1.0;
  for (int j = 0; j < p; ++j) coeff /= static_cast<double>(N - j);
  return coeff * kernels::normal_ordered(a.kernel(), p, basis);
}

ComplexMatrix to_frame(const ComplexMatrix& op, const ComplexMatrix& frame, int slots) {
  const ComplexMatrix u = kron_power(frame, slots);
  return u.adjoint() * op * u;
}

ProductStateProjection project_product_state(const DensityMatrix& rho, int N) {
  if (N < 0) throw Error(ErrorKind::ShapeError, "project_product_state: N < 0");
  const HermitianSpectrum spec = eigh(rho.matrix());
  const int d = rho.dim();
  if (spec.eigenvalues(0) < -1e-10) {
    throw Error(ErrorKind::NotPSD, "project_product_state: negative eigenvalue");
  }

  ProductStateProjection out;
  out.eigenvalues.resize(d);
  out.state.frame.resize(d, d);
  for (int k = 0; k < d; ++k) {
    out.eigenvalues(k) = std::max(0.0, spec.eigenvalues(d - 1 - k));
    out.state.frame.col(k) = spec.eigenvectors.col(d - 1 - k);
  }
  auto basis = std::make_shared<const OccupationBasis>(d, N);
  const auto dim = static_cast<Index>(basis->size());
  out.state.matrix = ComplexMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    double w = 1.0;
    const auto occ = basis->state(static_cast<std::size_t>(i));
    for (int k = 0; k < d; ++k) w *= std::pow(out.eigenvalues(k), occ[k]);
    out.state.matrix(i, i) = w;
  }
  out.state.basis = std::move(basis);
  return out;
}

// ---------------------------------------------------------------------------
// SymmetricTower

SymmetricTower::SymmetricTower(int d, int max_particles) : d_(d) {
  if (d < 1 || max_particles < 0) throw Error(ErrorKind::ShapeError, "SymmetricTower: bad (d, K)");
  bases_.reserve(max_particles + 1);
  splits_.resize(max_particles + 1);
  for (int k = 0; k <= max_particles; ++k) {
    bases_.push_back(std::make_shared<const OccupationBasis>(d, k));
  }
  for (int k = 1; k <= max_particles; ++k) {
    const OccupationBasis& upper = *bases_[k];
    const OccupationBasis& lower = *bases_[k - 1];
    check_element_cap(lower.size() * d, upper.size(), "SymmetricTower split");
    ComplexMatrix b = ComplexMatrix::Zero(static_cast<Index>(lower.size() * d),
                                          static_cast<Index>(upper.size()));
    std::vector<int> occ(d);
    for (std::size_t col = 0; col < upper.size(); ++col) {
      const auto n = upper.state(col);
      std::copy(n.begin(), n.end(), occ.begin());
      for (int j = 0; j < d; ++j) {
        if (occ[j] == 0) continue;
        --occ[j];
        const std::size_t row = *lower.index_of(occ) * static_cast<std::size_t>(d) + j;
        ++occ[j];
        b(static_cast<Index>(row), static_cast<Index>(col)) =
            std::sqrt(static_cast<double>(occ[j]) / static_cast<double>(k));
      }
    }
    splits_[k] = std::move(b);
  }
}

ComplexMatrix SymmetricTower::lift(const ComplexMatrix& c, int k) const {
  const ComplexMatrix& b = split(k + 1);
  return b.adjoint() * kron(c, identity(d_)) * b;
}

ComplexMatrix SymmetricTower::power_state(const ComplexMatrix& rho, int k) const {
  ComplexMatrix s = ComplexMatrix::Ones(1, 1);
  for (int i = 1; i <= k; ++i) {
    const ComplexMatrix& b = split(i);
    s = b.adjoint() * kron(s, rho) * b;
  }
  return s;
}

ComplexMatrix SymmetricTower::one_body_sum(const ComplexMatrix& h, int k) const {
  if (k == 0) return ComplexMatrix::Zero(1, 1);
  const ComplexMatrix& b = split(k);
  return static_cast<double>(k) * (b.adjoint() * kron(identity(dim(k - 1)), h) * b);
}

ComplexMatrix SymmetricTower::pair_with_extra(const ComplexMatrix& v, int k) const {
  const ComplexMatrix bi = kron(split(k), identity(d_));
  return bi.adjoint() * kron(identity(dim(k - 1)), v) * bi;
}

ComplexMatrix SymmetricTower::pair_operator(const ComplexMatrix& v, int k) const {
  if (k < 2) throw Error(ErrorKind::BadArity, "pair_operator needs k >= 2");
  const ComplexMatrix& b = split(k);
  return b.adjoint() * pair_with_extra(v, k - 1) * b;
}

ComplexMatrix SymmetricTower::inclusion(int k) const {
  ComplexMatrix j = ComplexMatrix::Ones(1, 1);
  for (int i = 1; i <= k; ++i) j = kron(j, identity(d_)) * split(i);
  return j;
}

ComplexMatrix SymmetricTower::to_symmetric(const ComplexMatrix& full, int k) const {
  const ComplexMatrix j = inclusion(k);
  if (full.rows() != j.rows()) throw Error(ErrorKind::ShapeError, "to_symmetric: size mismatch");
  return j.adjoint() * full * j;
}

ComplexMatrix SymmetricTower::to_full(const ComplexMatrix& sym, int k) const {
  const ComplexMatrix j = inclusion(k);
  if (sym.rows() != j.cols()) throw Error(ErrorKind::ShapeError, "to_full: size mismatch");
  return j * sym * j.adjoint();
}

}  // namespace mfl
