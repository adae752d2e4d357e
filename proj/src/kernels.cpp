#include "mfl/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <omp.h>

namespace mfl::kernels {

namespace {

int g_threads = 0;

std::size_t ipow(int d, int n) {
  std::size_t out = 1;
  for (int k = 0; k < n; ++k) out *= static_cast<std::size_t>(d);
  return out;
}

// Orbit label (rank of the occupation vector) of every tensor multi-index.
std::vector<std::size_t> orbit_labels(const OccupationBasis& basis, int M) {
  const std::size_t dim = ipow(basis.modes(), M);
  std::vector<std::size_t> label(dim);
#pragma omp parallel for schedule(static)
  for (std::size_t x = 0; x < dim; ++x) {
    label[x] = *basis.index_of(basis.occupation_of_tensor_index(x, M));
  }
  return label;
}

// Orbit size M!/Π n_k!
std::vector<double> orbit_sizes(const OccupationBasis& basis) {
  std::vector<double> sizes(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double s = 1.0;
    int placed = 0;
    for (int n : basis.state(i)) {
      for (int k = 1; k <= n; ++k) s = s * static_cast<double>(placed + k) / k;
      placed += n;
    }
    sizes[i] = s;
  }
  return sizes;
}

}  // namespace

void set_num_threads(int n) {
  g_threads = n;
  if (n > 0) omp_set_num_threads(n);
}

int num_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

ComplexMatrix symmetrizer(int M, int d) {
  const OccupationBasis basis(d, M);
  const auto label = orbit_labels(basis, M);
  const auto size = orbit_sizes(basis);
  const auto dim = static_cast<Index>(label.size());
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i)
      if (label[i] == label[j]) p(i, j) = 1.0 / size[label[j]];
  return p;
}

ComplexMatrix symmetric_sandwich(const ComplexMatrix& x, int M, int d) {
  const OccupationBasis basis(d, M);
  const auto label = orbit_labels(basis, M);
  const auto size = orbit_sizes(basis);
  const auto dim = static_cast<Index>(label.size());
  const auto orbits = static_cast<Index>(basis.size());

  // Column averages over orbits: Y = X P_S.
  ComplexMatrix col_sum = ComplexMatrix::Zero(dim, orbits);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) col_sum(i, static_cast<Index>(label[j])) += x(i, j);

  // Row averages of Y over orbits: P_S Y. Both sides collapse to an orbits×orbits table.
  ComplexMatrix table = ComplexMatrix::Zero(orbits, orbits);
  for (Index i = 0; i < dim; ++i) table.row(static_cast<Index>(label[i])) += col_sum.row(i);
  for (Index a = 0; a < orbits; ++a)
    for (Index b = 0; b < orbits; ++b) table(a, b) /= size[a] * size[b];

  ComplexMatrix out(dim, dim);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i)
      out(i, j) = table(static_cast<Index>(label[i]), static_cast<Index>(label[j]));
  return out;
}

ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d) {
  const std::size_t dim = ipow(d, M);
  // image of every multi-index under every slot permutation
  std::vector<int> perm(M);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<Index>> images;
  std::vector<int> digit(M);
  do {
    std::vector<Index> img(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      std::size_t rest = i;
      for (int s = M - 1; s >= 0; --s) {
        digit[s] = static_cast<int>(rest % d);
        rest /= d;
      }
      std::size_t j = 0;
      for (int s = 0; s < M; ++s) j = j * d + static_cast<std::size_t>(digit[perm[s]]);
      img[i] = static_cast<Index>(j);
    }
    images.push_back(std::move(img));
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto n = static_cast<Index>(dim);
  const double w = 1.0 / static_cast<double>(images.size());
  ComplexMatrix out(n, n);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (const auto& img : images) acc += x(img[r], img[c]);
      out(r, c) = w * acc;
    }
  return out;
}

ComplexMatrix apply_on_slot(const ComplexMatrix& x, const ComplexMatrix& op, int slot, int n,
                            Side side) {
  const auto d = static_cast<std::size_t>(op.rows());
  const std::size_t outer = ipow(static_cast<int>(d), slot);
  const std::size_t inner = ipow(static_cast<int>(d), n - slot - 1);
  const auto dim = static_cast<Index>(outer * d * inner);
  if (op.rows() != op.cols() || x.rows() != dim || x.cols() != dim || slot < 0 || slot >= n) {
    throw Error(ErrorKind::ShapeError, "apply_on_slot: operator/slot mismatch");
  }
  ComplexMatrix out(dim, dim);
  if (side == Side::Left) {
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < dim; ++c) {
      for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t b = 0; b < inner; ++b) {
          const std::size_t base = a * d * inner + b;
          for (std::size_t i = 0; i < d; ++i) {
            Complex acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
              acc += op(static_cast<Index>(i), static_cast<Index>(j)) *
                     x(static_cast<Index>(base + j * inner), c);
            out(static_cast<Index>(base + i * inner), c) = acc;
          }
        }
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < dim; ++r) {
      for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t b = 0; b < inner; ++b) {
          const std::size_t base = a * d * inner + b;
          for (std::size_t j = 0; j < d; ++j) {
            Complex acc = 0.0;
            for (std::size_t i = 0; i < d; ++i)
              acc += x(r, static_cast<Index>(base + i * inner)) *
                     op(static_cast<Index>(i), static_cast<Index>(j));
            out(r, static_cast<Index>(base + j * inner)) = acc;
          }
        }
      }
    }
  }
  return out;
}

ComplexMatrix normal_ordered(const ComplexMatrix& kernel, int p, const OccupationBasis& basis) {
  const int d = basis.modes();
  const std::size_t kd = ipow(d, p);
  if (kernel.rows() != static_cast<Index>(kd) || kernel.cols() != static_cast<Index>(kd)) {
    throw Error(ErrorKind::ShapeError, "normal_ordered: kernel is not d^p x d^p");
  }
  const auto dim = static_cast<Index>(basis.size());
  check_element_cap(basis.size(), basis.size(), "normal_ordered");
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  if (p > basis.particles()) return out;

#pragma omp parallel for schedule(dynamic)
  for (Index col = 0; col < dim; ++col) {
    std::vector<int> occ(basis.state(static_cast<std::size_t>(col)).begin(),
                         basis.state(static_cast<std::size_t>(col)).end());
    // Annihilation strings a_{yp}…a_{y1}|m⟩ (a_{y1} acts first): depth-first over y.
    std::vector<int> y(p);
    std::vector<int> x(p);

    auto create = [&](auto&& self, int level, std::size_t yflat, double amp) -> void {
      // Creation string a†_{x1}…a†_{xp}: a†_{xp} acts first, so fill x from the back.
      if (level < 0) {
        std::size_t xflat = 0;
        for (int k = 0; k < p; ++k) xflat = xflat * d + static_cast<std::size_t>(x[k]);
        const Complex kv = kernel(static_cast<Index>(xflat), static_cast<Index>(yflat));
        if (kv != 0.0) {
          const auto row = static_cast<Index>(*basis.index_of(occ));
          out(row, col) += kv * amp;
        }
        return;
      }
      for (int mode = 0; mode < d; ++mode) {
        x[level] = mode;
        const double f = std::sqrt(static_cast<double>(occ[mode] + 1));
        ++occ[mode];
        self(self, level - 1, yflat, amp * f);
        --occ[mode];
      }
    };

    auto annihilate = [&](auto&& self, int level, double amp) -> void {
      if (level == p) {
        std::size_t yflat = 0;
        for (int k = 0; k < p; ++k) yflat = yflat * d + static_cast<std::size_t>(y[k]);
        create(create, p - 1, yflat, amp);
        return;
      }
      for (int mode = 0; mode < d; ++mode) {
        if (occ[mode] == 0) continue;
        y[level] = mode;
        const double f = std::sqrt(static_cast<double>(occ[mode]));
        --occ[mode];
        self(self, level + 1, amp * f);
        ++occ[mode];
      }
    };
    annihilate(annihilate, 0, 1.0);
  }
  return out;
}

namespace reference {

namespace {

// Next permutation of {0..M-1} in lexicographic order; false after the last one.
bool next_perm(std::vector<int>& perm) { return std::next_permutation(perm.begin(), perm.end()); }

}  // namespace

ComplexMatrix symmetrizer(int M, int d) {
  const auto dim = static_cast<Index>(ipow(d, M));
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  std::vector<int> perm(M);
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0.0;
  do {
    sum += slot_permutation(perm, d);
    count += 1.0;
  } while (next_perm(perm));
  return sum / count;
}

ComplexMatrix symmetric_sandwich(const ComplexMatrix& x, int M, int d) {
  const ComplexMatrix p = symmetrizer(M, d);
  return p * x * p;
}

ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d) {
  const auto dim = static_cast<Index>(ipow(d, M));
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  std::vector<int> perm(M);
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0.0;
  do {
    const ComplexMatrix u = slot_permutation(perm, d);
    sum += u * x * u.adjoint();
    count += 1.0;
  } while (next_perm(perm));
  return sum / count;
}

ComplexMatrix apply_on_slot(const ComplexMatrix& x, const ComplexMatrix& op, int slot, int n,
                            Side side) {
  const int d = static_cast<int>(op.rows());
  const ComplexMatrix full = kron(kron(identity(static_cast<Index>(ipow(d, slot))), op),
                                  identity(static_cast<Index>(ipow(d, n - slot - 1))));
  return side == Side::Left ? ComplexMatrix(full * x) : ComplexMatrix(x * full);
}

ComplexMatrix symmetric_inclusion(const OccupationBasis& basis) {
  const int d = basis.modes();
  const int M = basis.particles();
  const std::size_t dim = ipow(d, M);
  ComplexMatrix j = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(basis.size()));
  for (std::size_t x = 0; x < dim; ++x) {
    const auto col = *basis.index_of(basis.occupation_of_tensor_index(x, M));
    j(static_cast<Index>(x), static_cast<Index>(col)) = 1.0;
  }
  for (Index c = 0; c < j.cols(); ++c) j.col(c).normalize();
  return j;
}

ComplexMatrix normal_ordered(const ComplexMatrix& kernel, int p, const OccupationBasis& basis) {
  const int d = basis.modes();
  const int n = basis.particles();
  const auto dim = static_cast<Index>(ipow(d, n));
  if (p > n) return ComplexMatrix::Zero(basis.size(), basis.size());
  // kernel ⊗ I on slots 0..p-1, then conjugate by a slot permutation for every
  // ordered tuple of distinct slots.
  const ComplexMatrix lifted = kron(kernel, identity(static_cast<Index>(ipow(d, n - p))));
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  // Every permutation of n slots maps slots 0..p-1 onto an ordered tuple; each
  // tuple is hit (n-p)! times.
  do {
    const ComplexMatrix q = slot_permutation(perm, d);
    full += q * lifted * q.adjoint();
  } while (next_perm(perm));
  double per_tuple = 1.0;
  for (int k = 2; k <= n - p; ++k) per_tuple *= k;
  full /= per_tuple;
  const ComplexMatrix j = symmetric_inclusion(basis);
  return j.adjoint() * full * j;
}

}  // namespace reference
}  // namespace mfl::kernels
