#include "mfl/tensor_core.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mfl/kernels.hpp"

namespace mfl {

namespace {
std::atomic<std::size_t> g_element_cap{std::size_t{1} << 26};
}

std::size_t element_cap() { return g_element_cap.load(); }
void set_element_cap(std::size_t cap) { g_element_cap.store(cap); }

void check_element_cap(std::size_t rows, std::size_t cols, const char* what) {
  const std::size_t cap = element_cap();
  if (rows != 0 && cols > cap / rows) {
    throw Error(ErrorKind::InstanceTooLarge,
                std::string(what) + ": " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds the element cap of " + std::to_string(cap));
  }
}

std::size_t tensor_dim(int d, int n) {
  if (d < 1 || n < 0) throw Error(ErrorKind::ShapeError, "tensor_dim: bad d or n");
  std::size_t dim = 1;
  for (int k = 0; k < n; ++k) {
    if (dim > element_cap() / static_cast<std::size_t>(d)) {
      throw Error(ErrorKind::InstanceTooLarge,
                  "tensor dimension " + std::to_string(d) + "^" + std::to_string(n));
    }
    dim *= static_cast<std::size_t>(d);
  }
  return dim;
}

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  const double scale = m.size() ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;
  return hermiticity_error(m) <= tol * scale;
}

HermitianSpectrum eigh(const ComplexMatrix& h) {
  if (!is_hermitian(h, 1e-12)) {
    throw Error(ErrorKind::NotHermitian,
                "eigh: hermiticity error " + std::to_string(hermiticity_error(h)));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
  const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
  check_element_cap(rows, cols, "kron");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_power(const ComplexMatrix& a, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, a);
  return out;
}

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix symmetrize(int M, int d) {
  const std::size_t dim = tensor_dim(d, M);
  check_element_cap(dim, dim, "symmetrize");
  return kernels::symmetrizer(M, d);
}

ComplexMatrix symmetrize_sandwich(const ComplexMatrix& x, int M, int d) {
  const std::size_t dim = tensor_dim(d, M);
  if (static_cast<std::size_t>(x.rows()) != dim || x.rows() != x.cols()) {
    throw Error(ErrorKind::ShapeError, "symmetrize_sandwich: operator does not act on (C^d)^M");
  }
  return kernels::symmetric_sandwich(x, M, d);
}

ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d) {
  const std::size_t dim = tensor_dim(d, M);
  if (static_cast<std::size_t>(x.rows()) != dim || x.rows() != x.cols()) {
    throw Error(ErrorKind::ShapeError, "permutation_average: operator does not act on (C^d)^M");
  }
  return kernels::permutation_average(x, M, d);
}

ComplexMatrix slot_permutation(std::span<const int> perm, int d) {
  const int n = static_cast<int>(perm.size());
  const std::size_t dim = tensor_dim(d, n);
  check_element_cap(dim, dim, "slot_permutation");
  std::vector<int> seen(n, 0);
  for (int target : perm) {
    if (target < 0 || target >= n || seen[target]++) {
      throw Error(ErrorKind::ShapeError, "slot_permutation: not a permutation");
    }
  }
  std::vector<std::size_t> stride(n);
  for (int k = 0; k < n; ++k) {
    stride[k] = 1;
    for (int j = k + 1; j < n; ++j) stride[k] *= static_cast<std::size_t>(d);
  }
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t y = 0;
    std::size_t rest = x;
    for (int k = 0; k < n; ++k) {
      const std::size_t digit = rest / stride[k];
      rest %= stride[k];
      y += digit * stride[perm[k]];
    }
    p(static_cast<Index>(y), static_cast<Index>(x)) = 1.0;
  }
  return p;
}

ComplexMatrix swap_operator(int d) {
  const int perm[2] = {1, 0};
  return slot_permutation(perm, d);
}

ComplexMatrix place_two_slot(const ComplexMatrix& v, int i, int j, int n, int d) {
  if (i == j || i < 0 || j < 0 || i >= n || j >= n || v.rows() != d * d || v.cols() != d * d) {
    throw Error(ErrorKind::ShapeError, "place_two_slot: bad slots or operator shape");
  }
  std::vector<int> perm(n);
  perm[0] = i;
  perm[1] = j;
  int next = 0;
  for (int k = 2; k < n; ++k) {
    while (next == i || next == j) ++next;
    perm[k] = next++;
  }
  const ComplexMatrix lifted = kron(v, identity(static_cast<Index>(tensor_dim(d, n - 2))));
  const ComplexMatrix p = slot_permutation(perm, d);
  return p * lifted * p.adjoint();
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  std::size_t total = 1;
  for (int dim : dims) {
    if (dim < 1) throw Error(ErrorKind::ShapeError, "partial_trace: nonpositive slot dimension");
    total *= static_cast<std::size_t>(dim);
  }
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    throw Error(ErrorKind::ShapeError, "partial_trace: dims do not multiply to matrix size");
  }
  std::vector<char> kept(n, 0);
  for (int k : keep) {
    if (k < 0 || k >= n || kept[k]) throw Error(ErrorKind::ShapeError, "partial_trace: bad keep set");
    kept[k] = 1;
  }
  std::vector<std::size_t> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * static_cast<std::size_t>(dims[k + 1]);

  // Offsets contributed by every kept multi-index and by every traced multi-index.
  auto offsets = [&](bool want_kept) {
    std::vector<std::size_t> out{0};
    for (int k = 0; k < n; ++k) {
      if (static_cast<bool>(kept[k]) != want_kept) continue;
      std::vector<std::size_t> next;
      next.reserve(out.size() * dims[k]);
      for (std::size_t base : out)
        for (int x = 0; x < dims[k]; ++x) next.push_back(base + x * stride[k]);
      out.swap(next);
    }
    return out;
  };
  const std::vector<std::size_t> keep_off = offsets(true);
  const std::vector<std::size_t> trace_off = offsets(false);
  const auto out_dim = static_cast<Index>(keep_off.size());

  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < out_dim; ++i) {
    for (Index j = 0; j < out_dim; ++j) {
      Complex acc = 0.0;
      for (std::size_t t : trace_off) {
        acc += m(static_cast<Index>(keep_off[i] + t), static_cast<Index>(keep_off[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && hermiticity_error(m) == 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix unitary(const HermitianSpectrum& spec, double t, double hbar) {
  const Index n = spec.eigenvalues.size();
  ComplexVector phases(n);
  for (Index k = 0; k < n; ++k) phases(k) = std::exp(kI * spec.eigenvalues(k) * t / hbar);
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

ComplexMatrix propagate(const HermitianSpectrum& spec, double t, double hbar,
                        const ComplexMatrix& x) {
  if (x.rows() != spec.eigenvalues.size() || x.cols() != spec.eigenvalues.size()) {
    throw Error(ErrorKind::ShapeError, "propagate: operator and Hamiltonian sizes differ");
  }
  if (t == 0.0) return x;
  // Rotate into the eigenbasis, multiply by phase differences, rotate back.
  const ComplexMatrix& e = spec.eigenvectors;
  ComplexMatrix y = e.adjoint() * x * e;
  const Index n = y.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      y(i, j) *= std::exp(kI * (spec.eigenvalues(i) - spec.eigenvalues(j)) * t / hbar);
  return e * y * e.adjoint();
}

ComplexMatrix propagate(const ComplexMatrix& h, double t, double hbar, const ComplexMatrix& x) {
  return propagate(eigh(h), t, hbar, x);
}

}  // namespace mfl
