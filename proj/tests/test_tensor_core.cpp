#include <doctest.h>

#include <algorithm>

#include "mfl/random.hpp"
#include "mfl/tensor_core.hpp"
#include "oracles.hpp"

using namespace mfl;

namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v.cast<Complex>().asDiagonal();
}

// Gaussian-integer entries: every product in a Kronecker chain is exact, so
// bit equality tests the layout and nothing else.
ComplexMatrix small_integers(Index rows, Index cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = Complex(std::floor(9.0 * rng.uniform()) - 4.0, std::floor(9.0 * rng.uniform()) - 4.0);
  return m;
}

}  // namespace

TEST_SUITE("tensor_core") {

TEST_CASE("kron on identities and diagonals") {
  CHECK(kron(identity(2), identity(2)) == identity(4));
  CHECK(kron(diag({1, 2}), diag({1, 1})) == diag({1, 1, 2, 2}));
}

TEST_CASE("kron matches the index-loop oracle and is associative bit for bit") {
  Rng rng(1);
  const ComplexMatrix a = random_gaussian(2, 3, rng), b = random_gaussian(3, 2, rng), c = random_gaussian(2, 2, rng);
  CHECK((kron(a, b) - oracle::kron(a, b)).norm() == 0.0);
  // rounding of a product of three complex numbers depends on the grouping
  CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff() <= 1e-15 * kron(kron(a, b), c).cwiseAbs().maxCoeff());
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = small_integers(2, 3, rng), y = small_integers(3, 2, rng), z = small_integers(2, 2, rng);
    CHECK(kron(kron(x, y), z) == kron(x, kron(y, z)));
  }
  CHECK((kron_power(c, 3) - oracle::kron_power(c, 3)).norm() < 1e-14);
}

TEST_CASE("kron spectrum is the product of spectra") {
  Rng rng(2);
  const ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(2, rng);
  const RealVector la = eigh(a).eigenvalues, lb = eigh(b).eigenvalues;
  std::vector<double> expected;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) expected.push_back(la(i) * lb(j));
  std::sort(expected.begin(), expected.end());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(kron(a, b));
  for (int k = 0; k < 4; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("element cap raises InstanceTooLarge") {
  const std::size_t saved = element_cap();
  set_element_cap(64);
  CHECK_THROWS_AS(kron(identity(4), identity(4)), Error);
  try {
    kron_power(identity(2), 4);
    FAIL("expected InstanceTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InstanceTooLarge);
  }
  set_element_cap(saved);
}

TEST_CASE("symmetrize") {
  CHECK(symmetrize(1, 3) == identity(3));

  const ComplexMatrix p2 = symmetrize(2, 2);
  ComplexVector e12 = ComplexVector::Zero(4);
  e12(1) = 1.0;  // e1 ⊗ e2
  ComplexVector expected = ComplexVector::Zero(4);
  expected(1) = expected(2) = 0.5;
  CHECK((p2 * e12 - expected).norm() < 1e-15);

  const ComplexMatrix p3 = symmetrize(3, 2);
  CHECK((p3 * p3 - p3).norm() < 1e-12);
  CHECK((p3 - p3.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p3);
  const auto rank = (es.eigenvalues().array() > 0.5).count();
  CHECK(rank == 4);

  for (int M = 1; M <= 4; ++M)
    for (int d = 2; d <= 3; ++d) {
      if (M == 4 && d == 3) continue;
      CHECK((symmetrize(M, d) - oracle::perm_projector(M, d)).norm() < 1e-12);
    }
}

TEST_CASE("symmetrize_sandwich equals P X P") {
  Rng rng(3);
  const ComplexMatrix x = random_gaussian(27, 27, rng);
  const ComplexMatrix p = oracle::perm_projector(3, 3);
  CHECK((symmetrize_sandwich(x, 3, 3) - p * x * p).norm() < 1e-12);
}

TEST_CASE("swap and place_two_slot") {
  CHECK((swap_operator(3) - oracle::swap(3)).norm() == 0.0);
  Rng rng(4);
  const ComplexMatrix v = random_gaussian(4, 4, rng);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK((place_two_slot(v, i, j, 3, 2) - oracle::on_pair(v, i, j, 3, 2)).norm() < 1e-14);
}

TEST_CASE("partial_trace") {
  Rng rng(5);
  const ComplexMatrix a = random_gaussian(2, 2, rng), b = random_gaussian(3, 3, rng);
  const std::vector<int> dims{2, 3};
  const std::vector<int> keep0{0};
  CHECK((partial_trace(kron(a, b), dims, keep0) - b.trace() * a).norm() < 1e-13);

  const ComplexMatrix m = random_gaussian(6, 6, rng);
  const std::vector<int> none;
  const ComplexMatrix all = partial_trace(m, dims, none);
  REQUIRE(all.rows() == 1);
  CHECK(std::abs(all(0, 0) - m.trace()) < 1e-13);

  const ComplexMatrix h = random_hermitian(4, rng);
  const std::vector<int> d22{2, 2};
  const std::vector<int> keep1{1};
  const ComplexMatrix r = partial_trace(h, d22, keep1);
  CHECK((r - oracle::partial_trace(h, d22, keep1)).norm() < 1e-14);
  CHECK(hermiticity_error(r) < 1e-14);

  const ComplexMatrix big = random_gaussian(24, 24, rng);
  const std::vector<int> d234{2, 3, 4};
  const std::vector<int> keep02{0, 2};
  CHECK((partial_trace(big, d234, keep02) - oracle::partial_trace(big, d234, keep02)).norm() < 1e-13);
  CHECK(std::abs(partial_trace(big, d234, keep02).trace() - big.trace()) < 1e-12);

  const std::vector<int> bad{2, 2};
  CHECK_THROWS_AS(partial_trace(big, bad, keep0), Error);
}

TEST_CASE("partial trace of a product state") {
  Rng rng(6);
  const ComplexMatrix rho = random_gaussian(2, 2, rng);
  const ComplexMatrix r = rho + rho.adjoint();
  const std::vector<int> dims{2, 2, 2, 2};
  for (int k = 0; k < 4; ++k) {
    const std::vector<int> keep{k};
    const Complex tr = r.trace();
    CHECK((partial_trace(kron_power(r, 4), dims, keep) - r * tr * tr * tr).norm() < 1e-12 * std::pow(std::abs(tr), 3) + 1e-12);
  }
}

TEST_CASE("op_norm") {
  CHECK(op_norm(identity(5)) == doctest::Approx(1.0));
  CHECK(op_norm(diag({3, -5})) == doctest::Approx(5.0));
  Rng rng(7);
  const ComplexMatrix a = random_gaussian(6, 6, rng);
  CHECK(op_norm(a) == doctest::Approx(oracle::op_norm(a)).epsilon(1e-10));
}

TEST_CASE("eigh reconstruction") {
  Rng rng(8);
  const ComplexMatrix h = random_hermitian(7, rng);
  const HermitianSpectrum s = eigh(h);
  const ComplexMatrix& u = s.eigenvectors;
  CHECK((u * s.eigenvalues.cast<Complex>().asDiagonal() * u.adjoint() - h).norm() <= 1e-12 * h.norm() * 7);
  CHECK((u.adjoint() * u - identity(7)).norm() < 1e-12);
}

TEST_CASE("propagate") {
  Rng rng(9);
  const ComplexMatrix h = random_hermitian(4, rng), x = random_hermitian(4, rng);
  CHECK((propagate(h, 0.0, 1.0, x) - x).norm() < 1e-14);
  CHECK((propagate(identity(4), 3.7, 1.0, x) - x).norm() < 1e-12);
  const ComplexMatrix xt = propagate(h, 0.8, 1.3, x);
  CHECK((xt - oracle::heisenberg(h, 0.8, 1.3, x)).norm() < 1e-11);
  CHECK(op_norm(xt) == doctest::Approx(op_norm(x)).epsilon(1e-12));
  CHECK(std::abs(xt.trace() - x.trace()) < 1e-12);
  CHECK(hermiticity_error(xt) < 1e-12);
  CHECK((propagate(h, 0.3, 1.0, propagate(h, 0.5, 1.0, x)) - propagate(h, 0.8, 1.0, x)).norm() < 1e-10);

  ComplexMatrix bad = h;
  bad(0, 1) += 0.1;
  try {
    propagate(bad, 1.0, 1.0, x);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

}  // TEST_SUITE
