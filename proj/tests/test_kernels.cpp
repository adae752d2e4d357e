#include <doctest.h>

#include "mfl/kernels.hpp"
#include "mfl/random.hpp"
#include "oracles.hpp"

using namespace mfl;
namespace k = mfl::kernels;

TEST_SUITE("kernels") {

TEST_CASE("symmetrizer: parallel, reference and permutation sum agree") {
  for (int M = 1; M <= 4; ++M)
    for (int d = 2; d <= 3; ++d) {
      if (M == 4 && d == 3) continue;
      const ComplexMatrix brute = oracle::perm_projector(M, d);
      CHECK((k::symmetrizer(M, d) - brute).norm() < 1e-12);
      CHECK((k::reference::symmetrizer(M, d) - brute).norm() < 1e-12);
    }
}

TEST_CASE("symmetric_sandwich: parallel equals reference") {
  Rng rng(11);
  for (int M = 1; M <= 3; ++M) {
    const auto D = oracle::ipow(3, M);
    const ComplexMatrix x = random_gaussian(D, D, rng);
    CHECK((k::symmetric_sandwich(x, M, 3) - k::reference::symmetric_sandwich(x, M, 3)).norm() < 1e-12);
  }
}

TEST_CASE("permutation_average: parallel equals reference and keeps product-state traces") {
  Rng rng(12);
  for (int M = 1; M <= 3; ++M) {
    const auto D = oracle::ipow(3, M);
    const ComplexMatrix x = random_gaussian(D, D, rng);
    const ComplexMatrix avg = k::permutation_average(x, M, 3);
    CHECK((avg - k::reference::permutation_average(x, M, 3)).norm() < 1e-12);
    CHECK((k::permutation_average(avg, M, 3) - avg).norm() < 1e-12);
    const ComplexMatrix rho = random_density(3, rng);
    const ComplexMatrix power = oracle::kron_power(rho, M);
    CHECK(std::abs((avg * power).trace() - (x * power).trace()) < 1e-12);
  }
}

TEST_CASE("apply_on_slot: both sides, every slot") {
  Rng rng(12);
  const ComplexMatrix x = random_gaussian(8, 8, rng), op = random_gaussian(2, 2, rng);
  for (int slot = 0; slot < 3; ++slot) {
    const ComplexMatrix full = oracle::on_slot(op, slot, 3, 2);
    CHECK((k::apply_on_slot(x, op, slot, 3, k::Side::Left) - full * x).norm() < 1e-13);
    CHECK((k::apply_on_slot(x, op, slot, 3, k::Side::Right) - x * full).norm() < 1e-13);
    CHECK((k::reference::apply_on_slot(x, op, slot, 3, k::Side::Left) - full * x).norm() < 1e-13);
  }
}

TEST_CASE("symmetric_inclusion columns are the normalized symmetric tensors") {
  const OccupationBasis basis(3, 3);
  std::vector<std::vector<int>> occ;
  for (std::size_t i = 0; i < basis.size(); ++i) occ.emplace_back(basis.state(i).begin(), basis.state(i).end());
  CHECK((k::reference::symmetric_inclusion(basis) - oracle::symmetric_basis(occ, 3)).norm() < 1e-13);
}

TEST_CASE("normal_ordered: parallel equals reference") {
  Rng rng(13);
  for (int p = 1; p <= 2; ++p)
    for (int N = p; N <= 4; ++N) {
      const OccupationBasis basis(2, N);
      const auto D = oracle::ipow(2, p);
      const ComplexMatrix kernel = random_gaussian(D, D, rng);
      CHECK((k::normal_ordered(kernel, p, basis) - k::reference::normal_ordered(kernel, p, basis)).norm() < 1e-11);
    }
}

TEST_CASE("thread count does not change results") {
  Rng rng(14);
  const ComplexMatrix x = random_gaussian(16, 16, rng);
  const int saved = k::num_threads();
  k::set_num_threads(1);
  const ComplexMatrix one = k::symmetric_sandwich(x, 4, 2);
  k::set_num_threads(4);
  const ComplexMatrix four = k::symmetric_sandwich(x, 4, 2);
  k::set_num_threads(saved);
  CHECK((one - four).norm() == 0.0);
}

}  // TEST_SUITE
