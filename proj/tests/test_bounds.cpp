#include <doctest.h>

#include <cmath>

#include "mfl/bounds.hpp"
#include "mfl/errors.hpp"

using namespace mfl;

namespace {

Rational pow2(int n) { return Rational(boost::multiprecision::cpp_int(1) << n); }

// Both falling-factorial sums, with the factorial computed on the spot.
std::pair<Rational, Rational> falling_factorial_sums(int N, int p) {
  Rational lhs = 1, rhs = 0;
  for (int n = 0; n <= N - p; ++n) {
    Rational c = 1;
    for (int j = 0; j < n; ++j) c = c * (N - p - j) / N;
    c /= pow2(n);
    if (n > 0) lhs -= c;
    rhs += c * Rational(p + n, N);
  }
  return {lhs, rhs};
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("tau") {
  CHECK(tau(1.0, 1.0) == doctest::Approx(0.125));
  CHECK(tau(2.0, 0.5) == doctest::Approx(0.5));
  CHECK(tau(3.0, 1.5) == doctest::Approx(tau(2.0, 1.0)));
  try {
    tau(1.0, 0.0);
    FAIL("expected FreeTheory");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FreeTheory);
  }
}

TEST_CASE("gamma") {
  const double tu = 0.125;
  CHECK(gamma(0.0, tu) == doctest::Approx(0.091970).epsilon(1e-5));
  CHECK(gamma(0.9 * tu, tu) == doctest::Approx(1.0 / (4.0 * M_E)));
  CHECK(gamma(tu, tu) == doctest::Approx(0.045985).epsilon(1e-5));
  CHECK(gamma(1.99 * tu, tu) == doctest::Approx(1.0 / (8.0 * M_E)));
  CHECK(gamma(2.0 * tu, tu) == doctest::Approx(1.0 / (24.0 * M_E)));
  double prev = 1.0;
  for (int k = 0; k < 100; ++k) {
    const double g = gamma(0.05 * k * tu, tu);
    CHECK(g <= prev);
    prev = g;
  }
  // t/τ exactly 3 in floating point terms, whatever 3·0.1/0.1 rounds to
  CHECK(elapsed_steps(0.3, 0.1) == 3);
}

TEST_CASE("mean_field_bound") {
  const BoundParams at16{1.0, 1.0, 1, 16, 0.0};
  CHECK(mean_field_bound(at16, 1.0, BoundForm::Coarse) == doctest::Approx(4.0 * std::pow(16.0, -1.0 / (4 * M_E))));
  CHECK(mean_field_bound(at16, 1.0, BoundForm::Coarse) == doctest::Approx(3.0995).epsilon(1e-4));
  CHECK(mean_field_bound(at16, 1.0, BoundForm::Fine) == doctest::Approx(2.0498).epsilon(1e-4));
  for (int p = 1; p <= 3; ++p)
    for (double tt : {0.0, 0.5, 1.0, 2.5, 4.0})
      for (int N : {2, 4, 16, 100, 10000, 1000000}) {
        const BoundParams bp{1.0, 1.0, p, N, tt * 0.125};
        CHECK(mean_field_bound(bp, 1.0, BoundForm::Fine) <= mean_field_bound(bp, 1.0, BoundForm::Coarse));
      }
  double prev = 1e300;
  for (int N = 1; N <= 1 << 20; N *= 2) {
    const double b = mean_field_bound({1.0, 1.0, 1, N, 0.3}, 2.0, BoundForm::Coarse);
    CHECK(b < prev);
    prev = b;
  }
  CHECK_THROWS_AS(mean_field_bound({1.0, 0.0, 1, 4, 0.1}, 1.0, BoundForm::Coarse), Error);
}

TEST_CASE("small_time_bound") {
  CHECK(small_time_bound({1.0, 1.0, 1, 8, 0.0}, 1.0) == 0.0);
  CHECK(small_time_bound({1.0, 1.0, 1, 8, 0.125}, 1.0) == doctest::Approx(1.0));
  CHECK(small_time_bound({1.0, 1.0, 2, 64, 0.0625}, 1.0) == doctest::Approx(0.1875));
  try {
    small_time_bound({1.0, 1.0, 1, 8, 0.2}, 1.0);
    FAIL("expected TOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TOutOfRange);
  }
}

TEST_CASE("hierarchy gap and Dyson term bounds") {
  CHECK(hierarchy_gap_bound({1.0, 1.0, 1, 4, 0.125}, 1.0) == doctest::Approx(0.5 / 4));
  CHECK(hierarchy_gap_bound({1.0, 1.0, 3, 8, 0.0625}, 2.0) == doctest::Approx(2.0 * 3.0 / 8 * 0.5 * 2.0));
  CHECK(dyson_term_bound(0.0625, 0.125, 0, 1, 1.0) == doctest::Approx(1.0));
  CHECK(dyson_term_bound(0.0625, 0.125, 3, 2, 1.0) == doctest::Approx(std::pow(0.25, 3) * 2.0));
}

TEST_CASE("induction constants") {
  const int N = 1000;
  const double L0 = std::log2(N) / (4.0 * M_E);
  for (int p = 1; p <= 3; ++p) {
    const InductionConstants c1 = induction_constants(N, p, 1);
    CHECK(c1.L[1] == doctest::Approx(L0));
    CHECK(c1.R == doctest::Approx(std::exp2(p) * (std::exp2(L0) * p / N + std::exp2(-L0))));
  }
  for (int k = 1; k <= 30; ++k) CHECK(induction_constants(N, 1, k).weighted_sum <= 2.0 * M_E * L0 * (1 + 1e-12));
  // L_{k+1} = L_0/k!, so 2^{-L_{k+1}} = N^{-γ} when k - 1 = ⌊t/τ⌋
  for (int k = 1; k <= 5; ++k) {
    const InductionConstants c = induction_constants(N, 2, k + 1);
    const double g = gamma((k - 1) * 0.125 + 0.01, 0.125);
    CHECK(std::exp2(-c.L[k + 1]) == doctest::Approx(std::pow(static_cast<double>(N), -g)));
  }
  CHECK_THROWS_AS(induction_constants(1, 1, 1), Error);
}

TEST_CASE("series identity") {
  CHECK(series_identity_2p(1, 10).limit == 2);
  CHECK(series_identity_2p(3, 0).limit == 6);
  for (int p = 1; p <= 20; ++p)
    for (int M = 0; M <= 60; ++M) {
      const SeriesIdentity s = series_identity_2p(p, M);
      CHECK(s.partial + s.tail == Rational(2 * p));
      CHECK(s.limit == Rational(2 * p));
    }
}

TEST_CASE("falling-factorial identities in exact arithmetic") {
  const FallingFactorialIdentity deg = falling_factorial_identities(5, 5);
  CHECK(deg.lhs == 1);
  CHECK(deg.rhs == 1);
  CHECK(deg.lhs <= deg.bound);

  const FallingFactorialIdentity c41 = falling_factorial_identities(4, 1);
  CHECK(c41.lhs == c41.rhs);
  const FallingFactorialIdentity c603 = falling_factorial_identities(60, 3);
  CHECK(c603.lhs <= Rational(2, 15));

  for (int N = 1; N <= 60; ++N)
    for (int p = 1; p <= N; ++p) {
      const FallingFactorialIdentity c = falling_factorial_identities(N, p);
      const auto [lhs, rhs] = falling_factorial_sums(N, p);
      CHECK(c.lhs == lhs);
      CHECK(c.rhs == rhs);
      CHECK(lhs == rhs);
      CHECK(lhs <= Rational(2 * (p + 1), N));
      CHECK(s_pN(p, N) == lhs * pow2(p - 1));
      CHECK(s_pN(p, N) <= pow2(p) * Rational(p + 1, N));
    }
  try {
    falling_factorial_identities(3, 4);
    FAIL("expected BadArity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadArity);
  }
  CHECK(tree_coefficient_exact(10, 2, 3) == Rational(8 * 7 * 6, 1000));
}

}  // TEST_SUITE
