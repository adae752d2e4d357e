#include <doctest.h>

#include "mfl/bounds.hpp"
#include "mfl/hierarchy.hpp"
#include "mfl/nbody.hpp"
#include "mfl/poisson.hpp"
#include "mfl/random.hpp"
#include "oracles.hpp"

using namespace mfl;

namespace {

InteractionModel random_model(int d, Rng& rng, double v_norm = 1.0) {
  ComplexMatrix v = random_swap_symmetric(d, rng);
  v *= v_norm / op_norm(v);
  return InteractionModel(random_hermitian(d, rng), v, 1.0);
}

ComplexMatrix pure(Rng& rng, int d) {
  const ComplexVector psi = random_unit_vector(d, rng);
  return psi * psi.adjoint();
}

ComplexMatrix h_sum(const ComplexMatrix& h, int p) {
  const int d = static_cast<int>(h.rows());
  ComplexMatrix out = ComplexMatrix::Zero(oracle::ipow(d, p), oracle::ipow(d, p));
  for (int i = 0; i < p; ++i) out += oracle::on_slot(h, i, p, d);
  return out;
}

// p (i/ħ)[I^{p-1} ⊗ V_r, a ⊗ I] with V_r by matrix exponential, before any symmetrization.
ComplexMatrix raw_tree(const InteractionModel& m, const ComplexMatrix& a, int p, double r) {
  const int d = m.modes();
  const ComplexMatrix vr = oracle::heisenberg(h_sum(m.h(), 2), r, m.hbar(), m.v());
  const ComplexMatrix big = oracle::kron(oracle::eye(oracle::ipow(d, p - 1)), vr);
  const ComplexMatrix lifted = oracle::kron(a, oracle::eye(d));
  return Complex(0.0, p / m.hbar()) * (big * lifted - lifted * big);
}

// Dense X_{p,r}(a) = p P_S (i/ħ)[I^{p-1} ⊗ V_r, a ⊗ I] P_S.
ComplexMatrix dense_tree(const InteractionModel& m, const ComplexMatrix& a, int p, double r) {
  const ComplexMatrix P = oracle::perm_projector(p + 1, m.modes());
  return P * raw_tree(m, a, p, r) * P;
}

ComplexMatrix raw_loop(const InteractionModel& m, const ComplexMatrix& a, int p, int N, double r) {
  const int d = m.modes();
  const ComplexMatrix vr = oracle::heisenberg(h_sum(m.h(), 2), r, m.hbar(), m.v());
  const ComplexMatrix big = oracle::kron(oracle::eye(oracle::ipow(d, p - 2)), vr);
  const double c = p * (p - 1.0) / (2.0 * N);
  return Complex(0.0, c / m.hbar()) * (big * a - a * big);
}

// c_1, c_2 by nested Gauss-Legendre over the simplex 0 < t_2 < t_1 < t.
std::pair<ComplexMatrix, ComplexMatrix> quadrature_terms(const InteractionModel& m, const ComplexMatrix& a, int p,
                                                          double t) {
  const ComplexMatrix at = oracle::heisenberg(h_sum(m.h(), p), t, m.hbar(), a);
  const ComplexMatrix c1 = oracle::integrate([&](double t1) { return dense_tree(m, at, p, t1); }, 0.0, t);
  const ComplexMatrix c2 = oracle::integrate(
      [&](double t1) {
        const ComplexMatrix x1 = dense_tree(m, at, p, t1);
        return oracle::integrate([&](double t2) { return dense_tree(m, x1, p + 1, t2); }, 0.0, t1);
      },
      0.0, t);
  return {c1, c2};
}

}  // namespace

TEST_SUITE("hierarchy") {

TEST_CASE("free pair potential and free evolution") {
  Rng rng(61);
  const InteractionModel m = random_model(2, rng);
  const ComplexMatrix expected = oracle::heisenberg(h_sum(m.h(), 2), 0.37, 1.0, m.v());
  CHECK((free_pair_potential(m, 0.37) - expected).norm() < 1e-12);
  const PObservable a(random_symmetric_kernel(2, 2, rng), 2);
  CHECK((free_evolved(m, a, 0.5).kernel() - oracle::heisenberg(h_sum(m.h(), 2), 0.5, 1.0, a.kernel())).norm() < 1e-12);
  CHECK((free_hamiltonian(m.h(), 3) - h_sum(m.h(), 3)).norm() < 1e-14);
}

TEST_CASE("tree_apply") {
  Rng rng(62);
  const InteractionModel m = random_model(2, rng);
  for (int p = 1; p <= 2; ++p) {
    const PObservable a(random_symmetric_kernel(2, p, rng), 2);
    for (double r : {0.0, 0.45}) {
      const PObservable x = tree_apply(TreeInsertion(m, p), a, r);
      CHECK(x.arity() == p + 1);
      CHECK((x.kernel() - oracle::perm_average(raw_tree(m, a.kernel(), p, r), p + 1, 2)).norm() < 1e-12);
      // same operator as the P_S-sandwiched form once restricted to the bosonic space
      const ComplexMatrix P = oracle::perm_projector(p + 1, 2);
      CHECK((P * x.kernel() * P - dense_tree(m, a.kernel(), p, r)).norm() < 1e-12);
    }
  }
  const InteractionModel scalar(random_hermitian(2, rng), 0.8 * identity(4), 1.0);
  const PObservable a(random_symmetric_kernel(2, 2, rng), 2);
  CHECK(tree_apply(TreeInsertion(scalar, 2), a, 0.3).kernel().norm() < 1e-13);
  CHECK_THROWS_AS(tree_apply(TreeInsertion(m, 1), a, 0.0), Error);

  for (int k = 0; k < 100; ++k) {
    const int p = 1 + k % 2;
    const InteractionModel mk = random_model(2, rng, 0.5 + rng.uniform());
    const PObservable ak(random_symmetric_kernel(2, p, rng), 2);
    CHECK(tree_apply(TreeInsertion(mk, p), ak, rng.uniform()).norm() <= 2.0 * mk.v_inf() * p * ak.norm() * (1 + 1e-12));
  }
}

TEST_CASE("loop_apply") {
  Rng rng(63);
  const InteractionModel m = random_model(2, rng);
  const PObservable a1(random_symmetric_kernel(2, 1, rng), 2);
  CHECK(loop_apply(LoopInsertion(m, 1, 5), a1, 0.2).kernel().norm() == 0.0);
  for (int p = 2; p <= 3; ++p) {
    const PObservable a(random_symmetric_kernel(2, p, rng), 2);
    const ComplexMatrix y = loop_apply(LoopInsertion(m, p, 7), a, 0.3).kernel();
    const ComplexMatrix raw = raw_loop(m, a.kernel(), p, 7, 0.3);
    CHECK((y - oracle::perm_average(raw, p, 2)).norm() < 1e-12);
    const ComplexMatrix P = oracle::perm_projector(p, 2);
    CHECK((P * y * P - P * raw * P).norm() < 1e-12);
  }
  const InteractionModel scalar(random_hermitian(2, rng), 0.8 * identity(4), 1.0);
  CHECK(loop_apply(LoopInsertion(scalar, 2, 4), PObservable(random_symmetric_kernel(2, 2, rng), 2), 0.3).kernel().norm() < 1e-13);
  for (int k = 0; k < 100; ++k) {
    const int p = 2 + k % 2;
    const int N = p + k % 7;
    const InteractionModel mk = random_model(2, rng, 0.5 + rng.uniform());
    const PObservable ak(random_symmetric_kernel(2, p, rng), 2);
    CHECK(loop_apply(LoopInsertion(mk, p, N), ak, rng.uniform()).norm() <= mk.v_inf() * p * (p - 1.0) / N * ak.norm() * (1 + 1e-12));
  }
}

TEST_CASE("commutator decomposition") {
  Rng rng(64);
  const InteractionModel free(random_hermitian(2, rng), ComplexMatrix::Zero(4, 4), 1.0);
  CHECK(commutator_decomposition_check(free, PObservable(random_symmetric_kernel(2, 1, rng), 2), 0.0, 3) == 0.0);
  const InteractionModel m = random_model(2, rng);
  CHECK(commutator_decomposition_check(m, PObservable(random_symmetric_kernel(2, 1, rng), 2), 0.0, 3) <= 1e-10);
  CHECK(commutator_decomposition_check(m, PObservable(random_symmetric_kernel(2, 2, rng), 2), 0.3, 3) <= 1e-10);
  for (int N = 2; N <= 4; ++N)
    CHECK(commutator_decomposition_check(m, PObservable(random_symmetric_kernel(2, 2, rng), 2), 0.1 * N, N) <= 1e-10);
}

TEST_CASE("tree insertion equals the bracket with the free-evolved potential") {
  Rng rng(65);
  const InteractionModel m = random_model(3, rng);
  for (int p = 1; p <= 2; ++p) {
    const PObservable a(random_symmetric_kernel(3, p, rng), 3);
    const double t = 0.25;
    const PObservable x = tree_apply(TreeInsertion(m, p), a, t);
    const PObservable vc(0.5 * free_pair_potential(m, t), 3);
    // the kernel construction must reproduce X itself, not only its values
    CHECK((bracket_kernel(vc, a, m.hbar()).kernel() - x.kernel()).norm() < 1e-11);
    for (int k = 0; k < 50; ++k) {
      const ComplexMatrix rho = random_density(3, rng);
      CHECK(std::abs(eval(x, rho) - bracket_eval(vc, a, rho, m.hbar())) <= 1e-10);
    }
  }
}

TEST_CASE("tree_chain") {
  Rng rng(66);
  const InteractionModel m = random_model(2, rng);
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  const DensityMatrix rho(pure(rng, 2));
  CHECK(multit_coefficient_check(m, a, 0.1, {}, 3, rho) <= 1e-12);
  CHECK(multit_coefficient_check(m, a, 0.1, {0.05}, 3, rho) <= 1e-9);
  CHECK(multit_coefficient_check(m, a, 0.1, {0.07, 0.02}, 4, rho) <= 1e-9);
  const PObservable a2(random_symmetric_kernel(2, 2, rng), 2);
  CHECK(multit_coefficient_check(m, a2, 0.2, {0.1, 0.15}, 4, rho) <= 1e-9);
}

TEST_CASE("tree coefficients") {
  CHECK(tree_coefficient(10, 3, 0) == 1.0);
  CHECK(tree_coefficient(10, 3, 2) == doctest::Approx(7.0 / 10 * 6.0 / 10));
  for (int N = 1; N <= 12; ++N)
    for (int p = 1; p <= N; ++p) {
      CHECK(tree_coefficient(N, p, N - p + 1) == 0.0);
      CHECK(tree_coefficient(N, p, N - p) == doctest::Approx(tree_coefficient_exact(N, p, N - p).convert_to<double>()));
    }
}

TEST_CASE("Dyson cascade against nested quadrature") {
  Rng rng(67);
  const InteractionModel m = random_model(2, rng);
  for (int p = 1; p <= 2; ++p) {
    const PObservable a(random_symmetric_kernel(2, p, rng), 2);
    const double t = 0.1;
    const DysonCascade c = dyson_terms(a, t, 2, m);
    CHECK(c.depth() == 2);
    CHECK(c.base_arity() == p);
    const auto [q1, q2] = quadrature_terms(m, a.kernel(), p, t);
    CHECK((c.term(0).kernel() - oracle::heisenberg(h_sum(m.h(), p), t, 1.0, a.kernel())).norm() < 1e-10);
    CHECK(op_norm(c.term(1).kernel() - q1) < 1e-6);
    CHECK(op_norm(c.term(2).kernel() - q2) < 1e-6);
    for (int n = 0; n <= 2; ++n) {
      const ComplexMatrix P = oracle::perm_projector(p + n, 2);
      CHECK((P * c.term(n).kernel() * P - c.term(n).kernel()).norm() < 1e-12);
    }
  }
}

TEST_CASE("Dyson cascade: small-t slope and free theory") {
  Rng rng(68);
  const InteractionModel m = random_model(2, rng);
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  const ComplexMatrix x0 = dense_tree(m, a.kernel(), 1, 0.0);
  // c(t)/t = X_{p,0}(a) + O(t); Richardson 2 c(t/2)/(t/2) - c(t)/t leaves O(t²)
  auto richardson_error = [&](double t) {
    const ComplexMatrix c_t = dyson_terms(a, t, 1, m).term(1).kernel();
    const ComplexMatrix c_h = dyson_terms(a, t / 2, 1, m).term(1).kernel();
    return op_norm(2.0 * c_h / (t / 2) - c_t / t - x0);
  };
  const double e1 = richardson_error(0.02), e2 = richardson_error(0.01), e3 = richardson_error(0.005);
  CHECK(e1 / e2 > 3.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e3 < 1e-4 * op_norm(x0));
  const double t = 0.02;
  const ComplexMatrix c_t = dyson_terms(a, t, 1, m).term(1).kernel();
  CHECK(op_norm(c_t / t - x0) < 0.1 * op_norm(x0));

  const InteractionModel free(m.h(), ComplexMatrix::Zero(4, 4), 1.0);
  const DysonCascade fc = dyson_terms(a, 0.8, 3, free);
  CHECK((fc.term(0).kernel() - oracle::heisenberg(m.h(), 0.8, 1.0, a.kernel())).norm() < 1e-10);
  for (int n = 1; n <= 3; ++n) CHECK(fc.term(n).kernel().norm() == 0.0);
}

TEST_CASE("classical Dyson sum reproduces the Hartree flow") {
  Rng rng(69);
  const InteractionModel m = random_model(2, rng);
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  const ComplexMatrix r = random_density(2, rng);
  const DensityMatrix rho(r);
  const double tu = tau(m.hbar(), m.v_inf());
  const DysonCascade c0 = dyson_terms(a, 0.0, 3, m);
  CHECK(std::abs(classical_dyson_expectation(c0, rho) - eval(a, rho)) < 1e-13);
  // the cascade lives on the bosonic space, where ρ^{⊗k} only fits when ρ is pure
  const DysonCascade c = dyson_terms(a, tu / 2, 12, m);
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix psi(pure(rng, 2));
    CHECK(std::abs(classical_dyson_expectation(c, psi) - eval(a, evolve_hartree(m, psi, tu / 2))) < 1e-6);
  }
  for (int n = 0; n <= 6; ++n)
    for (int k = 0; k < 100; ++k) {
      const ComplexMatrix s = random_density(2, rng);
      CHECK(std::abs(c.classical_term(n, s)) <= dyson_term_bound(tu / 2, tu, n, 1, a.norm()) * (1 + 1e-12));
    }
}

TEST_CASE("gammaH expectation") {
  Rng rng(70);
  const InteractionModel m = random_model(2, rng);
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  const ComplexMatrix r = pure(rng, 2);
  const DensityMatrix rho(r);
  const double tu = tau(m.hbar(), m.v_inf());

  const DysonCascade c0 = dyson_terms(a, tu / 2, 0, m);
  CHECK(std::abs(gammaH_expectation(c0, rho, 5) - eval(c0.term(0), rho)) < 1e-13);

  // N = 3, p = 1: Σ_n coefficient · Tr(φ_{1+n}(c_n) ρ^{⊗3}), c_n by quadrature
  const double t = tu / 2;
  const auto [q1, q2] = quadrature_terms(m, a.kernel(), 1, t);
  const ComplexMatrix q0 = oracle::heisenberg(m.h(), t, 1.0, a.kernel());
  const ComplexMatrix state = oracle::kron_power(r, 3);
  const ComplexMatrix P = oracle::perm_projector(3, 2);
  auto phi = [&](const ComplexMatrix& k, int q) -> ComplexMatrix {
    return P * oracle::kron(k, oracle::eye(oracle::ipow(2, 3 - q))) * P;
  };
  const Complex dense = (phi(q0, 1) * state).trace() + (2.0 / 3.0) * (phi(q1, 2) * state).trace() +
                        (2.0 / 9.0) * (phi(q2, 3) * state).trace();
  const DysonCascade c = dyson_terms(a, t, 5, m);
  CHECK(std::abs(gammaH_expectation(c, rho, 3) - dense) < 1e-6);

  // large-N coefficients tend to one
  CHECK(std::abs(gammaH_expectation(c, rho, 1000000) - classical_dyson_expectation(c, rho)) < 1e-4);
}

TEST_CASE("hierarchy gap at brute-force scale") {
  Rng rng(71);
  const InteractionModel m = random_model(2, rng);
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  const DensityMatrix rho(pure(rng, 2));
  const double tu = tau(m.hbar(), m.v_inf());
  for (int N : {3, 4}) {
    const NBodyHamiltonian H = NBodyHamiltonian::for_state(m.h(), m.v(), m.hbar(), N, rho);
    for (double t : {tu / 2, tu}) {
      const DysonCascade c = dyson_terms(a, t, N - 1, m);
      const double diff = std::abs(heisenberg_expectation(a, rho, H, t) - gammaH_expectation(c, rho, N));
      CHECK(diff <= hierarchy_gap_bound({m.hbar(), m.v_inf(), 1, N, t}, a.norm()));
    }
  }
}

TEST_CASE("truncation and caps") {
  Rng rng(72);
  const InteractionModel m = random_model(2, rng);
  const double tu = tau(m.hbar(), m.v_inf());
  const int L = default_truncation(m, 1, tu / 2);
  CHECK(std::pow(0.25, L + 1) <= 1e-8);
  CHECK(std::pow(0.25, L) > 1e-8);
  try {
    default_truncation(m, 1, 2.0 * tu);
    FAIL("expected ArityCapExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArityCapExceeded);
  }
  const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
  CascadeOptions opts;
  opts.max_arity = 4;
  try {
    dyson_terms(a, 0.1, 5, m, opts);
    FAIL("expected ArityCapExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArityCapExceeded);
  }
  CHECK(arity_cap(2, 40) == 40);
}

}  // TEST_SUITE
