#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mfl/bounds.hpp"
#include "mfl/experiments.hpp"
#include "mfl/hierarchy.hpp"
#include "mfl/nbody.hpp"
#include "mfl/poisson.hpp"
#include "mfl/random.hpp"

namespace mfl {

namespace {

struct Suite {
  std::vector<IdentityResult> results;

  // Runs `body`, which returns the worst residual; any exception is a failure
  // recorded with its message.
  void check(const std::string& name, double tolerance, const std::function<double()>& body) {
    IdentityResult r{name, false, 0.0, tolerance, ""};
    try {
      r.residual = body();
      r.passed = std::isfinite(r.residual) && r.residual <= tolerance;
      if (!std::isfinite(r.residual)) {
        r.detail = "non-finite residual";
        r.residual = -1.0;
      }
    } catch (const std::exception& e) {
      r.detail = e.what();
      r.residual = -1.0;
    }
    results.push_back(std::move(r));
  }
};

ComplexMatrix pure_state(int d, Rng& rng) {
  const ComplexVector psi = random_unit_vector(d, rng);
  return psi * psi.adjoint();
}

InteractionModel random_model(int d, Rng& rng, double v_norm = 1.0) {
  ComplexMatrix v = random_swap_symmetric(d, rng);
  v *= v_norm / op_norm(v);
  return InteractionModel(random_hermitian(d, rng), v, 1.0);
}

}  // namespace

VerifyReport run_verify_identities(const ModelConfig& config, const RunOptions& options) {
  (void)options;
  set_element_cap(config.element_cap);
  Rng root(config.seed);
  Suite suite;

  suite.check("commutator_split", 1e-10, [&] {
    Rng rng = root.fork(101);
    double worst = 0.0;
    for (int p = 1; p <= 2; ++p)
      for (int N = p; N <= 4; ++N) {
        const InteractionModel m = random_model(2, rng);
        const PObservable a(random_symmetric_kernel(2, p, rng), 2);
        worst = std::max(worst, commutator_decomposition_check(m, a, rng.uniform(), N));
      }
    return worst;
  });

  suite.check("tree_bracket_duality", 1e-10, [&] {
    Rng rng = root.fork(102);
    const InteractionModel m = random_model(2, rng);
    double worst = 0.0;
    for (int p = 1; p <= 2; ++p) {
      const PObservable a(random_symmetric_kernel(2, p, rng), 2);
      const double r = rng.uniform();
      const PObservable x = tree_apply(TreeInsertion(m, p), a, r);
      const PObservable vc(0.5 * free_pair_potential(m, r), 2);
      for (int k = 0; k < 50; ++k) {
        const ComplexMatrix rho = random_density(2, rng);
        worst = std::max(worst, std::abs(eval(x, rho) - bracket_eval(vc, a, rho, m.hbar())));
      }
    }
    return worst;
  });

  suite.check("tree_chain", 1e-9, [&] {
    Rng rng = root.fork(103);
    const InteractionModel m = random_model(2, rng);
    double worst = 0.0;
    for (int n = 0; n <= 2; ++n)
      for (int N = 3; N <= 4; ++N) {
        const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
        const DensityMatrix rho(pure_state(2, rng));
        const double t = 0.1 * rng.uniform();
        std::vector<double> times;
        for (int i = 0; i < n; ++i) times.push_back(t * rng.uniform());
        std::sort(times.rbegin(), times.rend());
        worst = std::max(worst, multit_coefficient_check(m, a, t, times, N, rho));
      }
    return worst;
  });

  suite.check("jacobi", 1e-10, [&] {
    Rng rng = root.fork(104);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 2 + (trial / 8) % 2;
      const int p = 1 + trial % 2, q = 1 + (trial / 2) % 2, r = 1 + (trial / 4) % 2;
      const PObservable a(random_symmetric_kernel(d, p, rng), d);
      const PObservable b(random_symmetric_kernel(d, q, rng), d);
      const PObservable c(random_symmetric_kernel(d, r, rng), d);
      const PObservable ab_c = bracket_kernel(bracket_kernel(a, b, 1.0), c, 1.0);
      const PObservable ca_b = bracket_kernel(bracket_kernel(c, a, 1.0), b, 1.0);
      const PObservable bc_a = bracket_kernel(bracket_kernel(b, c, 1.0), a, 1.0);
      for (int k = 0; k < 3; ++k) {
        const ComplexMatrix rho = random_density(d, rng);
        worst = std::max(worst, std::abs(eval(ab_c, rho) + eval(ca_b, rho) + eval(bc_a, rho)));
      }
    }
    return worst;
  });

  suite.check("poisson_rank_one", 1e-10, [&] {
    Rng rng = root.fork(105);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 2 + trial % 2;
      const PObservable a(random_symmetric_kernel(d, 1 + trial % 2, rng), d);
      const PObservable b(random_symmetric_kernel(d, 1 + (trial / 2) % 2, rng), d);
      const auto [x, y] = rank_one_reduction_check(a, b, random_unit_vector(d, rng), 1.0);
      worst = std::max(worst, std::abs(x - y));
    }
    return worst;
  });

  suite.check("falling_factorial_exact", 0.0, [&] {
    int failures = 0;
    for (int N = 1; N <= 60; ++N)
      for (int p = 1; p <= N; ++p) {
        const FallingFactorialIdentity c = falling_factorial_identities(N, p);
        if (c.lhs != c.rhs) ++failures;
      }
    return static_cast<double>(failures);
  });

  suite.check("coefficient_sum_exact", 0.0, [&] {
    int failures = 0;
    for (int p = 1; p <= 20; ++p)
      for (int M = 0; M <= 60; M += 5)
        if (series_identity_2p(p, M).limit != Rational(2 * p)) ++failures;
    return static_cast<double>(failures);
  });

  suite.check("coefficient_tail_exact", 0.0, [&] {
    int failures = 0;
    for (int N = 1; N <= 60; ++N)
      for (int p = 1; p <= N; ++p) {
        const FallingFactorialIdentity c = falling_factorial_identities(N, p);
        if (c.lhs > c.bound) ++failures;
      }
    return static_cast<double>(failures);
  });

  suite.check("s_pN_exact", 0.0, [&] {
    int failures = 0;
    for (int N = 1; N <= 60; ++N)
      for (int p = 1; p <= N; ++p)
        if (s_pN(p, N) > Rational(boost::multiprecision::cpp_int(1) << p) * Rational(p + 1, N)) ++failures;
    return static_cast<double>(failures);
  });

  // Norm estimates report max(lhs/rhs) - 1, which must not be positive.
  suite.check("tree_norm", 1e-12, [&] {
    Rng rng = root.fork(106);
    double worst = -1.0;
    for (int k = 0; k < 100; ++k) {
      const int p = 1 + k % 2;
      const InteractionModel m = random_model(2, rng, 0.5 + rng.uniform());
      const PObservable a(random_symmetric_kernel(2, p, rng), 2);
      const double lhs = tree_apply(TreeInsertion(m, p), a, rng.uniform()).norm();
      const double rhs = 2.0 * m.v_inf() / m.hbar() * p * a.norm();
      worst = std::max(worst, lhs / rhs - 1.0);
    }
    return std::max(worst, 0.0);
  });

  suite.check("loop_norm", 1e-12, [&] {
    Rng rng = root.fork(107);
    double worst = -1.0;
    for (int k = 0; k < 100; ++k) {
      const int p = 2 + k % 2;
      const int N = p + static_cast<int>(rng.uniform() * 10);
      const InteractionModel m = random_model(2, rng, 0.5 + rng.uniform());
      const PObservable a(random_symmetric_kernel(2, p, rng), 2);
      const double lhs = loop_apply(LoopInsertion(m, p, N), a, rng.uniform()).norm();
      const double rhs = m.v_inf() / m.hbar() * p * (p - 1.0) / N * a.norm();
      worst = std::max(worst, lhs / rhs - 1.0);
    }
    return std::max(worst, 0.0);
  });

  suite.check("dyson_term_norm", 1e-12, [&] {
    Rng rng = root.fork(108);
    const InteractionModel m = random_model(2, rng);
    const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
    const double tu = tau(m.hbar(), m.v_inf());
    double worst = -1.0;
    for (double frac : {0.5, 1.0}) {
      const DysonCascade cascade = dyson_terms(a, frac * tu, 6, m);
      for (int k = 0; k < 100; ++k) {
        const ComplexMatrix rho = random_density(2, rng);
        for (int n = 0; n <= 6; ++n) {
          const double bound = dyson_term_bound(frac * tu, tu, n, 1, a.norm());
          worst = std::max(worst, std::abs(cascade.classical_term(n, rho)) / bound - 1.0);
        }
      }
    }
    return std::max(worst, 0.0);
  });

  suite.check("hierarchy_gap", 1e-12, [&] {
    Rng rng = root.fork(109);
    const InteractionModel m = random_model(2, rng);
    const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
    const DensityMatrix rho(pure_state(2, rng));
    const double tu = tau(m.hbar(), m.v_inf());
    double worst = -1.0;
    for (int N : {4, 8}) {
      const NBodyHamiltonian H = NBodyHamiltonian::for_state(m.h(), m.v(), m.hbar(), N, rho);
      for (double frac : {0.5, 1.0}) {
        const double t = frac * tu;
        const DysonCascade cascade = dyson_terms(a, t, N - 1, m);
        const double diff = std::abs(heisenberg_expectation(a, rho, H, t) - gammaH_expectation(cascade, rho, N));
        const double bound = hierarchy_gap_bound({m.hbar(), m.v_inf(), 1, N, t}, a.norm());
        worst = std::max(worst, diff / bound - 1.0);
      }
    }
    return std::max(worst, 0.0);
  });

  suite.check("small_time", 1e-12, [&] {
    Rng rng = root.fork(110);
    const InteractionModel m = random_model(2, rng);
    const PObservable a(random_symmetric_kernel(2, 1, rng), 2);
    const DensityMatrix rho(pure_state(2, rng));
    const double tu = tau(m.hbar(), m.v_inf());
    double worst = -1.0;
    for (int N : {8, 16}) {
      const NBodyHamiltonian H = NBodyHamiltonian::for_state(m.h(), m.v(), m.hbar(), N, rho);
      for (double frac : {0.25, 0.5, 1.0}) {
        const double t = frac * tu;
        const double diff = std::abs(heisenberg_expectation(a, rho, H, t) - eval(a, evolve_hartree(m, rho, t)));
        const double bound = small_time_bound({m.hbar(), m.v_inf(), 1, N, t}, a.norm());
        worst = std::max(worst, diff / bound - 1.0);
      }
    }
    return std::max(worst, 0.0);
  });

  suite.check("hartree_conservation", 1e-8, [&] {
    Rng rng = root.fork(111);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
      const int d = 2 + k % 3;
      const InteractionModel m(random_hermitian(d, rng), random_swap_symmetric(d, rng), 1.0);
      const DensityMatrix rho0(random_density(d, rng));
      const DensityMatrix rho1 = evolve_hartree(m, rho0, 1.0);
      const double e0 = energy(m, rho0);
      worst = std::max(worst, std::abs(rho1.trace() - rho0.trace()));
      worst = std::max(worst, std::abs(energy(m, rho1) - e0) / std::max(1.0, std::abs(e0)));
    }
    return worst;
  });

  suite.check("rk4_vs_picard", 1e-6, [&] {
    Rng rng = root.fork(112);
    const InteractionModel m = random_model(2, rng);
    const DensityMatrix rho0(random_density(2, rng));
    const double t = 1.0 / (4.0 * m.v_inf());
    const DensityMatrix a = evolve_hartree(m, rho0, t, HartreeMethod::RK4);
    const DensityMatrix b = evolve_hartree(m, rho0, t, HartreeMethod::Picard);
    return trace_norm(a.matrix() - b.matrix());
  });

  // A SWAP-asymmetric V must be rejected by the model constructor.
  suite.check("corrupted_v_rejected", 0.0, [&] {
    Rng rng = root.fork(113);
    ComplexMatrix v = random_hermitian(4, rng);
    v = hermitian_part(v + swap_operator(2) * v * swap_operator(2));
    v(0, 1) += 0.5;
    v(1, 0) += 0.5;
    try {
      InteractionModel(random_hermitian(2, rng), v, 1.0);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotSwapSymmetric) return 0.0;
      throw;
    }
    throw Error(ErrorKind::BoundViolation, "non-swap-symmetric V was accepted");
  });
  suite.results.back().detail = suite.results.back().passed ? "NotSwapSymmetric" : suite.results.back().detail;

  return VerifyReport{config.seed, std::move(suite.results)};
}

}  // namespace mfl
