#include "mfl/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfl/errors.hpp"

namespace mfl {

double tau(double hbar, double v_inf) {
  if (v_inf == 0.0) throw Error(ErrorKind::FreeTheory, "tau: ‖v‖ = 0, the theory is free");
  if (!(hbar > 0.0) || v_inf < 0.0) throw Error(ErrorKind::InvalidConfig, "tau: need ħ > 0, ‖v‖ > 0");
  return hbar / (8.0 * v_inf);
}

int elapsed_steps(double t, double tau) {
  const double x = t / tau;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<int>(nearest);
  return static_cast<int>(std::floor(x));
}

double gamma(double t, double tau) {
  const int k = elapsed_steps(t, tau) + 1;
  return 1.0 / (4.0 * std::numbers::e * std::tgamma(k + 1.0));
}

double mean_field_bound(const BoundParams& params, double a_norm, BoundForm form) {
  if (params.N < 1) throw Error(ErrorKind::InvalidConfig, "mean_field_bound: N must be >= 1");
  const double tu = tau(params.hbar, params.v_inf);
  const int k = elapsed_steps(params.t, tu) + 1;
  const double n = params.N;
  const double g = gamma(params.t, tu);
  if (form == BoundForm::Coarse) {
    return std::exp2((k + 1) * params.p) * std::pow(n, -g) * a_norm;
  }
  return std::exp2(k * params.p) * (params.p / std::sqrt(n) + std::pow(n, -g)) * a_norm;
}

double small_time_bound(const BoundParams& params, double a_norm) {
  const double tu = tau(params.hbar, params.v_inf);
  if (params.t > tu * (1.0 + 1e-12)) {
    throw Error(ErrorKind::TOutOfRange,
                "small_time_bound: t = " + std::to_string(params.t) + " > τ = " + std::to_string(tu));
  }
  return std::exp2(params.p + 1) * (params.p + 1.0) / params.N * (params.t / tu) * a_norm;
}

double hierarchy_gap_bound(const BoundParams& params, double a_norm) {
  const double tu = tau(params.hbar, params.v_inf);
  return std::exp2(params.p - 2) * static_cast<double>(params.p) / params.N * (params.t / tu) * a_norm;
}

double dyson_term_bound(double t, double tau, int n, int p, double a_norm) {
  return std::pow(t / (2.0 * tau), n) * std::exp2(p - 1) * a_norm;
}

InductionConstants induction_constants(int N, int p, int k) {
  if (k < 1 || N < 2) throw Error(ErrorKind::InvalidConfig, "induction_constants: need k >= 1, N >= 2");
  InductionConstants out;
  out.L.resize(k + 1);
  out.L[0] = std::log2(static_cast<double>(N)) / (4.0 * std::numbers::e);
  out.weighted_sum = 0.0;
  for (int r = 1; r <= k; ++r) {
    out.L[r] = out.L[0] / std::tgamma(static_cast<double>(r));
    out.weighted_sum += r * out.L[r];
  }
  out.R = std::exp2(k * p) *
          (std::exp2(out.weighted_sum) * p / static_cast<double>(N) + std::exp2(-out.L[k]));
  return out;
}

namespace {

Rational pow2_inverse(int n) {
  return Rational(1, boost::multiprecision::cpp_int(1) << n);
}

}  // namespace

SeriesIdentity series_identity_2p(int p, int M) {
  if (p < 1 || M < 0) throw Error(ErrorKind::InvalidConfig, "series_identity_2p: need p >= 1, M >= 0");
  SeriesIdentity out;
  out.partial = 0;
  for (int n = 0; n <= M; ++n) out.partial += pow2_inverse(n) * (p + n - 1);
  out.tail = pow2_inverse(M) * (p + M + 1);
  out.limit = out.partial + out.tail;
  return out;
}

Rational tree_coefficient_exact(int N, int p, int n) {
  Rational c = 1;
  for (int j = 0; j < n; ++j) c *= Rational(N - p - j, N);
  return c;
}

FallingFactorialIdentity falling_factorial_identities(int N, int p) {
  if (p < 1 || p > N) {
    throw Error(ErrorKind::BadArity, "falling_factorial_identities: need 1 <= p <= N, got p = " +
                                         std::to_string(p) + ", N = " + std::to_string(N));
  }
  FallingFactorialIdentity out;
  out.lhs = 1;
  out.rhs = 0;
  for (int n = 0; n <= N - p; ++n) {
    const Rational c = tree_coefficient_exact(N, p, n) * pow2_inverse(n);
    if (n >= 1) out.lhs -= c;
    out.rhs += c * Rational(p + n, N);
  }
  out.bound = Rational(2 * (p + 1), N);
  return out;
}

Rational s_pN(int p, int N) {
  return falling_factorial_identities(N, p).lhs * Rational(boost::multiprecision::cpp_int(1) << (p - 1));
}

}  // namespace mfl
