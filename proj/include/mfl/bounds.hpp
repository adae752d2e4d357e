#pragma once

// Closed-form constants and estimates of the mean-field error bound, and the exact
// rational identities behind them.

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mfl {

using Rational = boost::multiprecision::cpp_rational;

/// ħ / (8 ‖v‖). Throws FreeTheory for v_inf = 0.
double tau(double hbar, double v_inf);

/// ⌊t/τ⌋, with t/τ within 1e-12 of an integer snapped to it.
int elapsed_steps(double t, double tau);

/// 1 / (4e (⌊t/τ⌋ + 1)!)
double gamma(double t, double tau);

struct BoundParams {
  double hbar = 1.0;
  double v_inf = 1.0;
  int p = 1;
  int N = 1;
  double t = 0.0;
};

enum class BoundForm { Coarse, Fine };

/// coarse: 2^{(⌊t/τ⌋+2)p} N^{-γ(t)} ‖a‖
/// fine:   2^{(⌊t/τ⌋+1)p} (p N^{-1/2} + N^{-γ(t)}) ‖a‖
double mean_field_bound(const BoundParams& params, double a_norm, BoundForm form);

/// 2^{p+1} ((p+1)/N) (t/τ) ‖a‖; throws TOutOfRange for t > τ.
double small_time_bound(const BoundParams& params, double a_norm);

/// 2^{p-2} (p/N) (t/τ) ‖a‖
double hierarchy_gap_bound(const BoundParams& params, double a_norm);

/// (t/2τ)^n 2^{p-1} ‖a‖
double dyson_term_bound(double t, double tau, int n, int p, double a_norm);

struct InductionConstants {
  std::vector<double> L;  // L[0] = log2(N)/(4e), L[r] = L[0]/(r-1)! for r = 1..k
  double weighted_sum;    // Σ_{r=1}^k r L_r
  double R;               // 2^{kp}(2^{Σ r L_r} p/N + 2^{-L_k})
};

InductionConstants induction_constants(int N, int p, int k);

struct SeriesIdentity {
  Rational partial;  // Σ_{n=0}^{M} 2^{-n}(p+n-1)
  Rational tail;     // 2^{-M}(p+M+1)
  Rational limit;    // partial + tail
};

SeriesIdentity series_identity_2p(int p, int M);

/// (N-p)! / ((N-p-n)! N^n), exact.
Rational tree_coefficient_exact(int N, int p, int n);

struct FallingFactorialIdentity {
  Rational lhs;    // 1 − Σ_{n=1}^{N-p} c_n 2^{-n}
  Rational rhs;    // Σ_{n=0}^{N-p} c_n ((p+n)/N) 2^{-n}
  Rational bound;  // 2(p+1)/N
};

/// Throws BadArity for p > N or p < 1.
FallingFactorialIdentity falling_factorial_identities(int N, int p);

/// S_{p,N} = (1 − Σ_{n=1}^{N-p} c_n 2^{-n}) 2^{p-1}
Rational s_pN(int p, int N);

}  // namespace mfl
