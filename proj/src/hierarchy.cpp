#include "mfl/hierarchy.hpp"

#include <cmath>
#include <string>

#include "mfl/kernels.hpp"
#include "mfl/poisson.hpp"

namespace mfl {

ComplexMatrix free_hamiltonian(const ComplexMatrix& h, int p) {
  const Index d = h.rows();
  const auto dim = static_cast<Index>(tensor_dim(static_cast<int>(d), p));
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  Index before = 1;
  for (int i = 0; i < p; ++i) {
    const Index after = dim / (before * d);
    out += kron(identity(before), kron(h, identity(after)));
    before *= d;
  }
  return out;
}

ComplexMatrix free_pair_potential(const InteractionModel& model, double r) {
  if (r == 0.0) return model.v();
  return propagate(free_hamiltonian(model.h(), 2), r, model.hbar(), model.v());
}

PObservable free_evolved(const InteractionModel& model, const PObservable& a, double t) {
  if (t == 0.0) return a;
  return PObservable::as_given(
      propagate(free_hamiltonian(model.h(), a.arity()), t, model.hbar(), a.kernel()), a.modes());
}

namespace {

void require_model_dims(const InteractionModel& model, const PObservable& a, const char* where) {
  if (a.modes() != model.modes()) {
    throw Error(ErrorKind::ShapeError, std::string(where) + ": observable and model differ in d");
  }
}

Index pow_dim(int d, int n) { return static_cast<Index>(tensor_dim(d, n)); }

}  // namespace

PObservable tree_apply(const TreeInsertion& X, const PObservable& a, double r) {
  const InteractionModel& model = X.model();
  require_model_dims(model, a, "tree_apply");
  if (a.arity() != X.arity()) {
    throw Error(ErrorKind::ShapeError, "tree_apply: observable arity " + std::to_string(a.arity()) +
                                           " != insertion arity " + std::to_string(X.arity()));
  }
  require_symmetric(a, "tree_apply");
  const int p = a.arity();
  const int d = a.modes();
  check_element_cap(tensor_dim(d, p + 1), tensor_dim(d, p + 1), "tree_apply");
  const ComplexMatrix vr = kron(identity(pow_dim(d, p - 1)), free_pair_potential(model, r));
  const ComplexMatrix lifted = kron(a.kernel(), identity(d));
  const ComplexMatrix c = (kI * static_cast<double>(p) / model.hbar()) * commutator(vr, lifted);
  return PObservable::as_given(kernels::permutation_average(c, p + 1, d), d);
}

PObservable loop_apply(const LoopInsertion& Y, const PObservable& a, double r) {
  const InteractionModel& model = Y.model();
  require_model_dims(model, a, "loop_apply");
  if (a.arity() != Y.arity()) throw Error(ErrorKind::ShapeError, "loop_apply: arity mismatch");
  require_symmetric(a, "loop_apply");
  const int p = a.arity();
  const int d = a.modes();
  if (p < 2) return PObservable::as_given(ComplexMatrix::Zero(d, d), d);
  const double coeff = p * (p - 1) / (2.0 * Y.particles());
  const ComplexMatrix vr = kron(identity(pow_dim(d, p - 2)), free_pair_potential(model, r));
  const ComplexMatrix c = (kI * coeff / model.hbar()) * commutator(vr, a.kernel());
  return PObservable::as_given(kernels::permutation_average(c, p, d), d);
}

double tree_coefficient(int N, int p, int n) {
  double c = 1.0;
  for (int j = 0; j < n; ++j) c *= static_cast<double>(N - p - j) / N;
  return c;
}

namespace {

// Dense N-particle helpers for the oracle-scale checks.
struct FullSpace {
  int d;
  int N;
  ComplexMatrix ps;

  FullSpace(int d_, int N_) : d(d_), N(N_) {
    check_element_cap(tensor_dim(d, N), tensor_dim(d, N), "full N-particle space");
    ps = kernels::symmetrizer(N, d);
  }

  ComplexMatrix phi(const ComplexMatrix& kernel, int q) const {
    return ps * kron(kernel, identity(pow_dim(d, N - q))) * ps;
  }

  ComplexMatrix pair_sum(const ComplexMatrix& v) const {
    const auto dim = pow_dim(d, N);
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) out += place_two_slot(v, i, j, N, d);
    return out / static_cast<double>(N);
  }
};

}  // namespace

double commutator_decomposition_check(const InteractionModel& model, const PObservable& a, double r,
                                      int N) {
  require_model_dims(model, a, "commutator_decomposition_check");
  require_symmetric(a, "commutator_decomposition_check");
  const int p = a.arity();
  if (p > N) throw Error(ErrorKind::BadArity, "commutator_decomposition_check: p > N");
  const FullSpace space(a.modes(), N);
  const double hbar = model.hbar();

  const ComplexMatrix vn = space.pair_sum(free_pair_potential(model, r));
  const ComplexMatrix lhs = (kI / hbar) * commutator(vn, space.phi(a.kernel(), p));

  ComplexMatrix rhs = space.phi(loop_apply(LoopInsertion(model, p, N), a, r).kernel(), p);
  if (p < N) {
    const PObservable x = tree_apply(TreeInsertion(model, p), a, r);
    rhs += (static_cast<double>(N - p) / N) * space.phi(x.kernel(), p + 1);
  }
  return op_norm(lhs - rhs);
}

double multit_coefficient_check(const InteractionModel& model, const PObservable& a, double t,
                                const std::vector<double>& times, int N, const DensityMatrix& rho) {
  require_model_dims(model, a, "multit_coefficient_check");
  require_symmetric(a, "multit_coefficient_check");
  const int p = a.arity();
  const int n = static_cast<int>(times.size());
  if (n > 2) throw Error(ErrorKind::InvalidConfig, "multit_coefficient_check: n <= 2 only");
  if (p > N) throw Error(ErrorKind::BadArity, "multit_coefficient_check: p > N");
  const FullSpace space(a.modes(), N);
  const double hbar = model.hbar();

  // Quantum side: T_r(B) = (i/ħ)[V_r^N, B] − L_r(B) on the dense space, with the
  // kernel of B tracked only to form the loop part.
  PObservable kernel = free_evolved(model, a, t);
  ComplexMatrix big = space.phi(kernel.kernel(), p);
  int q = p;
  for (double r : times) {
    if (q >= N) {
      big.setZero();
      break;
    }
    const ComplexMatrix vn = space.pair_sum(free_pair_potential(model, r));
    const ComplexMatrix loop = space.phi(loop_apply(LoopInsertion(model, q, N), kernel, r).kernel(), q);
    big = (kI / hbar) * commutator(vn, big) - loop;
    const PObservable next = tree_apply(TreeInsertion(model, q), kernel, r);
    kernel = PObservable::as_given((static_cast<double>(N - q) / N) * next.kernel(), a.modes());
    ++q;
  }
  const Complex quantum = big.cwiseProduct(kron_power(rho.matrix(), N).transpose()).sum();

  // Classical side: nested brackets with V_r^c = ½ Tr(V_r ρ^{⊗2}).
  PObservable chain = free_evolved(model, a, t);
  for (double r : times) {
    const PObservable vc(0.5 * free_pair_potential(model, r), a.modes());
    chain = bracket_kernel(vc, chain, hbar);
  }
  const Complex classical = tree_coefficient(N, p, n) * eval(chain, rho);
  return std::abs(quantum - classical);
}

// ---------------------------------------------------------------------------
// Symmetric-subspace cascade

ComplexMatrix symmetric_tree(const SymmetricTower& tower, const ComplexMatrix& w_k,
                             const ComplexMatrix& c, int k, double hbar) {
  const ComplexMatrix& b = tower.split(k + 1);
  const ComplexMatrix lifted = kron(c, identity(tower.modes()));
  return (kI * static_cast<double>(k) / hbar) * (b.adjoint() * commutator(w_k, lifted) * b);
}

ComplexMatrix symmetric_loop(const SymmetricTower& tower, const ComplexMatrix& v,
                             const ComplexMatrix& c, int k, int N, double hbar) {
  if (k < 2) return ComplexMatrix::Zero(c.rows(), c.cols());
  const double coeff = k * (k - 1) / (2.0 * N);
  return (kI * coeff / hbar) * commutator(tower.pair_operator(v, k), c);
}

int arity_cap(int d, int max_arity) {
  int k = 0;
  while (k < max_arity) {
    const std::uint64_t s = binomial(k + 1 + d - 1, k + 1);
    const std::uint64_t w = binomial(k + d - 1, k) * static_cast<std::uint64_t>(d);
    if (s * s > element_cap() || w * w > element_cap()) break;
    ++k;
  }
  return k;
}

int default_truncation(const InteractionModel& model, int p, double t, double tol, int max_arity) {
  if (model.v_inf() == 0.0 || t == 0.0) return 0;
  const double tau = model.hbar() / (8.0 * model.v_inf());
  const double ratio = std::abs(t) / (2.0 * tau);
  if (ratio >= 1.0) {
    throw Error(ErrorKind::ArityCapExceeded,
                "default_truncation: t >= 2τ, the Dyson tail does not shrink");
  }
  int L = 0;
  while (std::pow(ratio, L + 1) * std::pow(2.0, p - 1) > tol) ++L;
  if (p + L > arity_cap(model.modes(), max_arity)) {
    throw Error(ErrorKind::ArityCapExceeded,
                "default_truncation: p + L = " + std::to_string(p + L) + " exceeds the arity cap");
  }
  return L;
}

DysonCascade dyson_terms(const PObservable& a, double t, int L, const InteractionModel& model,
                         const CascadeOptions& options) {
  require_model_dims(model, a, "dyson_terms");
  require_symmetric(a, "dyson_terms");
  if (L < 0) throw Error(ErrorKind::InvalidConfig, "dyson_terms: L must be >= 0");
  const int p = a.arity();
  const int d = a.modes();
  const int cap = arity_cap(d, options.max_arity);
  if (p + L > cap) {
    throw Error(ErrorKind::ArityCapExceeded, "dyson_terms: p + L = " + std::to_string(p + L) +
                                                 " > arity cap " + std::to_string(cap));
  }
  const double hbar = model.hbar();

  DysonCascade out;
  out.p_ = p;
  out.t_ = t;
  auto tower = std::make_shared<const SymmetricTower>(d, p + L);
  out.tower_ = tower;

  const ComplexMatrix a_sym = tower->to_symmetric(a.kernel(), p);
  const HermitianSpectrum h0_spec = eigh(tower->one_body_sum(model.h(), p));
  auto c0 = [&](double s) { return propagate(h0_spec, s, hbar, a_sym); };

  out.c_.assign(L + 1, ComplexMatrix());
  out.c_[0] = c0(t);
  for (int n = 1; n <= L; ++n) {
    const Index s = tower->dim(p + n);
    out.c_[n] = ComplexMatrix::Zero(s, s);
  }
  if (L == 0 || t == 0.0) {
    out.step_ = 0.0;
    return out;
  }

  double step = options.step > 0.0 ? options.step : default_rk4_step(model);
  const auto steps = static_cast<long>(std::ceil(std::abs(t) / step - 1e-9));
  step = t / static_cast<double>(std::max(1L, steps));
  out.step_ = step;

  std::vector<ComplexMatrix> h0(L + 1), w(L + 1);
  for (int n = 1; n <= L; ++n) h0[n] = tower->one_body_sum(model.h(), p + n);
  for (int n = 0; n < L; ++n) w[n] = tower->pair_with_extra(model.v(), p + n);

  auto rhs = [&](const ComplexMatrix& head, const std::vector<ComplexMatrix>& y) {
    std::vector<ComplexMatrix> dy(L + 1);
    for (int n = 1; n <= L; ++n) {
      const ComplexMatrix& prev = n == 1 ? head : y[n - 1];
      dy[n] = (kI / hbar) * commutator(h0[n], y[n]) +
              symmetric_tree(*tower, w[n - 1], prev, p + n - 1, hbar);
    }
    return dy;
  };
  auto axpy = [&](const std::vector<ComplexMatrix>& y, double h, const std::vector<ComplexMatrix>& k) {
    std::vector<ComplexMatrix> out_y(L + 1);
    for (int n = 1; n <= L; ++n) out_y[n] = y[n] + h * k[n];
    return out_y;
  };

  std::vector<ComplexMatrix> y = out.c_;
  for (long i = 0; i < std::max(1L, steps); ++i) {
    const double s = step * static_cast<double>(i);
    const ComplexMatrix a0 = c0(s);
    const ComplexMatrix ah = c0(s + 0.5 * step);
    const ComplexMatrix a1 = c0(s + step);
    const auto k1 = rhs(a0, y);
    const auto k2 = rhs(ah, axpy(y, 0.5 * step, k1));
    const auto k3 = rhs(ah, axpy(y, 0.5 * step, k2));
    const auto k4 = rhs(a1, axpy(y, step, k3));
    for (int n = 1; n <= L; ++n) y[n] += (step / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
  }
  for (int n = 1; n <= L; ++n) out.c_[n] = std::move(y[n]);
  return out;
}

PObservable DysonCascade::term(int n) const {
  return PObservable::as_given(tower_->to_full(c_.at(n), p_ + n), tower_->modes());
}

Complex DysonCascade::classical_term(int n, const ComplexMatrix& rho) const {
  const ComplexMatrix s = tower_->power_state(rho, p_ + n);
  return c_.at(n).cwiseProduct(s.transpose()).sum();
}

namespace {

template <class Coefficient>
Complex weighted_sum(const DysonCascade& cascade, const ComplexMatrix& rho, int last,
                     Coefficient&& coeff) {
  const SymmetricTower& tower = cascade.tower();
  if (rho.rows() != tower.modes()) throw Error(ErrorKind::ShapeError, "cascade: ρ dimension");
  const int p = cascade.base_arity();
  ComplexMatrix s = tower.power_state(rho, p);
  Complex total = 0.0;
  for (int n = 0; n <= last; ++n) {
    if (n > 0) {
      const ComplexMatrix& b = tower.split(p + n);
      s = b.adjoint() * kron(s, rho) * b;
    }
    total += coeff(n) * cascade.symmetric_term(n).cwiseProduct(s.transpose()).sum();
  }
  return total;
}

}  // namespace

Complex gammaH_expectation(const DysonCascade& cascade, const DensityMatrix& rho, int N) {
  const int p = cascade.base_arity();
  if (p > N) throw Error(ErrorKind::BadArity, "gammaH_expectation: p > N");
  const int last = std::min(cascade.depth(), N - p);
  return weighted_sum(cascade, rho.matrix(), last,
                      [&](int n) { return tree_coefficient(N, p, n); });
}

Complex classical_dyson_expectation(const DysonCascade& cascade, const DensityMatrix& rho) {
  return weighted_sum(cascade, rho.matrix(), cascade.depth(), [](int) { return 1.0; });
}

}  // namespace mfl
