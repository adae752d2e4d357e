#pragma once

// Tree / loop insertions and the Dyson terms of Γ^H_t and of the classical
// flow U_t.
//
// Full-tensor forms (d^p × d^p kernels) are the literal definitions:
//   X_{p,r}(a) = p Sym (i/ħ)[I^{p-1} ⊗ V_r, a ⊗ I]
//   Y_{p,r}(a) = (p(p-1)/2N) Sym (i/ħ)[I^{p-2} ⊗ V_r, a]
// Sym is the average over slot permutations. Sandwiching with P_S instead gives
// the same operator on the bosonic space but changes Tr(· ρ^{⊗k}) for mixed ρ.
// with V_r = e^{i(h⊗I+I⊗h)r/ħ} V e^{-i(h⊗I+I⊗h)r/ħ}. The cascade keeps every
// kernel on Sym^k(C^d) instead (see SymmetricTower), which is what makes depth
// 10+ affordable.

#include <memory>
#include <vector>

#include "mfl/fock.hpp"
#include "mfl/hartree.hpp"
#include "mfl/types.hpp"

namespace mfl {

/// V_r
ComplexMatrix free_pair_potential(const InteractionModel& model, double r);

/// Σ_{i≤p} h_i on (C^d)^{⊗p}.
ComplexMatrix free_hamiltonian(const ComplexMatrix& h, int p);

/// a_t = e^{iH⁰_p t/ħ} a e^{-iH⁰_p t/ħ}
PObservable free_evolved(const InteractionModel& model, const PObservable& a, double t);

class TreeInsertion {
 public:
  TreeInsertion(const InteractionModel& model, int p) : model_(&model), p_(p) {}
  int arity() const { return p_; }
  const InteractionModel& model() const { return *model_; }

 private:
  const InteractionModel* model_;
  int p_;
};

class LoopInsertion {
 public:
  LoopInsertion(const InteractionModel& model, int p, int N) : model_(&model), p_(p), n_(N) {}
  int arity() const { return p_; }
  int particles() const { return n_; }
  const InteractionModel& model() const { return *model_; }

 private:
  const InteractionModel* model_;
  int p_;
  int n_;
};

/// X_{p,r}(a), arity p+1. Throws ShapeError if a's arity differs from X's.
PObservable tree_apply(const TreeInsertion& X, const PObservable& a, double r);
/// Y_{p,r}(a), arity p; zero for p = 1.
PObservable loop_apply(const LoopInsertion& Y, const PObservable& a, double r);

/// ‖(i/ħ)[V_r^N, φ_p(a)] − T_r(φ_p(a)) − L_r(φ_p(a))‖ with every piece built on
/// the full N-particle tensor space (d^N ≤ element cap).
double commutator_decomposition_check(const InteractionModel& model, const PObservable& a,
                                      double r, int N);

/// |Tr(T_{t_n}…T_{t_1}(A_t) ρ^{⊗N}) − c_n P_{V^c_{t_n}}…P_{V^c_{t_1}} A_t^c(ρ)| for
/// n = times.size() ≤ 2, c_n = (N-p)!/((N-p-n)! N^n). The left side is built as a
/// dense N-particle operator, the right side through bracket kernels.
double multit_coefficient_check(const InteractionModel& model, const PObservable& a, double t,
                                const std::vector<double>& times, int N, const DensityMatrix& rho);

/// Π_{j<n} (N-p-j)/N = (N-p)!/((N-p-n)! N^n); zero once n > N-p.
double tree_coefficient(int N, int p, int n);

// ---------------------------------------------------------------------------
// Symmetric-subspace forms

/// X̂_k(c) = k (i/ħ) B_{k+1}† [W_k, c ⊗ I] B_{k+1} on Sym^{k+1}, W_k = V on
/// (last particle, extra particle).
ComplexMatrix symmetric_tree(const SymmetricTower& tower, const ComplexMatrix& w_k,
                             const ComplexMatrix& c, int k, double hbar);

/// (k(k-1)/2N)(i/ħ)[G_k, c], G_k = V on two of k particles.
ComplexMatrix symmetric_loop(const SymmetricTower& tower, const ComplexMatrix& v,
                             const ComplexMatrix& c, int k, int N, double hbar);

struct CascadeOptions {
  double step = 0.0;    // RK4 step; 0 picks min(1e-3, τ/200), refined to divide t
  int max_arity = 40;   // hard cap on p + L
};

/// c_n(t) = ∫_{Δ_n^t} X_{p+n-1,t_n} … X_{p,t_1}(a_t), n = 0..L, stored on Sym^{p+n}.
class DysonCascade {
 public:
  int base_arity() const { return p_; }
  int depth() const { return static_cast<int>(c_.size()) - 1; }
  double time() const { return t_; }
  double step() const { return step_; }
  const SymmetricTower& tower() const { return *tower_; }
  /// c_n on Sym^{p+n}.
  const ComplexMatrix& symmetric_term(int n) const { return c_.at(n); }
  /// c_n as a full d^{p+n} tensor kernel (subject to the element cap).
  PObservable term(int n) const;
  /// Tr(c_n ρ^{⊗(p+n)}) = A^c_{t,n}(ρ).
  Complex classical_term(int n, const ComplexMatrix& rho) const;

 private:
  friend DysonCascade dyson_terms(const PObservable&, double, int, const InteractionModel&,
                                  const CascadeOptions&);
  int p_ = 0;
  double t_ = 0.0;
  double step_ = 0.0;
  std::shared_ptr<const SymmetricTower> tower_;
  std::vector<ComplexMatrix> c_;
};

/// Largest arity the cascade accepts: dim(Sym^k)² within the element cap and
/// k ≤ max_arity.
int arity_cap(int d, int max_arity = 40);

/// Smallest L with (t/2τ)^{L+1} 2^{p-1} ≤ tol. Throws ArityCapExceeded when the
/// tail does not shrink (t ≥ 2τ) or p + L exceeds the cap.
int default_truncation(const InteractionModel& model, int p, double t, double tol = 1e-8,
                       int max_arity = 40);

/// Throws ArityCapExceeded if p + L is over the cap.
DysonCascade dyson_terms(const PObservable& a, double t, int L, const InteractionModel& model,
                         const CascadeOptions& options = {});

/// Σ_{n=0}^{min(L, N-p)} c_n^{(N)} Tr(c_n ρ^{⊗(p+n)}).
Complex gammaH_expectation(const DysonCascade& cascade, const DensityMatrix& rho, int N);

/// Σ_{n=0}^{L} Tr(c_n ρ^{⊗(p+n)}).
Complex classical_dyson_expectation(const DysonCascade& cascade, const DensityMatrix& rho);

}  // namespace mfl
