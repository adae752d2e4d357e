#pragma once

// Hartree-von Neumann flow  iħ ∂ρ/∂t = [h + m(ρ), ρ],  m(ρ) = Tr₂(V (I ⊗ ρ)).

#include <vector>

#include "mfl/types.hpp"

namespace mfl {

class InteractionModel {
 public:
  /// Validates h (Hermitian), V (Hermitian, SWAP-symmetric, d²×d²), ħ > 0.
  InteractionModel(ComplexMatrix h, ComplexMatrix v, double hbar);

  /// Multiplication-type pair potential V = Σ w(x,y) |xy⟩⟨xy| from a real
  /// symmetric table.
  static InteractionModel from_pair_table(ComplexMatrix h, const Eigen::MatrixXd& w, double hbar);

  int modes() const { return static_cast<int>(h_.rows()); }
  const ComplexMatrix& h() const { return h_; }
  const ComplexMatrix& v() const { return v_; }
  double hbar() const { return hbar_; }
  double v_inf() const { return v_inf_; }
  bool diagonal_pair() const { return diagonal_pair_; }
  /// w(x, y); empty unless diagonal_pair().
  const Eigen::MatrixXd& pair_table() const { return w_; }

  /// Same model with h, V replaced by U† h U and (U⊗U)† V (U⊗U).
  InteractionModel in_frame(const ComplexMatrix& frame) const;

 private:
  ComplexMatrix h_;
  ComplexMatrix v_;
  double hbar_;
  double v_inf_ = 0.0;
  bool diagonal_pair_ = false;
  Eigen::MatrixXd w_;
};

ComplexMatrix mean_field(const InteractionModel& model, const ComplexMatrix& rho);
inline ComplexMatrix mean_field(const InteractionModel& model, const DensityMatrix& rho) {
  return mean_field(model, rho.matrix());
}

/// Tr(hρ) + ½ Tr(V ρ⊗ρ).
double energy(const InteractionModel& model, const ComplexMatrix& rho);
inline double energy(const InteractionModel& model, const DensityMatrix& rho) {
  return energy(model, rho.matrix());
}

/// (-i/ħ)[h + m(ρ), ρ]
ComplexMatrix hartree_rhs(const InteractionModel& model, const ComplexMatrix& rho);

/// Free flow e^{-iht/ħ} ρ e^{iht/ħ}.
ComplexMatrix free_flow(const InteractionModel& model, const ComplexMatrix& rho, double t);

enum class HartreeMethod { RK4, Picard };

struct HartreeOptions {
  double step = 0.0;              // RK4 step; 0 picks min(1e-3, τ/200)
  int picard_intervals = 128;     // grid intervals per contraction window (even)
  double picard_tol = 1e-12;      // trace-norm change that ends the iteration
  int picard_max_iterations = 200;
  double grid_tol = 1e-7;         // allowed full-grid vs half-grid discrepancy
  int max_windows = 100000;
};

double default_rk4_step(const InteractionModel& model);

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;
};

/// ρ(t). Throws PicardNoConvergence / GridTooCoarse in Picard mode.
DensityMatrix evolve_hartree(const InteractionModel& model, const DensityMatrix& rho0, double t,
                             HartreeMethod method = HartreeMethod::RK4,
                             const HartreeOptions& options = {});

/// RK4 states at `samples + 1` equally spaced times in [0, t].
Trajectory hartree_trajectory(const InteractionModel& model, const DensityMatrix& rho0, double t,
                              int samples, const HartreeOptions& options = {});

/// One application of  ρ ↦ σ_t(ρ₀) − (i/ħ) ∫₀ᵗ σ_{t−s}([m(ρ_s), ρ_s]) ds,
/// σ_t(γ) = e^{-iht/ħ} γ e^{iht/ħ}, with ρ₀ the trajectory's first state. The
/// times must be equally spaced, starting at 0, with an even number ≥ 6 of
/// intervals. Throws GridTooCoarse if halving the grid moves the result by more
/// than grid_tol (trace norm).
Trajectory duhamel_map(const InteractionModel& model, const Trajectory& trajectory,
                       double grid_tol = 1e-7);

/// Picard iteration of duhamel_map over contraction windows of length
/// ħ/(2‖v‖R), R = 2; returns the state at every grid node.
Trajectory picard_trajectory(const InteractionModel& model, const DensityMatrix& rho0, double t,
                             const HartreeOptions& options = {});

}  // namespace mfl
