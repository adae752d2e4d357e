#pragma once

// Exact N-body dynamics on Sym^N(C^d) with H_N = Σ h_i + (1/2N) Σ_{i≠j} V_ij.

#include <memory>

#include "mfl/fock.hpp"

namespace mfl {

class NBodyHamiltonian {
 public:
  /// Builds H0, HV in the single-particle frame `frame` (columns = modes).
  NBodyHamiltonian(const ComplexMatrix& h, const ComplexMatrix& v, double hbar, int N,
                   const ComplexMatrix& frame);
  /// Standard frame.
  NBodyHamiltonian(const ComplexMatrix& h, const ComplexMatrix& v, double hbar, int N);

  /// Frame in which P_S ρ^{⊗N} P_S is diagonal (eigenbasis of ρ, descending).
  static NBodyHamiltonian for_state(const ComplexMatrix& h, const ComplexMatrix& v, double hbar,
                                    int N, const DensityMatrix& rho);

  int modes() const { return basis_->modes(); }
  int particles() const { return basis_->particles(); }
  double hbar() const { return hbar_; }
  const OccupationBasis& basis() const { return *basis_; }
  const std::shared_ptr<const OccupationBasis>& shared_basis() const { return basis_; }
  const ComplexMatrix& frame() const { return frame_; }
  const ComplexMatrix& H0() const { return h0_; }
  const ComplexMatrix& HV() const { return hv_; }
  ComplexMatrix H() const { return h0_ + hv_; }
  const HermitianSpectrum& spectrum() const { return spec_; }

 private:
  double hbar_;
  std::shared_ptr<const OccupationBasis> basis_;
  ComplexMatrix frame_;
  ComplexMatrix h0_;
  ComplexMatrix hv_;
  HermitianSpectrum spec_;
};

/// e^{-iHt/ħ} ρ e^{iHt/ħ}. Throws BasisMismatch if the state lives on another
/// basis or frame.
SymmetricNBodyState evolve_state(const NBodyHamiltonian& H, const SymmetricNBodyState& state0,
                                 double t);

/// Tr(φ_p^N(a) ρ_N) with a rotated into the state's frame.
Complex expectation(const PObservable& a, const SymmetricNBodyState& state);

/// Tr(A(t) ρ0^{⊗N}) = Tr(A ρ_N(t)).
Complex heisenberg_expectation(const PObservable& a, const DensityMatrix& rho0,
                               const NBodyHamiltonian& H, double t);

/// P_S ρ^{⊗N} P_S on the basis and frame of H, without assuming the frame
/// diagonalizes ρ.
SymmetricNBodyState product_state_in_frame(const DensityMatrix& rho, const NBodyHamiltonian& H);

}  // namespace mfl
