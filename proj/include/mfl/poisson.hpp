#pragma once

// Polynomial observables A^c(ρ) = Tr(a ρ^{⊗p}) and the density-matrix Poisson
// bracket {A, B}(ρ) = -(i/ħ) Tr(A'ρB' - B'ρA').

#include <utility>

#include "mfl/hartree.hpp"
#include "mfl/types.hpp"

namespace mfl {

/// Tr(a ρ^{⊗p}) by contracting one slot at a time.
Complex eval(const PObservable& a, const ComplexMatrix& rho);
inline Complex eval(const PObservable& a, const DensityMatrix& rho) { return eval(a, rho.matrix()); }

/// p Tr_{1..p-1}(a (ρ^{⊗(p-1)} ⊗ I)). Throws NotSymmetric.
ComplexMatrix frechet(const PObservable& a, const ComplexMatrix& rho);
inline ComplexMatrix frechet(const PObservable& a, const DensityMatrix& rho) {
  return frechet(a, rho.matrix());
}

Complex bracket_eval(const PObservable& a, const PObservable& b, const ComplexMatrix& rho,
                     double hbar);

/// Arity p+q-1 kernel c with eval(c, ρ) = bracket_eval(a, b, ρ) for every ρ:
///   c = Sym [ -(i/ħ) p q [I^{p-1} ⊗ b, a ⊗ I^{q-1}] ],  Sym = permutation_average.
PObservable bracket_kernel(const PObservable& a, const PObservable& b, double hbar);

/// Bracket at ρ = |ψ⟩⟨ψ| two ways: through the Fréchet derivatives, and through
/// the Wirtinger gradients of ψ ↦ A^c(P_ψ):
///   (i/ħ) Σ_x (∂_{ψ_x} A ∂_{ψ̄_x} B − ∂_{ψ̄_x} A ∂_{ψ_x} B).
std::pair<Complex, Complex> rank_one_reduction_check(const PObservable& a, const PObservable& b,
                                                      const ComplexVector& psi, double hbar);

/// Wirtinger gradients of A^c(ψ) = ⟨ψ^{⊗p}, a ψ^{⊗p}⟩: (∂/∂ψ, ∂/∂ψ̄).
std::pair<ComplexVector, ComplexVector> wirtinger_gradients(const PObservable& a,
                                                            const ComplexVector& psi);

/// H^c(ρ) = Tr(hρ) + ½ Tr(V ρ^{⊗2}).
struct ClassicalHamiltonian {
  PObservable h_part;
  PObservable v_part;  // kernel ½V

  static ClassicalHamiltonian from_model(const InteractionModel& model);
  Complex eval(const ComplexMatrix& rho) const;
  /// h + m(ρ)
  ComplexMatrix frechet(const ComplexMatrix& rho) const;
};

/// {H^c, A}(ρ), bracket taken term by term.
Complex hamiltonian_bracket(const ClassicalHamiltonian& H, const PObservable& a,
                            const ComplexMatrix& rho, double hbar);

}  // namespace mfl
