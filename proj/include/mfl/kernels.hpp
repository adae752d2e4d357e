#pragma once

// Data-parallel kernels (OpenMP) and their serial reference definitions.
//
// The parallel versions are what the library calls. The `reference`
// namespace spells out the literal definitions (sums over M! permutations,
// Kronecker-product embeddings, restriction of full tensor operators) and is
// kept for tests and benchmarks only.

#include "mfl/occupation_basis.hpp"
#include "mfl/tensor_core.hpp"

namespace mfl::kernels {

enum class Side { Left, Right };

/// Number of OpenMP threads the kernels use; 0 keeps the runtime default.
void set_num_threads(int n);
int num_threads();

/// P_S^M as a dense matrix, built from permutation orbits.
ComplexMatrix symmetrizer(int M, int d);

/// P_S^M X P_S^M by orbit averaging of rows and columns, O(D^2).
ComplexMatrix symmetric_sandwich(const ComplexMatrix& x, int M, int d);

/// (1/M!) Σ_σ U_σ X U_σ†. Unlike the sandwich it keeps Tr(X ρ^{⊗M}) for every ρ.
ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d);

/// (I ⊗ .. ⊗ op ⊗ .. ⊗ I) X  (Side::Left) or  X (I ⊗ .. ⊗ op ⊗ .. ⊗ I) (Side::Right),
/// op acting on `slot` (0-based) of an n-slot space.
ComplexMatrix apply_on_slot(const ComplexMatrix& x, const ComplexMatrix& op, int slot, int n,
                            Side side);

/// Σ_{x,y} k_{x,y} a†_{x1}…a†_{xp} a_{yp}…a_{y1} on the occupation basis.
/// `kernel` is d^p × d^p. No normalization prefactor is applied.
ComplexMatrix normal_ordered(const ComplexMatrix& kernel, int p, const OccupationBasis& basis);

namespace reference {

ComplexMatrix symmetrizer(int M, int d);
ComplexMatrix symmetric_sandwich(const ComplexMatrix& x, int M, int d);
ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d);
ComplexMatrix apply_on_slot(const ComplexMatrix& x, const ComplexMatrix& op, int slot, int n,
                            Side side);

/// Columns are the normalized symmetric tensors |n⟩ of the basis.
ComplexMatrix symmetric_inclusion(const OccupationBasis& basis);

/// J† (Σ over ordered distinct slot tuples of `kernel`) J on the full tensor space.
ComplexMatrix normal_ordered(const ComplexMatrix& kernel, int p, const OccupationBasis& basis);

}  // namespace reference
}  // namespace mfl::kernels
