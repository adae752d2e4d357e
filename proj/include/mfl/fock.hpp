#pragma once

// Bosonic (occupation-number) representation of the symmetric subspace
// Sym^N(C^d) ⊂ (C^d)^{⊗N}.

#include <memory>
#include <vector>

#include "mfl/occupation_basis.hpp"
#include "mfl/tensor_core.hpp"
#include "mfl/types.hpp"

namespace mfl {

/// P_S ρ_N P_S expressed on the occupation basis of a single-particle frame.
/// `frame` is the unitary whose columns are the modes the basis refers to.
struct SymmetricNBodyState {
  std::shared_ptr<const OccupationBasis> basis;
  ComplexMatrix matrix;
  ComplexMatrix frame;

  double mass() const { return matrix.trace().real(); }
};

struct ProductStateProjection {
  SymmetricNBodyState state;
  RealVector eigenvalues;  // of ρ, descending, in the order of the frame's columns
};

/// Σ_i h_i on Sym^N.
ComplexMatrix second_quantize_1body(const ComplexMatrix& h, const OccupationBasis& basis);

/// Throws ShapeError / NotHermitian / NotSwapSymmetric unless v is a valid
/// pair operator on C^d ⊗ C^d.
void validate_pair_potential(const ComplexMatrix& v, int d, const char* where);

/// (g/2) Σ_{i≠j} V_ij on Sym^N.
ComplexMatrix second_quantize_2body(const ComplexMatrix& v, double g, const OccupationBasis& basis);

/// φ_p^N(a) = P_S^N (a ⊗ I^{N-p}) P_S^N restricted to Sym^N, through the
/// normal-ordered string ((N-p)!/N!) Σ a_{xy} a†_{x1}…a†_{xp} a_{yp}…a_{y1}.
ComplexMatrix embed_p_observable(const PObservable& a, int N, const OccupationBasis& basis);

/// P_S ρ^{⊗N} P_S in the eigenbasis of ρ: diagonal with entries Π_k λ_k^{n_k}.
ProductStateProjection project_product_state(const DensityMatrix& rho, int N);

/// Single-particle change of frame: U† h U.
ComplexMatrix to_frame(const ComplexMatrix& op, const ComplexMatrix& frame, int slots);

/// The chain of symmetric subspaces Sym^0 … Sym^K of C^d, linked by the split
/// isometries B_k: Sym^k → Sym^{k-1} ⊗ C^d,
///   B_k |n⟩ = Σ_j sqrt(n_j / k) |n - e_j⟩ ⊗ |j⟩.
/// Symmetric k-particle kernels are carried as s_k × s_k matrices
/// (s_k = C(k+d-1, k)); every operation below stays inside this representation.
class SymmetricTower {
 public:
  SymmetricTower(int d, int max_particles);

  int modes() const { return d_; }
  int max_particles() const { return static_cast<int>(bases_.size()) - 1; }
  const OccupationBasis& basis(int k) const { return *bases_.at(k); }
  std::shared_ptr<const OccupationBasis> shared_basis(int k) const { return bases_.at(k); }
  Index dim(int k) const { return static_cast<Index>(bases_.at(k)->size()); }

  /// B_k, shape (s_{k-1} d) × s_k. k ≥ 1.
  const ComplexMatrix& split(int k) const { return splits_.at(k); }

  /// Operator c ⊗ I on Sym^{k+1} for c on Sym^k.
  ComplexMatrix lift(const ComplexMatrix& c, int k) const;

  /// J_k† ρ^{⊗k} J_k.
  ComplexMatrix power_state(const ComplexMatrix& rho, int k) const;

  /// Σ_i h_i on Sym^k.
  ComplexMatrix one_body_sum(const ComplexMatrix& h, int k) const;

  /// Two-particle operator v on (last slot of Sym^k, extra particle), as an
  /// operator on Sym^k ⊗ C^d. k ≥ 1.
  ComplexMatrix pair_with_extra(const ComplexMatrix& v, int k) const;

  /// v acting on two of the k particles, restricted to Sym^k. k ≥ 2.
  ComplexMatrix pair_operator(const ComplexMatrix& v, int k) const;

  /// J_k: isometric inclusion Sym^k → (C^d)^{⊗k}, built as (J_{k-1} ⊗ I) B_k.
  ComplexMatrix inclusion(int k) const;

  /// J† a J for a symmetric full-tensor kernel.
  ComplexMatrix to_symmetric(const ComplexMatrix& full, int k) const;
  /// J c J†.
  ComplexMatrix to_full(const ComplexMatrix& sym, int k) const;

 private:
  int d_;
  std::vector<std::shared_ptr<const OccupationBasis>> bases_;
  std::vector<ComplexMatrix> splits_;
};

}  // namespace mfl
