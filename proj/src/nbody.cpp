#include "mfl/nbody.hpp"

#include <string>

namespace mfl {

namespace {

bool same_frame(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

NBodyHamiltonian::NBodyHamiltonian(const ComplexMatrix& h, const ComplexMatrix& v, double hbar,
                                   int N, const ComplexMatrix& frame)
    : hbar_(hbar), frame_(frame) {
  if (hbar <= 0.0) throw Error(ErrorKind::InvalidConfig, "NBodyHamiltonian: hbar must be > 0");
  if (N < 1) throw Error(ErrorKind::ShapeError, "NBodyHamiltonian: N must be >= 1");
  const auto d = h.rows();
  if (frame.rows() != d || frame.cols() != d) {
    throw Error(ErrorKind::ShapeError, "NBodyHamiltonian: frame is not d x d");
  }
  if (!is_hermitian(h)) throw Error(ErrorKind::NotHermitian, "NBodyHamiltonian: h");
  basis_ = std::make_shared<const OccupationBasis>(static_cast<int>(d), N);
  check_element_cap(basis_->size(), basis_->size(), "NBodyHamiltonian");

  h0_ = hermitian_part(second_quantize_1body(hermitian_part(to_frame(h, frame, 1)), *basis_));
  if (N >= 2) {
    validate_pair_potential(v, static_cast<int>(d), "NBodyHamiltonian");
    hv_ = hermitian_part(
        second_quantize_2body(hermitian_part(to_frame(v, frame, 2)), 1.0 / N, *basis_));
  } else {
    hv_ = ComplexMatrix::Zero(h0_.rows(), h0_.cols());
  }
  spec_ = eigh(h0_ + hv_);
}

NBodyHamiltonian::NBodyHamiltonian(const ComplexMatrix& h, const ComplexMatrix& v, double hbar,
                                   int N)
    : NBodyHamiltonian(h, v, hbar, N, identity(h.rows())) {}

NBodyHamiltonian NBodyHamiltonian::for_state(const ComplexMatrix& h, const ComplexMatrix& v,
                                             double hbar, int N, const DensityMatrix& rho) {
  const HermitianSpectrum spec = eigh(rho.matrix());
  const int d = rho.dim();
  ComplexMatrix frame(d, d);
  for (int k = 0; k < d; ++k) frame.col(k) = spec.eigenvectors.col(d - 1 - k);
  return NBodyHamiltonian(h, v, hbar, N, frame);
}

SymmetricNBodyState evolve_state(const NBodyHamiltonian& H, const SymmetricNBodyState& state0,
                                 double t) {
  if (!state0.basis || !(*state0.basis == H.basis()) || !same_frame(state0.frame, H.frame())) {
    throw Error(ErrorKind::BasisMismatch, "evolve_state: state and Hamiltonian differ in basis or frame");
  }
  SymmetricNBodyState out{state0.basis, {}, state0.frame};
  if (t == 0.0) {
    out.matrix = state0.matrix;
    return out;
  }
  const ComplexMatrix u = unitary(H.spectrum(), -t, H.hbar());
  out.matrix = u * state0.matrix * u.adjoint();
  return out;
}

Complex expectation(const PObservable& a, const SymmetricNBodyState& state) {
  const int N = state.basis->particles();
  if (a.arity() > N) {
    throw Error(ErrorKind::BadArity,
                "expectation: arity " + std::to_string(a.arity()) + " > N = " + std::to_string(N));
  }
  require_symmetric(a, "expectation");
  const PObservable rotated = PObservable::as_given(to_frame(a.kernel(), state.frame, a.arity()), a.modes());
  const ComplexMatrix embedded = embed_p_observable(rotated, N, *state.basis);
  return embedded.cwiseProduct(state.matrix.transpose()).sum();
}

SymmetricNBodyState product_state_in_frame(const DensityMatrix& rho, const NBodyHamiltonian& H) {
  const ProductStateProjection proj = project_product_state(rho, H.particles());
  if (same_frame(proj.state.frame, H.frame())) return proj.state;

  // S_k = B_k† (S_{k-1} ⊗ ρ') B_k with ρ' = U† ρ U in the Hamiltonian's frame.
  const ComplexMatrix rho_f = to_frame(rho.matrix(), H.frame(), 1);
  const SymmetricTower tower(H.modes(), H.particles());
  SymmetricNBodyState out{H.shared_basis(), hermitian_part(tower.power_state(rho_f, H.particles())),
                          H.frame()};
  return out;
}

Complex heisenberg_expectation(const PObservable& a, const DensityMatrix& rho0,
                               const NBodyHamiltonian& H, double t) {
  return expectation(a, evolve_state(H, product_state_in_frame(rho0, H), t));
}

}  // namespace mfl
