#include "mfl/poisson.hpp"

#include <numeric>
#include <vector>

#include "mfl/kernels.hpp"

namespace mfl {

namespace {

void require_dims(const PObservable& a, const ComplexMatrix& rho, const char* where) {
  if (rho.rows() != a.modes() || rho.cols() != a.modes()) {
    throw Error(ErrorKind::ShapeError, std::string(where) + ": ρ is not d x d");
  }
}

// a (ρ on the listed slots, identity elsewhere)
ComplexMatrix right_multiply_slots(ComplexMatrix x, const ComplexMatrix& rho, int first, int last,
                                   int n) {
  for (int s = first; s < last; ++s) x = kernels::apply_on_slot(x, rho, s, n, kernels::Side::Right);
  return x;
}

// ψ^{⊗k}
ComplexVector tensor_power(const ComplexVector& psi, int k) {
  ComplexVector out = ComplexVector::Ones(1);
  for (int i = 0; i < k; ++i) {
    ComplexVector next(out.size() * psi.size());
    for (Index a = 0; a < out.size(); ++a) next.segment(a * psi.size(), psi.size()) = out(a) * psi;
    out = std::move(next);
  }
  return out;
}

}  // namespace

Complex eval(const PObservable& a, const ComplexMatrix& rho) {
  require_dims(a, rho, "eval");
  const int p = a.arity();
  if (p == 1) return a.kernel().cwiseProduct(rho.transpose()).sum();
  return right_multiply_slots(a.kernel(), rho, 0, p, p).trace();
}

ComplexMatrix frechet(const PObservable& a, const ComplexMatrix& rho) {
  require_dims(a, rho, "frechet");
  require_symmetric(a, "frechet");
  const int p = a.arity();
  if (p == 1) return a.kernel();
  const ComplexMatrix x = right_multiply_slots(a.kernel(), rho, 0, p - 1, p);
  const std::vector<int> dims(p, a.modes());
  const int keep[] = {p - 1};
  return static_cast<double>(p) * partial_trace(x, dims, keep);
}

Complex bracket_eval(const PObservable& a, const PObservable& b, const ComplexMatrix& rho,
                     double hbar) {
  const ComplexMatrix da = frechet(a, rho);
  const ComplexMatrix db = frechet(b, rho);
  return (-kI / hbar) * (da * rho * db - db * rho * da).trace();
}

PObservable bracket_kernel(const PObservable& a, const PObservable& b, double hbar) {
  if (a.modes() != b.modes()) throw Error(ErrorKind::ShapeError, "bracket_kernel: mode mismatch");
  require_symmetric(a, "bracket_kernel");
  require_symmetric(b, "bracket_kernel");
  const int d = a.modes();
  const int p = a.arity();
  const int q = b.arity();
  const int n = p + q - 1;
  check_element_cap(tensor_dim(d, n), tensor_dim(d, n), "bracket_kernel");
  const ComplexMatrix left = kron(identity(static_cast<Index>(tensor_dim(d, p - 1))), b.kernel());
  const ComplexMatrix right = kron(a.kernel(), identity(static_cast<Index>(tensor_dim(d, q - 1))));
  const ComplexMatrix c = (-kI / hbar) * static_cast<double>(p * q) * commutator(left, right);
  return PObservable::as_given(kernels::permutation_average(c, n, d), d);
}

std::pair<ComplexVector, ComplexVector> wirtinger_gradients(const PObservable& a,
                                                            const ComplexVector& psi) {
  const int p = a.arity();
  const Index d = a.modes();
  if (psi.size() != d) throw Error(ErrorKind::ShapeError, "wirtinger_gradients: ψ has wrong size");
  const ComplexVector full = tensor_power(psi, p);
  const ComplexVector head = tensor_power(psi, p - 1);
  // a ψ^{⊗p} and (ψ^{⊗p})† a, contracted against ψ on the first p-1 slots
  const ComplexVector right = a.kernel() * full;
  const ComplexVector left = (full.adjoint() * a.kernel()).transpose();
  ComplexVector d_psi = ComplexVector::Zero(d);
  ComplexVector d_psibar = ComplexVector::Zero(d);
  for (Index h = 0; h < head.size(); ++h) {
    d_psibar += std::conj(head(h)) * right.segment(h * d, d);
    d_psi += head(h) * left.segment(h * d, d);
  }
  // a symmetric: every slot contributes the same
  return {static_cast<double>(p) * d_psi, static_cast<double>(p) * d_psibar};
}

std::pair<Complex, Complex> rank_one_reduction_check(const PObservable& a, const PObservable& b,
                                                      const ComplexVector& psi, double hbar) {
  require_symmetric(a, "rank_one_reduction_check");
  require_symmetric(b, "rank_one_reduction_check");
  const ComplexMatrix rho = psi * psi.adjoint();
  const Complex via_density = bracket_eval(a, b, rho, hbar);
  const auto [a_psi, a_bar] = wirtinger_gradients(a, psi);
  const auto [b_psi, b_bar] = wirtinger_gradients(b, psi);
  const Complex via_wave =
      (kI / hbar) * (a_psi.transpose() * b_bar - a_bar.transpose() * b_psi)(0, 0);
  return {via_density, via_wave};
}

ClassicalHamiltonian ClassicalHamiltonian::from_model(const InteractionModel& model) {
  return {PObservable(model.h(), model.modes()), PObservable(0.5 * model.v(), model.modes())};
}

Complex ClassicalHamiltonian::eval(const ComplexMatrix& rho) const {
  return mfl::eval(h_part, rho) + mfl::eval(v_part, rho);
}

ComplexMatrix ClassicalHamiltonian::frechet(const ComplexMatrix& rho) const {
  return mfl::frechet(h_part, rho) + mfl::frechet(v_part, rho);
}

Complex hamiltonian_bracket(const ClassicalHamiltonian& H, const PObservable& a,
                            const ComplexMatrix& rho, double hbar) {
  return bracket_eval(H.h_part, a, rho, hbar) + bracket_eval(H.v_part, a, rho, hbar);
}

}  // namespace mfl
