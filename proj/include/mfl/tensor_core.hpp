#pragma once

// Dense complex multilinear algebra on (C^d)^{⊗n}.
//
// Index convention (used everywhere in the library): slot-1-major. For a
// multi-index (x_1, ..., x_n) the flat index is x_1 d^{n-1} + ... + x_n, so the
// first tensor slot varies slowest. kron(A, B) puts A in slot 1.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mfl/errors.hpp"

namespace mfl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Maximum number of complex entries any constructed matrix may hold.
/// Defaults to 2^26; the CLI exposes it as a config knob.
std::size_t element_cap();
void set_element_cap(std::size_t cap);

/// Throws InstanceTooLarge when rows*cols exceeds the element cap.
void check_element_cap(std::size_t rows, std::size_t cols, const char* what);

/// Integer power d^n, throws InstanceTooLarge on overflow past the cap.
std::size_t tensor_dim(int d, int n);

struct HermitianSpectrum {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

double hermiticity_error(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

HermitianSpectrum eigh(const ComplexMatrix& h);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_power(const ComplexMatrix& a, int n);
ComplexMatrix identity(Index n);

/// Matrix of P_S^M on (C^d)^{⊗M}.
ComplexMatrix symmetrize(int M, int d);

/// P_S^M X P_S^M without materializing the projector.
ComplexMatrix symmetrize_sandwich(const ComplexMatrix& x, int M, int d);

/// Average of U_σ X U_σ† over all slot permutations σ.
ComplexMatrix permutation_average(const ComplexMatrix& x, int M, int d);

/// Matrix of the unitary that moves the content of slot k to slot perm[k].
ComplexMatrix slot_permutation(std::span<const int> perm, int d);

/// SWAP on C^d ⊗ C^d.
ComplexMatrix swap_operator(int d);

/// Two-slot operator `v` placed on slots (i, j) of an n-slot space (0-based).
ComplexMatrix place_two_slot(const ComplexMatrix& v, int i, int j, int n, int d);

/// Trace out the slots not listed in `keep` (0-based). The kept slots stay in
/// their original relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep);

/// Largest singular value.
double op_norm(const ComplexMatrix& m);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// e^{iHt/ħ} X e^{-iHt/ħ}.
ComplexMatrix propagate(const ComplexMatrix& h, double t, double hbar, const ComplexMatrix& x);
ComplexMatrix propagate(const HermitianSpectrum& spec, double t, double hbar,
                        const ComplexMatrix& x);

/// e^{iHt/ħ} from a precomputed spectrum.
ComplexMatrix unitary(const HermitianSpectrum& spec, double t, double hbar);

/// [a, b]
inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

}  // namespace mfl
