#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coherence/rng.hpp"

namespace coherence {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when an input violates a documented type invariant or precondition.
class InvariantError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Absolute tolerances used when validating states.
struct StateTolerances {
  double normalization = 1e-12;
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double min_eigenvalue = -1e-10;
};

/// Largest entrywise modulus of a matrix, 0 for an empty matrix.
double max_abs(const ComplexMatrix& m);

/// A normalized vector in C^d, d >= 2.
class PureState {
public:
  /// Validates dimension and normalization; throws InvariantError otherwise.
  static PureState from_amplitudes(ComplexVector amplitudes,
                                   const StateTolerances& tol = {});

  /// Rescales a nonzero vector to unit norm.
  static PureState normalized(const ComplexVector& v);

  int dim() const { return static_cast<int>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  Complex operator[](int i) const { return amps_(i); }

private:
  explicit PureState(ComplexVector amps) : amps_(std::move(amps)) {}
  ComplexVector amps_;
};

/// Hermitian, unit-trace, positive-semidefinite d x d matrix.
class DensityMatrix {
public:
  static DensityMatrix from_matrix(ComplexMatrix rho,
                                   const StateTolerances& tol = {});

  int dim() const { return static_cast<int>(rho_.rows()); }
  const ComplexMatrix& matrix() const { return rho_; }
  Complex operator()(int i, int j) const { return rho_(i, j); }

  /// trace(rho^2).
  double purity() const;

private:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {}
  ComplexMatrix rho_;
};

/// Bijection on {0..d-1}; map()[i] is the row that column i is sent to.
class Permutation {
public:
  explicit Permutation(std::vector<int> map);
  static Permutation identity(int d);

  int dim() const { return static_cast<int>(map_.size()); }
  int operator[](int i) const { return map_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& map() const { return map_; }

  Permutation inverse() const;
  /// (this ∘ other)(i) = this[other[i]].
  Permutation compose(const Permutation& other) const;
  /// U_pi = sum_i |pi(i)><i|.
  ComplexMatrix to_matrix() const;

  bool operator==(const Permutation&) const = default;

private:
  std::vector<int> map_;
};

/// Uniformly random permutation of {0..d-1} (Fisher-Yates).
Permutation random_permutation(int d, Rng& rng);

/// U_pi rho U_pi^dagger computed from the index form.
ComplexMatrix permute_conjugate(const Permutation& pi, const ComplexMatrix& m);

PureState maximally_coherent_state(int d);
PureState random_pure_state(int d, RngSeed seed);
PureState random_pure_state(int d, Rng& rng);

/// Ginibre ensemble of rank <= r: rho = G G^dagger / trace(G G^dagger).
DensityMatrix random_mixed_state(int d, int rank, RngSeed seed);
DensityMatrix random_mixed_state(int d, int rank, Rng& rng);

/// d x d Haar-distributed unitary (QR of a Ginibre matrix, phase-fixed).
ComplexMatrix random_unitary(int d, Rng& rng);

DensityMatrix projector(const PureState& psi);

struct Eigensystem {
  RealVector values;     ///< descending, clamped to zero below 1e-12
  ComplexMatrix vectors; ///< column j pairs with values(j)

  int numerical_rank() const;
};

/// Spectral decomposition with clamping of eigenvalues below `clamp` to zero
/// and renormalization of the retained spectrum to unit trace.
Eigensystem eigendecompose(const DensityMatrix& rho, double clamp = 1e-12);

/// Eigendecomposition of a raw Hermitian matrix (no clamping). Throws
/// InvariantError if `m` is not Hermitian within `hermiticity_tol`.
Eigensystem eigendecompose_hermitian(const ComplexMatrix& m,
                                     double hermiticity_tol = 1e-12);

/// Convex combination w * a + (1 - w) * b.
DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double w);

} // namespace coherence
