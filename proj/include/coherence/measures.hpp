#pragma once

#include <stdexcept>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/qstate.hpp"

namespace coherence {

/// Moduli below this are treated as exact zeros by the G-coherence.
inline constexpr double kModulusFloor = 1e-300;

/// Sum of off-diagonal moduli.
double l1_coherence(const DensityMatrix& rho);

/// d times the geometric mean of the d(d-1) off-diagonal moduli, evaluated
/// in the log domain. Exactly zero when any off-diagonal entry vanishes.
double g_coherence(const DensityMatrix& rho);

/// Same formula on an arbitrary square matrix (no state validation). Degree-1
/// homogeneous: g_coherence_matrix(s * M) = s * g_coherence_matrix(M), s > 0.
double g_coherence_matrix(const ComplexMatrix& m);

/// Closed form for pure states: d * prod_i |a_i|^(2/d).
double g_coherence_pure(const PureState& psi);

/// Homogeneous pure-state form d * prod_i |v_i|^(2/d) for an unnormalized
/// vector v; equals g_coherence_matrix(v v^dagger).
double g_coherence_vector(const ComplexVector& v);

struct EnsembleMember {
  double p;
  PureState state;
};

/// Pure-state decomposition {p_k, psi_k}.
struct Ensemble {
  int dim = 0;
  std::vector<EnsembleMember> members;

  double total_probability() const;
  /// sum_k p_k |psi_k><psi_k|.
  ComplexMatrix mixture() const;
  /// Max-norm distance between the mixture and `target`.
  double reconstruction_error(const DensityMatrix& target) const;
};

double average_g(const Ensemble& ensemble);

/// Settings for the convex-roof decomposition search.
struct RoofOptions {
  int restarts = 20;
  double tol = 1e-8;
  RngSeed seed = 0x9d2c5680u;
  /// Smallest rotation angle tried by the per-restart isometry search.
  double local_min_step = 1e-8;
  /// Objective evaluations allowed per restart of the isometry search.
  long local_max_evaluations = 50000;
  /// Column-generation rounds of the pooled linear program.
  int max_rounds = 80;
};

struct RoofResult {
  double value = 0.0;   ///< average G of `ensemble`; an upper bound on the roof
  Ensemble ensemble;
  int restarts_used = 0;
  /// value - lower_bound <= 100 * tol.
  bool converged = false;
  /// Dual estimate tr(Y rho) + min_psi [G(psi) - <psi|Y|psi>]; a true lower
  /// bound whenever the pricing minimum was found globally.
  double lower_bound = 0.0;
  /// Final value of each isometry restart, in restart order.
  std::vector<double> restart_values;
};

/// Raised when the decomposition search cannot produce a valid ensemble.
class OptimizerFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Upper bound on the convex roof of G.
///
/// For rank-r rho = sum_j l_j |e_j><e_j|, every size-m decomposition has
/// unnormalized members psi_k = sum_j V_kj sqrt(l_j) e_j for an m x r isometry
/// V. Each restart runs a compass search over V (m = r^2) by complex Givens
/// rotations of member pairs. The members found seed a pool of candidate pure
/// states in the support; a linear program then picks the best mixture of the
/// pool reproducing rho, and column generation adds states with negative
/// reduced cost until the dual certificate closes. Rank-1 inputs are exact.
RoofResult convex_roof_g(const DensityMatrix& rho, const RoofOptions& opts = {});

/// Average G of the decomposition generated by an m x r isometry `v` over the
/// eigensystem of `rho` (rows of v index members). Exposed for the tests.
double isometry_objective(const Eigensystem& eig, const ComplexMatrix& v);

/// Ensemble generated by an m x r isometry over the eigensystem.
Ensemble isometry_ensemble(const Eigensystem& eig, const ComplexMatrix& v);

struct MonotonicityCheck {
  double lhs;  ///< G(rho)
  double rhs;  ///< sum_n q_n G(K_n rho K_n^dagger / q_n)
  bool holds;  ///< rhs <= lhs + 1e-9
};

/// Strong monotonicity test of G under a Kraus set.
MonotonicityCheck check_strong_monotonicity_g(const DensityMatrix& rho,
                                              const KrausSet& kraus);

/// sum_n prod_i (|a_ii^(n)|^2)^(1/d) for FSIO diagonal factors; bounded by 1.
double amgm_kernel(const FsioChannel& ch);

} // namespace coherence
