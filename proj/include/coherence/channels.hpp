#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coherence/qstate.hpp"

namespace coherence {

inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kPatternZeroTol = 1e-12;

/// Thrown when sum_n K_n^dagger K_n differs from the identity.
class IncompleteKrausError : public InvariantError {
public:
  IncompleteKrausError(const std::string& what, double residual)
      : InvariantError(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Nonempty ordered list of d x d Kraus operators satisfying completeness.
class KrausSet {
public:
  static KrausSet from_operators(std::vector<ComplexMatrix> ops,
                                 double completeness_tol = kCompletenessTol);

  int dim() const { return dim_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  const ComplexMatrix& operator[](std::size_t n) const { return ops_[n]; }

  /// max-norm of sum_n K_n^dagger K_n - I for arbitrary operator lists.
  static double completeness_residual(const std::vector<ComplexMatrix>& ops);

private:
  KrausSet(int dim, std::vector<ComplexMatrix> ops)
      : dim_(dim), ops_(std::move(ops)) {}
  int dim_;
  std::vector<ComplexMatrix> ops_;
};

/// sum_n K_n M K_n^dagger for any square M (no state validation).
ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& m);

/// Channel output as a validated density matrix. Trace is preserved within
/// the completeness tolerance.
DensityMatrix apply_channel(const KrausSet& kraus, const DensityMatrix& rho);

/// K_n = U_pi A_n with diagonal A_n = diag(diagonals[n]).
struct FsioChannel {
  Permutation permutation;
  std::vector<ComplexVector> diagonals;

  int dim() const { return permutation.dim(); }

  /// Throws InvariantError unless sum_n |a_ii^(n)|^2 = 1 for every i.
  void validate(double tol = kCompletenessTol) const;
};

KrausSet fsio_to_kraus(const FsioChannel& ch);

/// Uniform permutation; per basis index the factor vector over n is Haar.
FsioChannel random_fsio(int d, int n_kraus, RngSeed seed);
FsioChannel random_fsio(int d, int n_kraus, Rng& rng);

/// Incoherent Kraus set sharing one column-to-row map that is not injective
/// (FIO but not FSIO). Requires n_kraus >= 2.
KrausSet random_fio_not_fsio(int d, int n_kraus, Rng& rng);

/// Convex mixture of FSIO channels with independent permutations
/// (SIO, generally neither FIO nor FSIO).
KrausSet random_sio_mixture(int d, int n_parts, Rng& rng);

/// Qubit generalized amplitude damping channel, four operators.
KrausSet gad_channel(double p, double eps);

/// Positions with modulus above the zero tolerance.
struct SparsityPattern {
  int dim = 0;
  std::vector<std::pair<int, int>> entries; ///< (row, col), row-major order

  static SparsityPattern of(const ComplexMatrix& m, double zero_tol);
  bool contains(int row, int col) const;
};

/// Evidence that a set fails one class of the hierarchy.
struct ClassWitness {
  std::string cls;  ///< "GIO", "FSIO", "FIO", "SIO", "IO" or "MIO"
  int op = -1;      ///< Kraus index (or basis index for MIO)
  int row = -1;
  int col = -1;
  std::string detail;
};

struct ClassificationCertificate {
  /// Full permutation when fsio holds (completed on unconstrained columns).
  std::optional<Permutation> permutation;
  /// Diagonal factors a_ii^(n) = K_n[pi(i), i] when fsio holds.
  std::vector<ComplexVector> diagonal_factors;
  /// Shared column-to-row map when fio holds; -1 marks all-zero columns.
  std::vector<int> column_map;
  /// Columns whose image was chosen by the completion rule.
  std::vector<int> completed_columns;
  std::vector<ClassWitness> witnesses;
};

struct ChannelClassification {
  bool gio = false;
  bool fsio = false;
  bool fio = false;
  bool sio = false;
  bool io = false;
  bool mio = false;
  /// Minimal lattice class; "FIO+SIO" when both hold without FSIO,
  /// "NONE" when not even MIO.
  std::string most_specific;
  ClassificationCertificate certificate;

  bool lattice_consistent() const;
  /// FSIO parameters recovered from the certificate, when fsio holds.
  std::optional<FsioChannel> as_fsio() const;
};

ChannelClassification classify_kraus(const KrausSet& kraus,
                                     double zero_tol = kPatternZeroTol);

} // namespace coherence
