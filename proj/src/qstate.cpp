#include "coherence/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace coherence {

namespace {

void require_dim(int d, const char* what) {
  if (d < 2) {
    std::ostringstream msg;
    msg << what << ": dimension must be >= 2, got " << d;
    throw InvariantError(msg.str());
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  return h;
}

} // namespace

double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      best = std::max(best, std::abs(m(i, j)));
    }
  }
  return best;
}

// ---------------------------------------------------------------- PureState

PureState PureState::from_amplitudes(ComplexVector amplitudes,
                                     const StateTolerances& tol) {
  require_dim(static_cast<int>(amplitudes.size()), "PureState");
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    if (!std::isfinite(amplitudes(i).real()) ||
        !std::isfinite(amplitudes(i).imag())) {
      throw InvariantError("PureState: amplitude " + std::to_string(i) +
                           " is not finite");
    }
  }
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol.normalization) {
    std::ostringstream msg;
    msg << "PureState: sum |a_i|^2 = " << norm2 << " deviates from 1 by more than "
        << tol.normalization;
    throw InvariantError(msg.str());
  }
  return PureState(std::move(amplitudes));
}

PureState PureState::normalized(const ComplexVector& v) {
  require_dim(static_cast<int>(v.size()), "PureState");
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvariantError("PureState: cannot normalize a zero or non-finite vector");
  }
  return PureState(v / n);
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix rho,
                                         const StateTolerances& tol) {
  if (rho.rows() != rho.cols()) {
    throw InvariantError("DensityMatrix: matrix is not square");
  }
  require_dim(static_cast<int>(rho.rows()), "DensityMatrix");
  const auto d = rho.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Complex z = rho(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        std::ostringstream msg;
        msg << "DensityMatrix: entry (" << i << "," << j << ") is not finite";
        throw InvariantError(msg.str());
      }
      const double skew = std::abs(z - std::conj(rho(j, i)));
      if (skew > tol.hermiticity) {
        std::ostringstream msg;
        msg << "DensityMatrix: not Hermitian at (" << i << "," << j
            << "), |rho_ij - conj(rho_ji)| = " << skew;
        throw InvariantError(msg.str());
      }
    }
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << tr.real() << "+" << tr.imag()
        << "i deviates from 1";
    throw InvariantError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      Eigen::MatrixXcd(hermitian_part(rho)), Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < tol.min_eigenvalue) {
    std::ostringstream msg;
    msg << "DensityMatrix: not positive semidefinite, min eigenvalue " << min_ev;
    throw InvariantError(msg.str());
  }
  return DensityMatrix(std::move(rho));
}

double DensityMatrix::purity() const {
  return (rho_ * rho_).trace().real();
}

// -------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t i = 0; i < map_.size(); ++i) {
    const int target = map_[i];
    if (target < 0 || static_cast<std::size_t>(target) >= map_.size() ||
        seen[static_cast<std::size_t>(target)]) {
      throw InvariantError("Permutation: map is not a bijection (entry " +
                           std::to_string(i) + ")");
    }
    seen[static_cast<std::size_t>(target)] = true;
  }
}

Permutation Permutation::identity(int d) {
  std::vector<int> map(static_cast<std::size_t>(d));
  std::iota(map.begin(), map.end(), 0);
  return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) {
    inv[static_cast<std::size_t>(map_[i])] = static_cast<int>(i);
  }
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.dim() != dim()) {
    throw InvariantError("Permutation::compose: dimension mismatch");
  }
  std::vector<int> out(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) {
    out[i] = map_[static_cast<std::size_t>(other.map_[i])];
  }
  return Permutation(std::move(out));
}

ComplexMatrix Permutation::to_matrix() const {
  const int d = dim();
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    u((*this)[i], i) = 1.0;
  }
  return u;
}

Permutation random_permutation(int d, Rng& rng) {
  std::vector<int> map(static_cast<std::size_t>(d));
  std::iota(map.begin(), map.end(), 0);
  for (int i = d - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  }
  return Permutation(std::move(map));
}

ComplexMatrix permute_conjugate(const Permutation& pi, const ComplexMatrix& m) {
  const int d = pi.dim();
  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out(pi[i], pi[j]) = m(i, j);
    }
  }
  return out;
}

// --------------------------------------------------------------- generators

PureState maximally_coherent_state(int d) {
  require_dim(d, "maximally_coherent_state");
  ComplexVector v = ComplexVector::Constant(d, Complex(1.0 / std::sqrt(d), 0.0));
  return PureState::from_amplitudes(std::move(v));
}

PureState random_pure_state(int d, Rng& rng) {
  require_dim(d, "random_pure_state");
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) {
    v(i) = rng.complex_normal();
  }
  return PureState::normalized(v);
}

PureState random_pure_state(int d, RngSeed seed) {
  Rng rng(seed);
  return random_pure_state(d, rng);
}

DensityMatrix random_mixed_state(int d, int rank, Rng& rng) {
  require_dim(d, "random_mixed_state");
  if (rank < 1 || rank > d) {
    throw InvariantError("random_mixed_state: rank " + std::to_string(rank) +
                         " outside [1, " + std::to_string(d) + "]");
  }
  ComplexMatrix g(d, rank);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < rank; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  rho = hermitian_part(rho);
  rho /= rho.trace().real();
  for (int i = 0; i < d; ++i) {
    rho(i, i) = Complex(rho(i, i).real(), 0.0);
  }
  return DensityMatrix::from_matrix(std::move(rho));
}

DensityMatrix random_mixed_state(int d, int rank, RngSeed seed) {
  Rng rng(seed);
  return random_mixed_state(d, rank, rng);
}

ComplexMatrix random_unitary(int d, Rng& rng) {
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  // Multiply column j by the phase of R_jj so the distribution is Haar.
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) {
      q.col(j) *= rjj / mag;
    }
  }
  return q;
}

DensityMatrix projector(const PureState& psi) {
  const ComplexVector& a = psi.amplitudes();
  ComplexMatrix rho = a * a.adjoint();
  for (int i = 0; i < psi.dim(); ++i) {
    rho(i, i) = Complex(std::norm(a(i)), 0.0);
  }
  return DensityMatrix::from_matrix(std::move(rho));
}

// ---------------------------------------------------------- eigen routines

int Eigensystem::numerical_rank() const {
  return static_cast<int>((values.array() > 0.0).count());
}

Eigensystem eigendecompose_hermitian(const ComplexMatrix& m,
                                     double hermiticity_tol) {
  if (m.rows() != m.cols()) {
    throw InvariantError("eigendecompose: matrix is not square");
  }
  const double skew = max_abs(m - m.adjoint());
  if (skew > hermiticity_tol) {
    throw InvariantError("eigendecompose: matrix is not Hermitian (skew " +
                         std::to_string(skew) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{
      Eigen::MatrixXcd(hermitian_part(m))};
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose: solver did not converge");
  }
  const auto n = m.rows();
  Eigensystem out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = es.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  return out;
}

Eigensystem eigendecompose(const DensityMatrix& rho, double clamp) {
  Eigensystem es = eigendecompose_hermitian(rho.matrix());
  double kept = 0.0;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    if (es.values(j) < clamp) {
      es.values(j) = 0.0;
    }
    kept += es.values(j);
  }
  es.values /= kept;
  return es;
}

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double w) {
  if (a.dim() != b.dim()) {
    throw InvariantError("mix: dimension mismatch");
  }
  if (w < 0.0 || w > 1.0) {
    throw InvariantError("mix: weight outside [0, 1]");
  }
  ComplexMatrix m = w * a.matrix() + (1.0 - w) * b.matrix();
  return DensityMatrix::from_matrix(std::move(m));
}

} // namespace coherence
