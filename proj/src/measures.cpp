#include "coherence/measures.hpp"

#include <cmath>

namespace coherence {

double l1_coherence(const DensityMatrix& rho) {
  const int d = rho.dim();
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) sum += std::abs(rho(i, j));
    }
  }
  return sum;
}

double g_coherence_matrix(const ComplexMatrix& m) {
  const auto d = m.rows();
  if (d < 2 || m.cols() != d) {
    throw InvariantError("g_coherence: requires a square matrix with d >= 2");
  }
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double mod = std::abs(m(i, j));
      if (mod < kModulusFloor) {
        return 0.0;
      }
      log_sum += std::log(mod);
    }
  }
  const double pairs = static_cast<double>(d * (d - 1));
  return static_cast<double>(d) * std::exp(log_sum / pairs);
}

double g_coherence(const DensityMatrix& rho) {
  return g_coherence_matrix(rho.matrix());
}

double g_coherence_vector(const ComplexVector& v) {
  const auto d = v.size();
  if (d < 2) {
    throw InvariantError("g_coherence: dimension must be >= 2");
  }
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double mod = std::abs(v(i));
    if (mod < kModulusFloor) {
      return 0.0;
    }
    log_sum += std::log(mod);
  }
  return static_cast<double>(d) * std::exp(2.0 * log_sum / static_cast<double>(d));
}

double g_coherence_pure(const PureState& psi) {
  return g_coherence_vector(psi.amplitudes());
}

double Ensemble::total_probability() const {
  double s = 0.0;
  for (const auto& m : members) s += m.p;
  return s;
}

ComplexMatrix Ensemble::mixture() const {
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const auto& m : members) {
    const ComplexVector& a = m.state.amplitudes();
    out.noalias() += m.p * (a * a.adjoint());
  }
  return out;
}

double Ensemble::reconstruction_error(const DensityMatrix& target) const {
  return max_abs(mixture() - target.matrix());
}

double average_g(const Ensemble& ensemble) {
  double s = 0.0;
  for (const auto& m : ensemble.members) {
    s += m.p * g_coherence_pure(m.state);
  }
  return s;
}

MonotonicityCheck check_strong_monotonicity_g(const DensityMatrix& rho,
                                              const KrausSet& kraus) {
  if (rho.dim() != kraus.dim()) {
    throw InvariantError("check_strong_monotonicity_g: dimension mismatch");
  }
  MonotonicityCheck out{g_coherence(rho), 0.0, false};
  for (const auto& k : kraus.operators()) {
    const ComplexMatrix branch = k * rho.matrix() * k.adjoint();
    const double q = branch.trace().real();
    if (q > 1e-14) {
      out.rhs += q * g_coherence_matrix(branch / q);
    }
  }
  out.holds = out.rhs <= out.lhs + 1e-9;
  return out;
}

double amgm_kernel(const FsioChannel& ch) {
  const int d = ch.dim();
  double total = 0.0;
  for (const auto& a : ch.diagonals) {
    double log_sum = 0.0;
    bool zero = false;
    for (int i = 0; i < d; ++i) {
      const double w = std::norm(a(i));
      if (w < kModulusFloor) {
        zero = true;
        break;
      }
      log_sum += std::log(w);
    }
    if (!zero) total += std::exp(log_sum / d);
  }
  return total;
}

} // namespace coherence
