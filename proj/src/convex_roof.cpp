#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "coherence/measures.hpp"
#include "simplex.hpp"

namespace coherence {

namespace {

// Rows of the returned r x d matrix are sqrt(lambda_j) e_j^T.
ComplexMatrix weighted_eigenrows(const Eigensystem& eig, int rank) {
  const auto d = eig.vectors.rows();
  ComplexMatrix b(rank, d);
  for (int j = 0; j < rank; ++j) {
    b.row(j) = std::sqrt(eig.values(j)) * eig.vectors.col(j).transpose();
  }
  return b;
}

double row_cost(const ComplexMatrix& members, Eigen::Index k) {
  return g_coherence_vector(members.row(k).transpose());
}

Ensemble ensemble_from_members(const ComplexMatrix& members) {
  Ensemble ens;
  ens.dim = static_cast<int>(members.cols());
  for (Eigen::Index k = 0; k < members.rows(); ++k) {
    const ComplexVector v = members.row(k).transpose();
    const double p = v.squaredNorm();
    if (p <= 0.0) continue;
    ens.members.push_back({p, PureState::normalized(v)});
  }
  return ens;
}

// ------------------------------------------------------ isometry restarts

struct RestartOutcome {
  ComplexMatrix members;
  double value;
};

// Compass search on the unitary group acting on the member index. Each trial
// move is exp(theta G) for a skew-Hermitian generator G supported on a pair of
// members (k, l), i.e. a complex Givens rotation of rows k and l. Rotations
// that zero one amplitude of a member are tried alongside the fixed steps.
RestartOutcome local_search(ComplexMatrix members, const RoofOptions& opts,
                            Rng& rng) {
  const auto m = members.rows();
  const auto d = members.cols();
  std::vector<double> cost(static_cast<std::size_t>(m));
  double total = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cost[static_cast<std::size_t>(k)] = row_cost(members, k);
    total += cost[static_cast<std::size_t>(k)];
  }

  ComplexVector row_k(d);
  ComplexVector row_l(d);
  long evaluations = 0;

  auto try_rotation = [&](Eigen::Index k, Eigen::Index l, double theta,
                          Complex phase) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    row_k = c * members.row(k).transpose() + (phase * s) * members.row(l).transpose();
    row_l = (-std::conj(phase) * s) * members.row(k).transpose() +
            c * members.row(l).transpose();
    const double ck = g_coherence_vector(row_k);
    const double cl = g_coherence_vector(row_l);
    ++evaluations;
    const double candidate = total - cost[static_cast<std::size_t>(k)] -
                             cost[static_cast<std::size_t>(l)] + ck + cl;
    if (candidate < total) {
      members.row(k) = row_k.transpose();
      members.row(l) = row_l.transpose();
      cost[static_cast<std::size_t>(k)] = ck;
      cost[static_cast<std::size_t>(l)] = cl;
      total = candidate;
      return true;
    }
    return false;
  };

  double step = 0.5;
  while (step >= opts.local_min_step && evaluations < opts.local_max_evaluations) {
    bool improved = false;
    const double phases[3] = {0.0, std::numbers::pi / 2.0,
                              2.0 * std::numbers::pi * rng.uniform()};
    for (Eigen::Index k = 0; k < m; ++k) {
      for (Eigen::Index l = 0; l < m; ++l) {
        if (k == l) continue;
        for (Eigen::Index i = 0; i < d; ++i) {
          const Complex vk = members(k, i);
          const Complex vl = members(l, i);
          if (std::abs(vl) < kModulusFloor || std::abs(vk) < kModulusFloor) continue;
          const double theta = std::atan(std::abs(vk) / std::abs(vl));
          const Complex phase = -(vk / std::abs(vk)) / (vl / std::abs(vl));
          improved |= try_rotation(k, l, theta, phase);
        }
        if (l < k) continue;
        for (double phi : phases) {
          const Complex phase = std::polar(1.0, phi);
          if (try_rotation(k, l, step, phase) || try_rotation(k, l, -step, phase)) {
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  double fresh = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) fresh += row_cost(members, k);
  return {std::move(members), fresh};
}

// ---------------------------------------------------- pooled decomposition

// Pure states in the support are coordinate vectors phi in C^r over the
// eigenbasis. A pool column carries the r^2 real moments of phi phi^dagger.
class SupportPool {
public:
  SupportPool(const Eigensystem& eig, int rank)
      : rank_(rank), basis_(eig.vectors.leftCols(rank)),
        target_(Eigen::VectorXd::Zero(rank * rank)) {
    for (int j = 0; j < rank; ++j) target_(j) = eig.values(j);
  }

  int rank() const { return rank_; }
  const ComplexMatrix& basis() const { return basis_; }
  const Eigen::VectorXd& target() const { return target_; }
  const std::vector<ComplexVector>& states() const { return states_; }

  double cost(const ComplexVector& phi) const {
    return g_coherence_vector(basis_ * phi);
  }

  Eigen::VectorXd moments(const ComplexVector& phi) const {
    Eigen::VectorXd a(rank_ * rank_);
    int idx = rank_;
    for (int j = 0; j < rank_; ++j) {
      a(j) = std::norm(phi(j));
      for (int l = j + 1; l < rank_; ++l) {
        const Complex z = phi(j) * std::conj(phi(l));
        a(idx++) = z.real();
        a(idx++) = z.imag();
      }
    }
    return a;
  }

  // Coordinates of the zero set {phi : (E phi)_i = 0 for i in zeros}.
  ComplexVector project_to_zero_set(const ComplexVector& phi,
                                    const std::vector<int>& zeros) const {
    if (zeros.empty()) return phi;
    if (zeros.size() == 1) {
      const ComplexVector u = basis_.row(zeros.front()).transpose();
      const double n2 = u.squaredNorm();
      if (n2 == 0.0) return phi;
      return phi - (u.transpose() * phi)(0) * u.conjugate() / n2;
    }
    ComplexMatrix rows(static_cast<Eigen::Index>(zeros.size()), rank_);
    for (std::size_t z = 0; z < zeros.size(); ++z) {
      rows.row(static_cast<Eigen::Index>(z)) = basis_.row(zeros[z]);
    }
    // phi - R^+ R phi, with R^+ the pseudo-inverse.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod{Eigen::MatrixXcd(rows)};
    const Eigen::VectorXcd correction = cod.solve(Eigen::VectorXcd(rows * phi));
    return phi - correction;
  }

  bool add(ComplexVector phi) {
    const double n = phi.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return false;
    phi /= n;
    for (const auto& s : states_) {
      if (std::abs(s.dot(phi)) > 1.0 - 1e-15) return false;
    }
    states_.push_back(std::move(phi));
    return true;
  }

  ComplexVector from_member(const ComplexVector& x) const {
    return basis_.adjoint() * x;
  }

private:
  int rank_;
  ComplexMatrix basis_;
  Eigen::VectorXd target_;
  std::vector<ComplexVector> states_;
};

struct PricingResult {
  std::vector<ComplexVector> columns; // negative reduced cost, refined
  double min_reduced_cost;
};

// Minimizes h(phi) = G(E phi) - <moments(phi), y> over unit phi by
// multi-start compass search. Moves keep already-vanishing amplitudes of E phi
// at zero, and explicit moves project onto one more vanishing amplitude.
class Pricing {
public:
  Pricing(const SupportPool& pool, const Eigen::VectorXd& duals)
      : pool_(pool), y_(duals) {}

  double reduced_cost(const ComplexVector& phi) const {
    return pool_.cost(phi) - pool_.moments(phi).dot(y_);
  }

  std::vector<int> vanishing(const ComplexVector& phi) const {
    const ComplexVector x = pool_.basis() * phi;
    std::vector<int> zeros;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i)) < 1e-13) zeros.push_back(static_cast<int>(i));
    }
    return zeros;
  }

  ComplexVector normalize(ComplexVector phi) const {
    const double n = phi.norm();
    return n > 0.0 ? ComplexVector(phi / n) : phi;
  }

  std::pair<ComplexVector, double> refine(ComplexVector phi) const {
    const int r = pool_.rank();
    const Eigen::Index d = pool_.basis().rows();
    double best = reduced_cost(phi);
    double step = 0.2;
    double anchor = best;
    int stalled = 0;
    for (int iter = 0; iter < 800 && step > 1e-13 && stalled < 40; ++iter) {
      bool improved = false;
      auto consider = [&](const ComplexVector& cand) {
        const double h = reduced_cost(cand);
        if (h < best - 1e-16 * (1.0 + std::abs(best))) {
          best = h;
          phi = cand;
          improved = true;
        }
      };
      std::vector<int> zeros = vanishing(phi);
      for (int j = 0; j < r; ++j) {
        for (Complex dir : {Complex(1, 0), Complex(0, 1)}) {
          for (double sgn : {1.0, -1.0}) {
            ComplexVector cand = phi;
            cand(j) += sgn * step * dir;
            consider(normalize(pool_.project_to_zero_set(cand, zeros)));
          }
        }
      }
      for (Eigen::Index i = 0; i < d; ++i) {
        if (std::find(zeros.begin(), zeros.end(), i) != zeros.end()) continue;
        std::vector<int> more = zeros;
        more.push_back(static_cast<int>(i));
        if (static_cast<int>(more.size()) >= r) continue;
        consider(normalize(pool_.project_to_zero_set(phi, more)));
      }
      if (!improved) step *= 0.5;
      if (anchor - best > 1e-13) {
        anchor = best;
        stalled = 0;
      } else {
        ++stalled;
      }
    }
    return {phi, best};
  }

  // Rank-2 supports: shrinking 5 x 5 grids in the tangent plane of the Bloch
  // sphere. Narrow wells between pool columns defeat coordinate moves.
  std::pair<ComplexVector, double> zoom(ComplexVector phi) const {
    double best = reduced_cost(phi);
    double width = 0.3;
    for (int iter = 0; iter < 300 && width > 1e-10; ++iter) {
      const ComplexVector w{{-std::conj(phi(1)), std::conj(phi(0))}};
      ComplexVector arg = phi;
      bool moved = false;
      for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) {
          if (a == 0 && b == 0) continue;
          const Complex t(width * a / 2.0, width * b / 2.0);
          const ComplexVector cand = normalize(phi + t * w);
          const double h = reduced_cost(cand);
          if (h < best) {
            best = h;
            arg = cand;
            moved = true;
          }
        }
      }
      if (moved) {
        phi = arg;
      } else {
        width *= 0.5;
      }
    }
    return {phi, best};
  }

  PricingResult run(Rng& rng, const std::vector<ComplexVector>& seeds) const {
    const int r = pool_.rank();
    std::vector<std::pair<double, ComplexVector>> starts;
    auto push = [&](const ComplexVector& phi) {
      const ComplexVector u = normalize(phi);
      starts.emplace_back(reduced_cost(u), u);
    };
    for (const auto& s : seeds) push(s);
    for (int k = 0; k < 64 * r; ++k) {
      ComplexVector phi(r);
      for (int j = 0; j < r; ++j) phi(j) = rng.complex_normal();
      push(phi);
    }
    std::vector<ComplexVector> wells;
    if (r == 2) {
      // Bloch-sphere grid; its discrete local minima are refined as well.
      const int nt = 60;
      const int np = 120;
      Eigen::MatrixXd h(nt + 1, np);
      std::vector<ComplexVector> grid;
      for (int a = 0; a <= nt; ++a) {
        const double theta = std::numbers::pi * a / nt;
        for (int b = 0; b < np; ++b) {
          const double phase = 2.0 * std::numbers::pi * b / np;
          ComplexVector phi(2);
          phi(0) = std::cos(theta / 2.0);
          phi(1) = std::polar(std::sin(theta / 2.0), phase);
          h(a, b) = reduced_cost(phi);
          grid.push_back(phi);
        }
      }
      std::vector<std::pair<double, int>> minima;
      for (int a = 0; a <= nt; ++a) {
        for (int b = 0; b < np; ++b) {
          bool lowest = true;
          for (int da = -1; da <= 1 && lowest; ++da) {
            const int aa = a + da;
            if (aa < 0 || aa > nt) continue;
            for (int db = -1; db <= 1; ++db) {
              if ((da || db) && h(aa, (b + db + np) % np) < h(a, b)) {
                lowest = false;
                break;
              }
            }
          }
          if (lowest) minima.emplace_back(h(a, b), a * np + b);
        }
      }
      std::sort(minima.begin(), minima.end());
      for (std::size_t k = 0; k < minima.size() && k < 12; ++k) {
        push(grid[static_cast<std::size_t>(minima[k].second)]);
        wells.push_back(grid[static_cast<std::size_t>(minima[k].second)]);
      }
    }
    std::sort(starts.begin(), starts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t n_refine = std::min<std::size_t>(starts.size(), 8);

    PricingResult out{{}, std::numeric_limits<double>::infinity()};
    for (std::size_t s = 0; s < starts.size(); ++s) {
      out.min_reduced_cost = std::min(out.min_reduced_cost, starts[s].first);
    }
    std::vector<std::pair<ComplexVector, double>> refined;
    // Always refine the given seeds, then the most promising starts.
    if (r == 2) {
      for (const auto& s : seeds) refined.push_back(zoom(normalize(s)));
      for (const auto& w : wells) refined.push_back(zoom(w));
      for (std::size_t a = 0; a < seeds.size(); ++a) {
        for (std::size_t b = a + 1; b < seeds.size(); ++b) {
          const Complex ph = seeds[a].dot(seeds[b]);
          const Complex align = std::abs(ph) > 0.0 ? ph / std::abs(ph) : Complex(1.0);
          refined.push_back(zoom(normalize(seeds[a] * align + seeds[b])));
        }
      }
    } else {
      for (const auto& s : seeds) refined.push_back(refine(normalize(s)));
      for (std::size_t s = 0; s < n_refine; ++s) refined.push_back(refine(starts[s].second));
    }
    for (auto& [phi, h] : refined) {
      out.min_reduced_cost = std::min(out.min_reduced_cost, h);
      if (h < -1e-14) out.columns.push_back(phi);
    }
    return out;
  }

private:
  const SupportPool& pool_;
  Eigen::VectorXd y_;
};

struct PooledSolution {
  Ensemble ensemble;
  double value;
  double lower_bound;
};

PooledSolution solve_pool(SupportPool& pool, const RoofOptions& opts, Rng& rng) {
  const int r = pool.rank();
  const int rows = r * r;
  detail::LpSolution lp;
  detail::LpSolution best_lp;
  std::vector<ComplexVector> best_states;
  double lower = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < opts.max_rounds; ++round) {
    const auto& states = pool.states();
    const auto n = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd a(rows, n);
    Eigen::VectorXd c(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      a.col(k) = pool.moments(states[static_cast<std::size_t>(k)]);
      c(k) = pool.cost(states[static_cast<std::size_t>(k)]);
    }
    lp = detail::solve_standard_lp(a, pool.target(), c);
    if (lp.status != detail::LpStatus::optimal) {
      throw OptimizerFailure("convex_roof_g: decomposition LP did not reach optimality");
    }
    if (best_states.empty() || lp.value < best_lp.value) {
      best_lp = lp;
      best_states = states;
    }
    std::vector<ComplexVector> support;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (lp.x(k) > 0.0) support.push_back(states[static_cast<std::size_t>(k)]);
    }
    const Pricing pricing(pool, lp.duals);
    const PricingResult priced = pricing.run(rng, support);
    lower = pool.target().dot(lp.duals) + std::min(0.0, priced.min_reduced_cost);
    if (priced.min_reduced_cost >= -0.01 * opts.tol) break;
    bool added = false;
    for (const auto& col : priced.columns) added |= pool.add(col);
    if (!added) break;
  }

  PooledSolution out;
  out.ensemble.dim = static_cast<int>(pool.basis().rows());
  for (Eigen::Index k = 0; k < best_lp.x.size(); ++k) {
    if (best_lp.x(k) <= 1e-13) continue;
    out.ensemble.members.push_back(
        {best_lp.x(k),
         PureState::normalized(pool.basis() * best_states[static_cast<std::size_t>(k)])});
  }
  out.value = average_g(out.ensemble);
  out.lower_bound = std::min(lower, out.value);
  return out;
}

} // namespace

double isometry_objective(const Eigensystem& eig, const ComplexMatrix& v) {
  const ComplexMatrix members = v * weighted_eigenrows(eig, static_cast<int>(v.cols()));
  double total = 0.0;
  for (Eigen::Index k = 0; k < members.rows(); ++k) total += row_cost(members, k);
  return total;
}

Ensemble isometry_ensemble(const Eigensystem& eig, const ComplexMatrix& v) {
  return ensemble_from_members(v * weighted_eigenrows(eig, static_cast<int>(v.cols())));
}

RoofResult convex_roof_g(const DensityMatrix& rho, const RoofOptions& opts) {
  if (opts.restarts < 1) {
    throw InvariantError("convex_roof_g: restarts must be >= 1");
  }
  const Eigensystem eig = eigendecompose(rho);
  const int rank = eig.numerical_rank();
  RoofResult result;

  if (rank == 1) {
    const PureState top = PureState::normalized(eig.vectors.col(0));
    result.ensemble.dim = rho.dim();
    result.ensemble.members.push_back({1.0, top});
    result.value = g_coherence_pure(top);
    result.lower_bound = result.value;
    result.converged = true;
    result.restart_values.push_back(result.value);
    return result;
  }

  const int m = rank * rank;
  const ComplexMatrix basis = weighted_eigenrows(eig, rank);
  SupportPool pool(eig, rank);

  // Spanning columns: eigenvectors and their pairwise superpositions.
  for (int j = 0; j < rank; ++j) {
    ComplexVector e = ComplexVector::Zero(rank);
    e(j) = 1.0;
    pool.add(e);
  }
  for (int j = 0; j < rank; ++j) {
    for (int l = j + 1; l < rank; ++l) {
      ComplexVector plus = ComplexVector::Zero(rank);
      plus(j) = 1.0;
      plus(l) = 1.0;
      pool.add(plus);
      ComplexVector iplus = ComplexVector::Zero(rank);
      iplus(j) = 1.0;
      iplus(l) = Complex(0.0, 1.0);
      pool.add(iplus);
    }
  }
  // Vanishing-amplitude states of a rank-2 support.
  if (rank == 2) {
    for (Eigen::Index i = 0; i < pool.basis().rows(); ++i) {
      ComplexVector z(2);
      z(0) = -pool.basis()(i, 1);
      z(1) = pool.basis()(i, 0);
      pool.add(z);
    }
  }

  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(restart)));
    const ComplexMatrix v = restart == 0 ? ComplexMatrix(ComplexMatrix::Identity(m, rank))
                                         : ComplexMatrix(random_unitary(m, rng).leftCols(rank));
    RestartOutcome out = local_search(v * basis, opts, rng);
    result.restart_values.push_back(out.value);
    for (Eigen::Index k = 0; k < out.members.rows(); ++k) {
      pool.add(pool.from_member(out.members.row(k).transpose()));
    }
  }
  result.restarts_used = opts.restarts;

  Rng pricing_rng(derive_seed(opts.seed, 0xC01u));
  PooledSolution pooled = solve_pool(pool, opts, pricing_rng);
  result.ensemble = std::move(pooled.ensemble);
  result.value = pooled.value;
  result.lower_bound = pooled.lower_bound;
  result.converged = result.value - result.lower_bound <= 100.0 * opts.tol;
  return result;
}

} // namespace coherence
