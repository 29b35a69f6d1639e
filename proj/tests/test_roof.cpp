#include <doctest.h>

#include <cmath>

#include "coherence/measures.hpp"
#include "oracles.hpp"

using namespace coherence;

namespace {

void check_result_contract(const DensityMatrix& rho, const RoofResult& r) {
  CHECK(std::abs(r.value - average_g(r.ensemble)) <= 1e-10);
  CHECK(std::abs(r.ensemble.total_probability() - 1.0) <= 1e-10);
  CHECK(r.ensemble.reconstruction_error(rho) <= 1e-8);
  CHECK(r.lower_bound <= r.value);
  for (const auto& m : r.ensemble.members) {
    CHECK(m.p >= 0.0);
    CHECK(std::abs(m.state.amplitudes().norm() - 1.0) <= 1e-12);
  }
}

double eigen_ensemble_average(const DensityMatrix& rho) {
  const Eigensystem es = eigendecompose(rho);
  const int r = es.numerical_rank();
  return isometry_objective(es, ComplexMatrix::Identity(r, r));
}

} // namespace

TEST_SUITE("roof") {

TEST_CASE("rank-one inputs are exact") {
  Rng rng(40);
  for (int t = 0; t < 20; ++t) {
    const PureState psi = random_pure_state(rng.uniform_int(2, 5), rng);
    const RoofResult r = convex_roof_g(projector(psi));
    CHECK(std::abs(r.value - g_coherence_pure(psi)) <= 1e-10);
    CHECK(r.converged);
    CHECK(r.ensemble.members.size() == 1);
  }
}

TEST_CASE("incoherent input has zero roof") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.3;
  m(1, 1) = 0.7;
  const DensityMatrix rho = DensityMatrix::from_matrix(m);
  const RoofResult r = convex_roof_g(rho);
  CHECK(r.value <= 1e-14);
  check_result_contract(rho, r);
}

TEST_CASE("qubit roof matches l1 and beats random decompositions") {
  Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = random_mixed_state(2, 2, rng);
    const RoofResult r = convex_roof_g(rho);
    check_result_contract(rho, r);
    CHECK(r.converged);
    CHECK(r.value <= eigen_ensemble_average(rho) + 1e-10);
    CHECK(std::abs(r.value - oracle::l1(rho.matrix())) <= 1e-6);
    const double sampled = oracle::best_random_decomposition(rho.matrix(), 2, 10000, 500 + t);
    CHECK(r.value <= sampled + 1e-8);
  }
}

TEST_CASE("qutrit rank-two roof is certified") {
  Rng rng(42);
  for (int t = 0; t < 4; ++t) {
    const DensityMatrix rho = random_mixed_state(3, 2, rng);
    const RoofResult r = convex_roof_g(rho);
    check_result_contract(rho, r);
    CHECK(r.converged);
    CHECK(r.value - r.lower_bound <= 1e-6);
    CHECK(r.value <= eigen_ensemble_average(rho) + 1e-10);
    const double sampled = oracle::best_random_decomposition(rho.matrix(), 2, 2000, 600 + t);
    CHECK(r.value <= sampled + 1e-8);
  }
}

TEST_CASE("eigen-ensemble objective matches the oracle") {
  Rng rng(43);
  oracle::Sampler s(43);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_mixed_state(3, 2, rng);
    const Eigensystem es = eigendecompose(rho);
    const Eigen::MatrixXcd v = s.isometry(4, 2);
    // Eigenvector phases differ between solvers; the eigen-ensemble itself
    // does not depend on them.
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    CHECK(std::abs(isometry_objective(es, id) -
                   oracle::decomposition_average(rho.matrix(), Eigen::MatrixXcd::Identity(2, 2))) <=
          1e-10);
    const Ensemble ens = isometry_ensemble(es, v);
    CHECK(ens.reconstruction_error(rho) <= 1e-12);
    CHECK(std::abs(average_g(ens) - isometry_objective(es, v)) <= 1e-12);
  }
}

TEST_CASE("results are deterministic for a fixed seed") {
  const DensityMatrix rho = random_mixed_state(3, 2, RngSeed{44});
  const RoofResult a = convex_roof_g(rho);
  const RoofResult b = convex_roof_g(rho);
  CHECK(a.value == b.value);
  CHECK(a.ensemble.members.size() == b.ensemble.members.size());
}

TEST_CASE("convexity within optimizer tolerance") {
  Rng rng(45);
  for (int t = 0; t < 3; ++t) {
    const DensityMatrix a = random_mixed_state(2, rng.uniform_int(1, 2), rng);
    const DensityMatrix b = random_mixed_state(2, rng.uniform_int(1, 2), rng);
    const double w = rng.uniform();
    RoofOptions opts;
    const double lhs = convex_roof_g(mix(a, b, w), opts).value;
    const double rhs = w * convex_roof_g(a, opts).value + (1 - w) * convex_roof_g(b, opts).value;
    CHECK(lhs <= rhs + 2 * opts.tol);
  }
}

TEST_CASE("invalid options are rejected") {
  RoofOptions opts;
  opts.restarts = 0;
  CHECK_THROWS_AS(convex_roof_g(random_mixed_state(2, 2, RngSeed{1}), opts), InvariantError);
}

}
