#include <doctest.h>

#include <cmath>

#include "coherence/channels.hpp"
#include "coherence/measures.hpp"
#include "oracles.hpp"

using namespace coherence;

namespace {

PureState state_08() {
  ComplexVector v(2);
  v << std::sqrt(0.8), std::sqrt(0.2);
  return PureState::from_amplitudes(v);
}

DensityMatrix diagonal(std::initializer_list<double> p) {
  const int d = static_cast<int>(p.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  int i = 0;
  for (double x : p) m(i, i) = x, ++i;
  return DensityMatrix::from_matrix(m);
}

} // namespace

TEST_SUITE("measures") {

TEST_CASE("l1 coherence") {
  CHECK(l1_coherence(diagonal({0.5, 0.5})) == 0.0);
  CHECK(l1_coherence(projector(maximally_coherent_state(2))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l1_coherence(projector(state_08())) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("G coherence anchors") {
  for (int d = 2; d <= 8; ++d) {
    CHECK(std::abs(g_coherence(projector(maximally_coherent_state(d))) - 1.0) <= 1e-12);
    CHECK(std::abs(g_coherence_pure(maximally_coherent_state(d)) - 1.0) <= 1e-12);
  }
  CHECK(g_coherence(diagonal({0.2, 0.3, 0.5})) == 0.0);
  CHECK(std::abs(g_coherence(projector(state_08())) - 0.8) <= 1e-14);
  CHECK(std::abs(g_coherence_pure(state_08()) - 0.8) <= 1e-14);

  ComplexVector e(3);
  e << 1.0, 0.0, 0.0;
  CHECK(g_coherence_pure(PureState::from_amplitudes(e)) == 0.0);
}

TEST_CASE("one vanishing off-diagonal entry zeroes G") {
  ComplexMatrix m(3, 3);
  m << 0.4, 0.1, 0.0, 0.1, 0.3, 0.1, 0.0, 0.1, 0.3;
  CHECK(g_coherence(DensityMatrix::from_matrix(m)) == 0.0);
  CHECK(l1_coherence(DensityMatrix::from_matrix(m)) > 0.0);
}

TEST_CASE("G agrees with a plain product formula") {
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const int d = rng.uniform_int(2, 8);
    const DensityMatrix rho = random_mixed_state(d, rng.uniform_int(1, d), rng);
    const double g = g_coherence(rho);
    CHECK(std::abs(g - oracle::g_product(rho.matrix())) <= 1e-12 * std::max(1.0, g));
  }
}

TEST_CASE("qubit G equals l1") {
  Rng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const DensityMatrix rho = random_mixed_state(2, rng.uniform_int(1, 2), rng);
    CHECK(std::abs(g_coherence(rho) - l1_coherence(rho)) <= 1e-12);
    CHECK(std::abs(l1_coherence(rho) - oracle::l1(rho.matrix())) <= 1e-15);
  }
}

TEST_CASE("pure closed form matches the matrix formula") {
  Rng rng(14);
  for (int t = 0; t < 500; ++t) {
    const PureState psi = random_pure_state(rng.uniform_int(2, 8), rng);
    CHECK(std::abs(g_coherence_pure(psi) - g_coherence(projector(psi))) <= 1e-12);
  }
}

TEST_CASE("G is invariant under permutation conjugation") {
  Rng rng(15);
  for (int t = 0; t < 300; ++t) {
    const int d = rng.uniform_int(2, 7);
    const DensityMatrix rho = random_mixed_state(d, rng.uniform_int(1, d), rng);
    const Permutation pi = random_permutation(d, rng);
    const ComplexMatrix moved = permute_conjugate(pi, rho.matrix());
    CHECK(std::abs(g_coherence_matrix(moved) - g_coherence(rho)) <= 1e-12);
  }
}

TEST_CASE("G is homogeneous of degree one") {
  Rng rng(16);
  for (int t = 0; t < 200; ++t) {
    const int d = rng.uniform_int(2, 6);
    const DensityMatrix rho = random_mixed_state(d, d, rng);
    const double s = 0.01 + 10.0 * rng.uniform();
    const double g = g_coherence(rho);
    CHECK(std::abs(g_coherence_matrix(s * rho.matrix()) - s * g) <= 1e-12 * s * g + 1e-300);
  }
}

TEST_CASE("tiny moduli do not underflow") {
  const int d = 8;
  ComplexVector v = ComplexVector::Constant(d, 1e-30);
  v(0) = 1.0;
  const PureState psi = PureState::normalized(v);
  const double g = g_coherence(projector(psi));
  CHECK(g > 0.0);
  CHECK(std::abs(g - g_coherence_pure(psi)) <= 1e-12 * g);
}

TEST_CASE("ensemble averages") {
  const PureState plus = maximally_coherent_state(2);
  Ensemble single{2, {{1.0, state_08()}}};
  CHECK(average_g(single) == doctest::Approx(0.8).epsilon(1e-14));

  ComplexVector e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  Ensemble basis{2, {{0.5, PureState::from_amplitudes(e0)}, {0.5, PureState::from_amplitudes(e1)}}};
  CHECK(average_g(basis) == 0.0);

  Ensemble twice{2, {{0.5, plus}, {0.5, plus}}};
  CHECK(average_g(twice) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("AM-GM kernel is bounded by one") {
  Rng rng(17);
  for (int t = 0; t < 2000; ++t) {
    const FsioChannel ch = random_fsio(rng.uniform_int(2, 6), rng.uniform_int(1, 6), rng);
    CHECK(amgm_kernel(ch) <= 1.0 + 1e-12);
  }
  // Equal weights on every index saturate the bound.
  FsioChannel flat{Permutation::identity(3),
                   {ComplexVector::Constant(3, std::sqrt(0.5)),
                    ComplexVector::Constant(3, Complex(0.0, std::sqrt(0.5)))}};
  CHECK(std::abs(amgm_kernel(flat) - 1.0) <= 1e-15);
}

TEST_CASE("strong monotonicity of G") {
  const DensityMatrix rho = random_mixed_state(3, 3, RngSeed{18});
  const KrausSet id = KrausSet::from_operators({ComplexMatrix::Identity(3, 3)});
  const MonotonicityCheck same = check_strong_monotonicity_g(rho, id);
  CHECK(std::abs(same.lhs - same.rhs) <= 1e-15);
  CHECK(same.holds);

  Rng rng(19);
  const KrausSet ch = fsio_to_kraus(random_fsio(3, 3, rng));
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const DensityMatrix sample = random_mixed_state(3, rng.uniform_int(1, 3), rng);
    if (!check_strong_monotonicity_g(sample, ch).holds) ++violations;
  }
  CHECK(violations == 0);

  for (int t = 0; t < 500; ++t) {
    const int d = rng.uniform_int(2, 6);
    const KrausSet k = fsio_to_kraus(random_fsio(d, rng.uniform_int(1, 6), rng));
    CHECK(check_strong_monotonicity_g(random_mixed_state(d, rng.uniform_int(1, d), rng), k).holds);
  }
}

TEST_CASE("monotonicity check rejects mismatched dimensions") {
  const KrausSet id = KrausSet::from_operators({ComplexMatrix::Identity(2, 2)});
  CHECK_THROWS_AS(check_strong_monotonicity_g(random_mixed_state(3, 3, RngSeed{1}), id),
                  InvariantError);
}

}
