#include "topochain/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "topochain/model.hpp"
#include "test_helpers.hpp"

using namespace topochain;
using test_helpers::random_hermitian;
using test_helpers::random_state;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Eigh, ZeroMatrix) {
  const auto es = numerics::eigh(CMatrix::Zero(2, 2));
  EXPECT_EQ(es.eigenvalues[0], 0.0);
  EXPECT_EQ(es.eigenvalues[1], 0.0);
  EXPECT_LT((es.eigenvectors - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Eigh, SshBlochAtZeroMomentum) {
  // h(q=0) with J1 = J2 = 1: d_x = 2, d_y = 0 -> eigenvalues -2, +2.
  CMatrix h(2, 2);
  h << 0, 2, 2, 0;
  const auto es = numerics::eigh(h);
  EXPECT_NEAR(es.eigenvalues[0], -2.0, 1e-14);
  EXPECT_NEAR(es.eigenvalues[1], 2.0, 1e-14);
}

TEST(Eigh, SingleCellThreeSite) {
  // One p = 3 cell with J = 3/2: eigenvalues -sqrt(2) J, 0, +sqrt(2) J.
  const double j = 1.5;
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = j;
  h(1, 2) = h(2, 1) = j;
  const auto es = numerics::eigh(h);
  EXPECT_NEAR(es.eigenvalues[0], -2.1213203435596424, 1e-12);
  EXPECT_NEAR(es.eigenvalues[1], 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues[2], 2.1213203435596424, 1e-12);
}

TEST(Eigh, EigenSystemInvariants) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 12);
    const CMatrix h = random_hermitian(dim, rng);
    const auto es = numerics::eigh(h);
    for (int i = 0; i + 1 < dim; ++i) EXPECT_LE(es.eigenvalues[i], es.eigenvalues[i + 1]);
    const double unitarity =
        (es.eigenvectors.adjoint() * es.eigenvectors - CMatrix::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff();
    EXPECT_LT(unitarity, 1e-10);
    const CMatrix rebuilt =
        es.eigenvectors * es.eigenvalues.asDiagonal() * es.eigenvectors.adjoint();
    const double scale = h.cwiseAbs().maxCoeff();
    EXPECT_LT((rebuilt - h).cwiseAbs().maxCoeff(), 1e-10 * std::max(scale, 1.0));
  }
}

TEST(Eigh, RejectsNonHermitian) {
  CMatrix h(2, 2);
  h << 0, 1, 2, 0;
  try {
    numerics::eigh(h);
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("1.0"), std::string::npos);
  }
}

TEST(Eigh, RejectsNonSquare) {
  EXPECT_THROW(numerics::eigh(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST(EvolveSpectral, TimeZeroIsIdentity) {
  std::mt19937_64 rng(7);
  const CMatrix h = random_hermitian(6, rng);
  const StateVector psi = random_state(6, rng);
  const StateVector out = numerics::evolve_spectral(h, psi, 0.0);
  EXPECT_LT((out - psi).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EvolveSpectral, ZeroGenerator) {
  std::mt19937_64 rng(8);
  const StateVector psi = random_state(5, rng);
  const StateVector out = numerics::evolve_spectral(CMatrix::Zero(5, 5), psi, 3.7);
  EXPECT_LT((out - psi).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EvolveSpectral, TwoSiteRabiTransfer) {
  // Closed form: psi_a(t) = cos(J t), psi_b(t) = -i sin(J t).
  CMatrix h(2, 2);
  h << 0, 1, 1, 0;
  StateVector psi(2);
  psi << 1, 0;
  const StateVector quarter = numerics::evolve_spectral(h, psi, kPi / 2.0);
  EXPECT_NEAR(std::abs(quarter[0]), 0.0, 1e-12);
  EXPECT_NEAR(quarter[1].real(), 0.0, 1e-12);
  EXPECT_NEAR(quarter[1].imag(), -1.0, 1e-12);

  const double t = 0.83;
  const StateVector out = numerics::evolve_spectral(h, psi, t);
  EXPECT_NEAR(out[0].real(), std::cos(t), 1e-12);
  EXPECT_NEAR(out[1].imag(), -std::sin(t), 1e-12);
}

TEST(EvolveSpectral, RejectsDimensionMismatch) {
  EXPECT_THROW(numerics::evolve_spectral(CMatrix::Zero(3, 3), StateVector::Zero(2), 1.0),
               std::invalid_argument);
}

TEST(EvolveSpectral, UnitarityAndEnergyConservation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> tdist(0.0, 25.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 10);
    const CMatrix h = random_hermitian(dim, rng);
    const StateVector psi = random_state(dim, rng);
    const double t = tdist(rng);
    const StateVector out = numerics::evolve_spectral(h, psi, t);
    EXPECT_LT(std::abs(out.norm() - 1.0), 1e-9);
    const double e0 = psi.dot(h * psi).real();
    const double e1 = out.dot(h * out).real();
    EXPECT_NEAR(e0, e1, 1e-9);
  }
}

numerics::HamiltonianSchedule smooth_schedule(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  const CMatrix a = random_hermitian(dim, rng);
  const CMatrix b = random_hermitian(dim, rng);
  return [a, b](double t) { return (a + std::cos(0.7 * t) * b).eval(); };
}

TEST(EvolveSchedule, ConstantGeneratorMatchesSpectral) {
  std::mt19937_64 rng(13);
  const CMatrix h = random_hermitian(8, rng);
  const StateVector psi = random_state(8, rng);
  const StateVector direct = numerics::evolve_spectral(h, psi, 4.2);
  const StateVector stepped =
      numerics::evolve_schedule([&](double) { return h; }, psi, 0.0, 4.2, 37);
  EXPECT_LT((direct - stepped).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EvolveSchedule, SingleStepIsMidpointPropagation) {
  const auto h_of_t = smooth_schedule(5, 17);
  std::mt19937_64 rng(18);
  const StateVector psi = random_state(5, rng);
  const StateVector one = numerics::evolve_schedule(h_of_t, psi, 0.3, 1.9, 1);
  const StateVector direct = numerics::evolve_spectral(h_of_t(0.5 * (0.3 + 1.9)), psi, 1.9 - 0.3);
  EXPECT_LT((one - direct).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EvolveSchedule, RejectsNonPositiveSteps) {
  const auto h_of_t = smooth_schedule(3, 19);
  std::mt19937_64 rng(20);
  const StateVector psi = random_state(3, rng);
  EXPECT_THROW(numerics::evolve_schedule(h_of_t, psi, 0.0, 1.0, 0), std::invalid_argument);
}

TEST(EvolveSchedule, SecondOrderConvergence) {
  // Successive step-doubling errors shrink by ~4 for a smooth schedule.
  const auto h_of_t = smooth_schedule(6, 23);
  std::mt19937_64 rng(24);
  const StateVector psi = random_state(6, rng);
  const auto c1 = numerics::schedule_convergence_check(h_of_t, psi, 0.0, 6.0, 64);
  const auto c2 = numerics::schedule_convergence_check(h_of_t, psi, 0.0, 6.0, 128);
  const double ratio = c1.max_diff / c2.max_diff;
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(EvolveSchedule, NormPreservedOverLongRamp) {
  const auto h_of_t = smooth_schedule(7, 29);
  std::mt19937_64 rng(30);
  const StateVector psi = random_state(7, rng);
  const StateVector out = numerics::evolve_schedule(h_of_t, psi, 0.0, 40.0, 2048);
  EXPECT_LT(std::abs(out.norm() - 1.0), 1e-9);
}

TEST(EvolveSchedule, ObserverSeesEveryStep) {
  const auto h_of_t = smooth_schedule(4, 31);
  std::mt19937_64 rng(32);
  const StateVector psi = random_state(4, rng);
  int calls = 0;
  double last_t = -1.0;
  numerics::evolve_schedule(h_of_t, psi, 0.0, 2.0, 16,
                            [&](int step, double t_end, const numerics::EigenSystem& es,
                                const StateVector& state) {
                              EXPECT_EQ(step, calls);
                              EXPECT_GT(t_end, last_t);
                              EXPECT_EQ(es.eigenvectors.rows(), 4);
                              EXPECT_LT(std::abs(state.norm() - 1.0), 1e-9);
                              last_t = t_end;
                              ++calls;
                            });
  EXPECT_EQ(calls, 16);
  EXPECT_NEAR(last_t, 2.0, 1e-12);
}

}  // namespace
