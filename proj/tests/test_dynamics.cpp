#include "topochain/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace topochain;

namespace {

constexpr double kPi = std::numbers::pi;

ChainSpec ssh_chain(int n_cells, double theta) {
  return ChainSpec{2, n_cells, 1.0, 1.0, theta, Boundary::kOpen};
}

TEST(InitialState, BasisVectors) {
  const ChainSpec spec{2, 2};
  const StateVector psi = dynamics::initial_bulk_excitation(spec, 1, 1);
  EXPECT_EQ(psi[0], Complex(1, 0));
  EXPECT_EQ(psi.tail(3).cwiseAbs().maxCoeff(), 0.0);

  const ChainSpec spec3{3, 6};
  const StateVector psi3 = dynamics::initial_bulk_excitation(spec3, 3, 2);
  EXPECT_EQ(psi3[7], Complex(1, 0));  // site 8, 1-based
  EXPECT_LT(state_norm_error(psi3), 1e-15);

  EXPECT_THROW(dynamics::initial_bulk_excitation(spec, 3, 1), std::invalid_argument);
  EXPECT_THROW(dynamics::initial_bulk_excitation(spec, 1, 3), std::invalid_argument);
}

TEST(Ced, LocalizedExcitations) {
  const ChainSpec spec = ssh_chain(4, 0.0);
  EXPECT_DOUBLE_EQ(dynamics::ced_expectation(dynamics::initial_bulk_excitation(spec, 3, 1), spec),
                   3.0);
  EXPECT_DOUBLE_EQ(dynamics::ced_expectation(dynamics::initial_bulk_excitation(spec, 3, 2), spec),
                   -3.0);
}

TEST(Ced, EqualSuperpositionCancels) {
  const ChainSpec spec = ssh_chain(4, 0.0);
  StateVector psi = StateVector::Zero(8);
  psi[spec.site_index(2, 1)] = Complex(std::numbers::sqrt2 / 2.0, 0.0);
  psi[spec.site_index(2, 2)] = Complex(std::numbers::sqrt2 / 2.0, 0.0);
  EXPECT_NEAR(dynamics::ced_expectation(psi, spec), 0.0, 1e-15);
}

TEST(Ced, WeightMagnitudeEqualsCellIndex) {
  const ChainSpec spec = ssh_chain(6, 0.2);
  const RVector w = dynamics::ced_weights(spec);
  for (int x = 1; x <= 6; ++x) {
    EXPECT_DOUBLE_EQ(std::abs(w[spec.site_index(x, 1)]), static_cast<double>(x));
    EXPECT_DOUBLE_EQ(std::abs(w[spec.site_index(x, 2)]), static_cast<double>(x));
  }
}

TEST(Ced, BoundedByCellCount) {
  const ChainSpec spec = ssh_chain(5, 0.4);
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    const StateVector psi = test_helpers::random_state(spec.sites(), rng);
    EXPECT_LE(std::abs(dynamics::ced_expectation(psi, spec)), 5.0 + 1e-12);
  }
}

TEST(Ced, RejectsWrongCellSize) {
  const ChainSpec spec{3, 2};
  EXPECT_THROW(dynamics::ced_expectation(StateVector::Zero(6), spec), ConfigError);
}

TEST(Quench, InitialValueIsStartCell) {
  const ChainSpec spec = ssh_chain(8, 0.1 * kPi);
  const auto trace = dynamics::run_quench(spec, 5, 1, 10.0, 101);
  EXPECT_DOUBLE_EQ(trace.values.front(), 5.0);
  EXPECT_DOUBLE_EQ(trace.values_rel.front(), 0.0);
  EXPECT_DOUBLE_EQ(trace.start_cell, 5.0);
  EXPECT_EQ(trace.times.size(), 101u);
  EXPECT_DOUBLE_EQ(trace.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(trace.times.back(), 10.0);
}

TEST(Quench, RequiresSshChain) {
  EXPECT_THROW(dynamics::run_quench(ChainSpec{3, 4}, 2, 1, 1.0, 10), ConfigError);
  ChainSpec periodic = ssh_chain(4, 0.1);
  periodic.boundary = Boundary::kPeriodic;
  EXPECT_THROW(dynamics::run_quench(periodic, 2, 1, 1.0, 10), ConfigError);
}

TEST(Quench, OscillationCenters) {
  // Offset-corrected averages settle at nu/2: 0.5 in the nontrivial phase,
  // 0 in the trivial one.
  const auto nontrivial = dynamics::run_quench(ssh_chain(4, 0.1 * kPi), 3, 1, 50.0, 2501);
  EXPECT_NEAR(dynamics::time_averaged_ced(nontrivial), 0.5, 0.05);
  const auto trivial = dynamics::run_quench(ssh_chain(4, 0.9 * kPi), 3, 1, 50.0, 2501);
  EXPECT_NEAR(dynamics::time_averaged_ced(trivial), 0.0, 0.05);
}

TEST(Quench, CenterInsensitiveToChainLength) {
  const double avg4 = dynamics::time_averaged_ced(
      dynamics::run_quench(ssh_chain(2, 0.1 * kPi), 2, 1, 50.0, 2501));
  const double avg8 = dynamics::time_averaged_ced(
      dynamics::run_quench(ssh_chain(4, 0.1 * kPi), 3, 1, 50.0, 2501));
  EXPECT_NEAR(avg4, avg8, 0.05);
}

TEST(Quench, DeterministicWithDisorder) {
  const ChainSpec spec = ssh_chain(4, 0.1 * kPi);
  const DisorderSpec d{0.2, 1234, 5};
  const auto a = dynamics::run_quench(spec, 3, 1, 5.0, 51, d);
  const auto b = dynamics::run_quench(spec, 3, 1, 5.0, 51, d);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    EXPECT_EQ(a.values[i], b.values[i]);
    EXPECT_EQ(a.values_rel[i], b.values_rel[i]);
  }
}

TEST(Quench, EdgeGuard) {
  const ChainSpec spec = ssh_chain(8, 0.1 * kPi);  // max J about 1.951
  const auto longrun = dynamics::run_quench(spec, 5, 1, 50.0, 501);
  // site 9 of 16: 7 bonds to the nearest end, speed 2 * 1.951.
  EXPECT_NEAR(longrun.edge_arrival_time, 7.0 / (2.0 * 1.9510565162951536), 1e-12);
  EXPECT_TRUE(longrun.edge_window_flag);
  const auto shortrun = dynamics::run_quench(spec, 5, 1, 1.0, 11);
  EXPECT_FALSE(shortrun.edge_window_flag);
}

TEST(Quench, BSiteStartIsFlagged) {
  const ChainSpec spec = ssh_chain(4, 0.1 * kPi);
  const auto b_start = dynamics::run_quench(spec, 2, 2, 2.0, 21);
  EXPECT_TRUE(b_start.outside_readout_contract);
  const auto a_start = dynamics::run_quench(spec, 2, 1, 2.0, 21);
  EXPECT_FALSE(a_start.outside_readout_contract);
}

TEST(Quench, SnapshotsOnRequest) {
  const ChainSpec spec = ssh_chain(3, 0.1 * kPi);
  const auto trace = dynamics::run_quench(spec, 2, 1, 1.0, 6, std::nullopt, true);
  ASSERT_EQ(trace.snapshots.size(), 6u);
  for (const auto& psi : trace.snapshots) EXPECT_LT(state_norm_error(psi), 1e-10);
}

TEST(TimeAverage, ConstantTrace) {
  dynamics::EvolutionTrace trace;
  trace.times = {0.0, 1.0, 2.5, 4.0};
  trace.values = {1.7, 1.7, 1.7, 1.7};
  EXPECT_DOUBLE_EQ(dynamics::time_averaged_ced(trace), 1.7);
}

TEST(TimeAverage, RejectsEmptyTrace) {
  EXPECT_THROW(dynamics::time_averaged_ced(dynamics::EvolutionTrace{}), std::invalid_argument);
}

TEST(CriticalTimes, ClosedForm) {
  const auto ts = dynamics::critical_times(1.0, 0.0, 0);
  EXPECT_NEAR(ts[0], kPi / 4.0, 1e-15);

  // J1, J2 at theta = 0.1 pi, g0 = g1 = 1.
  const auto [j1, j2] = ssh_couplings(ssh_chain(4, 0.1 * kPi));
  const auto tc = dynamics::critical_times(j1, j2, 0);
  EXPECT_NEAR(tc[0], 0.40242, 5e-6);
}

TEST(CriticalTimes, ArithmeticProgression) {
  const auto ts = dynamics::critical_times(0.7, 1.1, 2);
  ASSERT_EQ(ts.size(), 3u);
  const double spacing = kPi / (2.0 * std::sqrt(0.7 * 0.7 + 1.1 * 1.1));
  EXPECT_NEAR(ts[1] - ts[0], spacing, 1e-14);
  EXPECT_NEAR(ts[2] - ts[1], spacing, 1e-14);
  EXPECT_LT(ts[0], ts[1]);
}

TEST(CriticalTimes, RejectsZeroCouplings) {
  EXPECT_THROW(dynamics::critical_times(0.0, 0.0, 1), std::invalid_argument);
}

TEST(CriticalReadout, BothPhasesShortAndLongChains) {
  for (int n_cells : {2, 8}) {
    const ChainSpec nontrivial = ssh_chain(n_cells, 0.1 * kPi);
    const auto [j1, j2] = ssh_couplings(nontrivial);
    const double tc = dynamics::critical_times(j1, j2, 0)[0];
    const int cell = (n_cells + 2) / 2;
    EXPECT_NEAR(dynamics::winding_from_critical_time(nontrivial, tc, cell), 1.0, 0.05);

    const ChainSpec trivial = ssh_chain(n_cells, 0.9 * kPi);
    const auto [k1, k2] = ssh_couplings(trivial);
    const double tc2 = dynamics::critical_times(k1, k2, 0)[0];
    EXPECT_NEAR(dynamics::winding_from_critical_time(trivial, tc2, cell), 0.0, 0.05);
  }
}

TEST(CriticalReadout, RobustUnderDisorder) {
  const ChainSpec spec = ssh_chain(8, 0.1 * kPi);
  const auto [j1, j2] = ssh_couplings(spec);
  const double tc = dynamics::critical_times(j1, j2, 0)[0];
  const DisorderSpec d{0.2, kDefaultSeed, 30};
  EXPECT_NEAR(dynamics::winding_from_critical_time(spec, tc, 5, 1, d), 1.0, 0.1);
}

}  // namespace
