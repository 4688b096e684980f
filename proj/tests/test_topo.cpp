#include "topochain/topo.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

using namespace topochain;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(WindingAnalytic, PhaseDiagram) {
  EXPECT_EQ(topo::winding_number_analytic(1.0, 1.0, 0.1 * kPi), 1);
  EXPECT_EQ(topo::winding_number_analytic(1.0, 1.0, 0.9 * kPi), 0);
  EXPECT_EQ(topo::winding_number_analytic(1.0, 1.0, -0.3 * kPi), 1);
  EXPECT_EQ(topo::winding_number_analytic(0.5, -1.0, 0.0), 0);
}

TEST(WindingAnalytic, CriticalPointRejected) {
  EXPECT_THROW(topo::winding_number_analytic(1.0, 1.0, kPi / 2.0), ContractError);
  EXPECT_THROW(topo::winding_number_analytic(0.0, 1.0, 0.1), ContractError);
}

TEST(WindingIntegral, KnownValues) {
  EXPECT_NEAR(topo::winding_number_integral(0.5, 1.5, 256), 1.0, 1e-6);
  EXPECT_NEAR(topo::winding_number_integral(1.5, 0.5, 256), 0.0, 1e-6);
}

TEST(WindingIntegral, NoInterCellHoppingMeansNoWinding) {
  // J2 = 0: d_y vanishes identically, every integrand term carries J2.
  EXPECT_EQ(topo::winding_number_integral(0.7, 0.0, 256), 0.0);
}

TEST(WindingIntegral, Rejections) {
  EXPECT_THROW(topo::winding_number_integral(1.0, 1.0, 256), ContractError);
  EXPECT_THROW(topo::winding_number_integral(0.5, 1.5, 8), std::invalid_argument);
}

TEST(WindingIntegral, CrossOracleAgainstClosedForm) {
  // 200 random gapped draws with g0 > 0 (the closed form's operating
  // regime; for g0 < 0 the oriented integral can wind -1 while the closed
  // form stays in {0, 1}).  Gapped here means a relative gap: the trapezoid
  // rule at nk = 256 resolves the integrand only when |J1|/|J2| stays away
  // from 1.
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> g0_dist(0.2, 2.0);
  std::uniform_real_distribution<double> g1_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
  int accepted = 0;
  while (accepted < 200) {
    const double g0 = g0_dist(rng);
    const double g1 = g1_dist(rng);
    const double theta = theta_dist(rng);
    if (std::abs(g0 * g1 * std::cos(theta)) < 0.02) continue;  // near-critical
    const double j1 = g0 - g1 * std::cos(theta);
    const double j2 = g0 + g1 * std::cos(theta);
    const double lo = std::min(std::abs(j1), std::abs(j2));
    const double hi = std::max(std::abs(j1), std::abs(j2));
    if (lo > 0.9 * hi) continue;  // relative gap below 10%
    const int nu = topo::winding_number_analytic(g0, g1, theta);
    const double integral = topo::winding_number_integral(j1, j2, 256);
    ASSERT_NEAR(integral, static_cast<double>(nu), 1e-6)
        << "g0=" << g0 << " g1=" << g1 << " theta=" << theta;
    ++accepted;
  }
}

TEST(BandSpectrum, CriticalSshGapClosesOnGrid) {
  const ChainSpec spec{2, 1, 1.0, 1.0, kPi / 2.0};  // J1 = J2
  const auto bs = topo::band_spectrum(spec, 64, 1);
  EXPECT_LT(bs.min_gap, 1e-12);
  EXPECT_NEAR(bs.min_gap_q, kPi, 1e-12);
}

TEST(BandSpectrum, GappedPumpFamily) {
  const ChainSpec spec{3, 1, 1.0, 1.0, 0.0};
  const auto bs = topo::band_spectrum(spec, 24, 24);
  EXPECT_GT(bs.min_gap, 0.5);
  EXPECT_EQ(bs.energies.rows(), 24 * 24);
  for (int g = 0; g < bs.energies.rows(); ++g) {
    EXPECT_LE(bs.energies(g, 0), bs.energies(g, 1));
    EXPECT_LE(bs.energies(g, 1), bs.energies(g, 2));
  }
}

TEST(BandSpectrum, DecoupledDimersAreFlat) {
  // theta = pi with g0 = g1 gives J2 = 0: both bands flat at +-J1.
  const ChainSpec spec{2, 1, 1.0, 1.0, kPi};
  const auto bs = topo::band_spectrum(spec, 32, 1);
  for (int g = 0; g < bs.energies.rows(); ++g) {
    EXPECT_NEAR(bs.energies(g, 0), -2.0, 1e-12);
    EXPECT_NEAR(bs.energies(g, 1), 2.0, 1e-12);
  }
}

TEST(ChernNumbers, FlatBandRegime) {
  const ChainSpec spec{3, 1, 0.0, 1.0, 0.0};
  const auto cs = topo::chern_numbers(spec, 24, 24);
  ASSERT_EQ(cs.chern.size(), 3u);
  EXPECT_EQ(cs.chern[0], 2);
  EXPECT_EQ(cs.chern[1], -4);
  EXPECT_EQ(cs.chern[2], 2);
  for (int n = 0; n < 3; ++n) {
    EXPECT_LT(std::abs(cs.field_sums[n] - cs.chern[n]), 1e-9);
  }
}

TEST(ChernNumbers, DispersiveRegime) {
  const ChainSpec spec{3, 1, 1.0, 1.0, 0.0};
  const auto cs = topo::chern_numbers(spec, 24, 24);
  EXPECT_EQ(cs.chern[0], -1);
  EXPECT_EQ(cs.chern[1], 2);
  EXPECT_EQ(cs.chern[2], -1);
}

TEST(ChernNumbers, ZeroSumRule) {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> g0_dist(0.0, 1.8);
  std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
  int checked = 0;
  while (checked < 6) {
    ChainSpec spec{3, 1, g0_dist(rng), 1.0, theta_dist(rng)};
    if (std::abs(spec.g0 - 0.25) < 0.05) continue;  // stay away from the transition
    const auto cs = topo::chern_numbers(spec, 24, 24);
    EXPECT_EQ(cs.chern[0] + cs.chern[1] + cs.chern[2], 0);
    ++checked;
  }
}

TEST(ChernNumbers, GridStability) {
  for (double g0 : {0.0, 1.0}) {
    const ChainSpec spec{3, 1, g0, 1.0, 0.0};
    const auto coarse = topo::chern_numbers(spec, 24, 24);
    const auto fine = topo::chern_numbers(spec, 48, 48);
    EXPECT_EQ(coarse.chern, fine.chern);
  }
}

TEST(ChernNumbers, GaugeInvariance) {
  const ChainSpec spec{3, 1, 1.0, 1.0, 0.0};
  auto bs = topo::band_spectrum(spec, 24, 24);
  const auto reference = topo::chern_from_spectrum(bs);
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  for (auto& states : bs.states) {
    for (int n = 0; n < states.cols(); ++n) {
      states.col(n) *= std::polar(1.0, phase(rng));
    }
  }
  const auto scrambled = topo::chern_from_spectrum(bs);
  EXPECT_EQ(reference.chern, scrambled.chern);
}

TEST(ChernNumbers, GapClosureRejectedWithLocation) {
  // p = 2 with theta scanned over the full circle always crosses the
  // critical line; the grid hits (q, theta) = (pi, pi/2) exactly.
  const ChainSpec spec{2, 1, 1.0, 1.0, 0.0};
  try {
    topo::chern_numbers(spec, 24, 24);
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("gap"), std::string::npos);
    EXPECT_NE(msg.find("q = "), std::string::npos);
    EXPECT_NE(msg.find("theta = "), std::string::npos);
  }
}

TEST(ChernNumbers, PhaseBoundaryFlip) {
  // Sweeping g0 through g1/4 flips the Chern set, with a small gap near the
  // transition.
  const ChainSpec below{3, 1, 0.2, 1.0, 0.0};
  const ChainSpec above{3, 1, 0.3, 1.0, 0.0};
  const auto cs_below = topo::chern_numbers(below, 24, 24);
  const auto cs_above = topo::chern_numbers(above, 24, 24);
  EXPECT_EQ(cs_below.chern, (std::vector<int>{2, -4, 2}));
  EXPECT_EQ(cs_above.chern, (std::vector<int>{-1, 2, -1}));
  const auto near_below = topo::band_spectrum(ChainSpec{3, 1, 0.24, 1.0, 0.0}, 48, 48);
  const auto far_below = topo::band_spectrum(ChainSpec{3, 1, 0.05, 1.0, 0.0}, 48, 48);
  EXPECT_LT(near_below.min_gap, far_below.min_gap);
}

TEST(ChernNumbers, GridPreconditions) {
  const ChainSpec spec{3, 1, 1.0, 1.0, 0.0};
  EXPECT_THROW(topo::chern_numbers(spec, 8, 24), std::invalid_argument);
  EXPECT_THROW(topo::chern_numbers(spec, 24, 8), std::invalid_argument);
}

}  // namespace
