#pragma once

// Disorder-ensemble orchestration: run a keyed experiment once per sample
// index, aggregate mean and standard error with order-independent pairwise
// summation, and keep the seed bookkeeping needed to regenerate a report.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/model.hpp"
#include "topochain/types.hpp"

namespace topochain::ensemble {

inline constexpr const char* kStreamLayout = "splitmix64(seed, sample, bond) -> uniform[-0.5, 0.5]";

struct SeedManifest {
  std::uint64_t seed = kDefaultSeed;
  int samples = 1;
  std::string stream = kStreamLayout;
};

struct EnsembleReport {
  std::vector<RVector> sample_values;  // indexed by sample
  RVector mean;
  RVector stderr_of_mean;
  SeedManifest manifest;
};

inline double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = x[0];
    for (std::size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

// Executes `experiment` for sample indices 0..samples-1 and aggregates the
// returned vectors pointwise.  Aggregation always walks samples in index
// order, so a permuted execution order cannot change the result.
inline EnsembleReport run_ensemble(const DisorderSpec& disorder,
                                   const std::function<RVector(int sample)>& experiment) {
  disorder.validate();
  EnsembleReport report;
  report.manifest = SeedManifest{disorder.seed, disorder.samples, kStreamLayout};
  report.sample_values.resize(disorder.samples);
  for (int s = 0; s < disorder.samples; ++s) {
    try {
      report.sample_values[s] = experiment(s);
    } catch (const std::exception& e) {
      throw ContractError("ensemble sample " + std::to_string(s) + " failed: " + e.what());
    }
    if (s > 0 && report.sample_values[s].size() != report.sample_values[0].size()) {
      throw ContractError("ensemble sample " + std::to_string(s) +
                          " returned a vector of mismatched length");
    }
  }

  const int n_samples = disorder.samples;
  const Eigen::Index len = report.sample_values[0].size();
  report.mean.resize(len);
  report.stderr_of_mean = RVector::Zero(len);

  bool all_equal = true;
  for (int s = 1; s < n_samples && all_equal; ++s) {
    all_equal = (report.sample_values[s].array() == report.sample_values[0].array()).all();
  }
  if (all_equal) {
    // Identical samples: mean is the sample itself and the spread is
    // exactly zero, with no rounding from the reduction.
    report.mean = report.sample_values[0];
    return report;
  }

  std::vector<double> buf(static_cast<std::size_t>(n_samples));
  for (Eigen::Index j = 0; j < len; ++j) {
    for (int s = 0; s < n_samples; ++s) buf[static_cast<std::size_t>(s)] = report.sample_values[s][j];
    const double mean = pairwise_sum(buf) / n_samples;
    report.mean[j] = mean;
    if (n_samples > 1) {
      std::vector<double> sq(static_cast<std::size_t>(n_samples));
      for (int s = 0; s < n_samples; ++s) {
        const double d = buf[static_cast<std::size_t>(s)] - mean;
        sq[static_cast<std::size_t>(s)] = d * d;
      }
      const double var = pairwise_sum(sq) / (n_samples - 1);
      report.stderr_of_mean[j] = std::sqrt(var / n_samples);
    }
  }
  return report;
}

// One report per grid point, grid order preserved.
template <typename Param, typename Runner>
std::vector<std::pair<Param, EnsembleReport>> sweep(const std::vector<Param>& grid, Runner&& runner) {
  if (grid.empty()) throw std::invalid_argument("sweep: parameter grid is empty");
  std::vector<std::pair<Param, EnsembleReport>> table;
  table.reserve(grid.size());
  for (const Param& p : grid) table.emplace_back(p, runner(p));
  return table;
}

}  // namespace topochain::ensemble
