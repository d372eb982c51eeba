#pragma once

#include "stkde/kernels.hpp"
#include "stkde/types.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace stkde {

/// Search space for likelihood cross-validation: a log-spaced coarse lattice
/// per axis followed by Nelder-Mead refinement in log-bandwidth space.
struct BandwidthSearchConfig {
  Bandwidths lower;                      // per-axis lower bounds
  Bandwidths upper;                      // per-axis upper bounds
  std::array<int, 3> lattice = {12, 12, 12};  // log-spaced points per axis
  int max_refine_iterations = 200;
  Scalar tolerance = 1e-8;               // relative objective change

  void validate() const {
    lower.validate();
    upper.validate();
    if (!(lower.h_x < upper.h_x) || !(lower.h_y < upper.h_y) || !(lower.h_t < upper.h_t)) {
      throw ValidationError("BandwidthSearchConfig: lower bounds must be below upper bounds");
    }
    for (int m : lattice) {
      if (m < 2) {
        throw ValidationError("BandwidthSearchConfig: lattice needs at least 2 points per axis");
      }
    }
    if (max_refine_iterations < 0 || !(tolerance > 0)) {
      throw ValidationError("BandwidthSearchConfig: bad refinement settings");
    }
  }
};

/// Sensible bounds for a given grid and training period: spatial bandwidths
/// between one cell and half the study extent, temporal between one bin and
/// half the training window.
BandwidthSearchConfig default_search_config(const GridSpec3D& grid, const TimeWindow& training);

struct BandwidthResult {
  Bandwidths bw;
  Scalar log_likelihood = 0;
  long evaluations = 0;
  std::vector<std::pair<Bandwidths, Scalar>> trace;  // every (bw, ln L) visited
  Scalar duplicate_fraction = 0;  // share of incidents with a coordinate-identical twin
};

/// Leave-one-out density: the STKDE at incident i's own coordinates with
/// incident i removed from the sum and divisor (n-1) h_x h_y h_t.
Scalar loo_density(std::span<const Incident> incidents, std::size_t i,
                   const Bandwidths& bw, KernelId kernel);

/// ln L = sum_i ln f_-i(X_i, Y_i, T_i). Returns -infinity when any
/// leave-one-out density is zero (a sentinel, not an error). Requires n >= 2.
Scalar loo_log_likelihood(std::span<const Incident> incidents, const Bandwidths& bw,
                          KernelId kernel);

/// Maximizes the leave-one-out log likelihood over the configured search
/// space. The result is at least as good as every coarse-lattice point, and
/// identical inputs produce identical traces.
BandwidthResult optimize_bandwidths(std::span<const Incident> incidents,
                                    const BandwidthSearchConfig& config, KernelId kernel,
                                    int workers = 1);

}  // namespace stkde
