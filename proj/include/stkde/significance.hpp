#pragma once

#include "stkde/kernels.hpp"
#include "stkde/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stkde {

/// Whether the Monte-Carlo null is scored per space-time voxel or per
/// time-aggregated spatial cell. The prediction pipeline uses Surface.
enum class SignificanceLevel {
  Voxel,
  Surface,
};

/// R replicates of densities estimated from uniform null incidents, sorted
/// ascending per cell. Replicate r is seeded with sub_seed(master_seed, r),
/// so the ensemble is identical under any parallel schedule.
struct NullEnsemble {
  SignificanceLevel level = SignificanceLevel::Surface;
  GridSpec3D grid;
  LandUseGrid land_use;
  std::uint64_t master_seed = 0;
  Index replicate_count = 0;
  Eigen::MatrixXd samples;  // (units, R); unit = row-major cell (plus slice stride for Voxel)
};

/// Per-cell p-values and the percentile-exceedance significance mask.
/// p = (1 + #{null >= observed}) / (R + 1), never below 1/(R+1); a cell is
/// significant when the observed value strictly exceeds the empirical
/// (1 - alpha) quantile of its null samples.
struct SignificanceResult {
  double alpha = 0.05;
  std::vector<Raster> p_values;         // one slice (Surface) or n_bins slices (Voxel)
  std::vector<BoolRaster> significant;
};

/// Exactly n incidents, each placed in a uniformly chosen ELIGIBLE cell,
/// uniformly within the cell footprint, at a time uniform in the window.
std::vector<Incident> simulate_null_incidents(Index n, const LandUseGrid& land_use,
                                              const TimeWindow& window, std::uint64_t seed);

NullEnsemble build_null_ensemble(Index n, const LandUseGrid& land_use, const TimeWindow& window,
                                 const GridSpec3D& spec, const Bandwidths& bw, KernelId kernel,
                                 Index replicates, std::uint64_t master_seed,
                                 SignificanceLevel level = SignificanceLevel::Surface,
                                 int workers = 1);

/// Surface-level ensemble for an arbitrary estimator (SKDE, ProMap, ...).
/// The estimator maps a replicate's simulated incidents to a surface on the
/// given spatial layout.
using SurfaceEstimator = std::function<DensitySurface(std::span<const Incident>)>;
NullEnsemble build_null_ensemble_custom(Index n, const LandUseGrid& land_use,
                                        const TimeWindow& window, const GridSpec2D& spatial,
                                        const SurfaceEstimator& estimator, Index replicates,
                                        std::uint64_t master_seed, int workers = 1);

SignificanceResult classify_significance(const DensityVolume& observed,
                                         const NullEnsemble& ensemble, double alpha = 0.05);
SignificanceResult classify_significance(const DensitySurface& observed,
                                         const NullEnsemble& ensemble, double alpha = 0.05);

/// Time-integrated marginal: surface(j, i) = sum_k volume(j, i, k) * t_bin.
/// Units change from per m^2*day to per m^2.
DensitySurface marginalize_time(const DensityVolume& volume);

}  // namespace stkde
