#include "stkde/significance.hpp"

#include "stkde/estimators.hpp"
#include "stkde/parallel.hpp"
#include "stkde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stkde {

namespace {

void validate_alpha(double alpha) {
  if (!(alpha > 0) || alpha > 0.5) {
    throw ValidationError("significance: alpha must lie in (0, 0.5]");
  }
}

// Order statistic index of the empirical (1 - alpha) quantile: the smallest
// index covering at least a (1 - alpha) share of the R sorted samples. The
// epsilon guards against 0.95 * R landing just above an integer.
Index quantile_index(Index replicates, double alpha) {
  const auto raw = static_cast<Index>(
      std::ceil((1.0 - alpha) * static_cast<double>(replicates) - 1e-9)) - 1;
  return std::clamp<Index>(raw, 0, replicates - 1);
}

NullEnsemble build_ensemble_impl(Index n, const LandUseGrid& land_use, const TimeWindow& window,
                                 const GridSpec3D& grid, SignificanceLevel level,
                                 Index replicates, std::uint64_t master_seed, int workers,
                                 const std::function<void(std::span<const Incident>, Eigen::Ref<Eigen::VectorXd>)>& fill) {
  land_use.validate();
  window.validate();
  if (n < 1) {
    throw ValidationError("build_null_ensemble: replicate incident count must be >= 1");
  }
  if (replicates < 1) {
    throw ValidationError("build_null_ensemble: needs at least one replicate");
  }

  const Index units = level == SignificanceLevel::Voxel ? grid.voxel_count()
                                                        : grid.spatial.cell_count();
  NullEnsemble ensemble{level, grid, land_use, master_seed, replicates,
                        Eigen::MatrixXd(units, replicates)};

  parallel_for(replicates, workers, [&](Index begin, Index end) {
    for (Index r = begin; r < end; ++r) {
      const auto incidents =
          simulate_null_incidents(n, land_use, window, sub_seed(master_seed, static_cast<std::uint64_t>(r)));
      fill(incidents, ensemble.samples.col(r));
    }
  });

  // Sort each cell's replicate samples ascending for quantile lookups.
  parallel_for(units, workers, [&](Index begin, Index end) {
    for (Index u = begin; u < end; ++u) {
      Scalar* row_begin = ensemble.samples.data() + u;
      // row-wise sort on a column-major matrix: copy out, sort, copy back
      std::vector<Scalar> row(static_cast<std::size_t>(replicates));
      for (Index r = 0; r < replicates; ++r) {
        row[static_cast<std::size_t>(r)] = row_begin[r * units];
      }
      std::sort(row.begin(), row.end());
      for (Index r = 0; r < replicates; ++r) {
        row_begin[r * units] = row[static_cast<std::size_t>(r)];
      }
    }
  });
  return ensemble;
}

SignificanceResult classify_units(const NullEnsemble& ensemble, double alpha,
                                  const std::function<Scalar(Index)>& observed_at,
                                  Index n_slices) {
  validate_alpha(alpha);
  const Index units = ensemble.samples.rows();
  const Index replicates = ensemble.replicate_count;
  const Index q_idx = quantile_index(replicates, alpha);
  const GridSpec2D& g = ensemble.grid.spatial;

  SignificanceResult result;
  result.alpha = alpha;
  result.p_values.assign(static_cast<std::size_t>(n_slices), Raster::Zero(g.n_rows, g.n_cols));
  result.significant.assign(static_cast<std::size_t>(n_slices),
                            BoolRaster::Constant(g.n_rows, g.n_cols, false));

  for (Index u = 0; u < units; ++u) {
    const Scalar obs = observed_at(u);
    // count null samples >= obs via binary search over the sorted row
    Index lo = 0, hi = replicates;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (ensemble.samples(u, mid) < obs) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    const Index count_ge = replicates - lo;
    const Scalar p = static_cast<Scalar>(1 + count_ge) / static_cast<Scalar>(replicates + 1);
    const bool sig = obs > ensemble.samples(u, q_idx);

    const Index k = u / (g.n_rows * g.n_cols);
    const Index rem = u % (g.n_rows * g.n_cols);
    const Index j = rem / g.n_cols;
    const Index i = rem % g.n_cols;
    result.p_values[static_cast<std::size_t>(k)](j, i) = p;
    result.significant[static_cast<std::size_t>(k)](j, i) = sig;
  }
  return result;
}

}  // namespace

std::vector<Incident> simulate_null_incidents(Index n, const LandUseGrid& land_use,
                                              const TimeWindow& window, std::uint64_t seed) {
  land_use.validate();
  window.validate();
  if (n < 1) {
    throw ValidationError("simulate_null_incidents: n must be >= 1");
  }
  const auto eligible = land_use.eligible_cells();
  const GridSpec2D& g = land_use.spec;

  Rng rng(seed);
  std::vector<Incident> incidents;
  incidents.reserve(static_cast<std::size_t>(n));
  for (Index e = 0; e < n; ++e) {
    const CellIndex cell = eligible[rng.uniform_below(eligible.size())];
    Incident inc;
    inc.id = "null-" + std::to_string(e);
    inc.x = g.x_origin + (static_cast<Scalar>(cell.i) + rng.uniform()) * g.cell_size;
    inc.y = g.y_origin + (static_cast<Scalar>(cell.j) + rng.uniform()) * g.cell_size;
    inc.t = window.start + rng.uniform() * window.length();
    incidents.push_back(std::move(inc));
  }
  return incidents;
}

NullEnsemble build_null_ensemble(Index n, const LandUseGrid& land_use, const TimeWindow& window,
                                 const GridSpec3D& spec, const Bandwidths& bw, KernelId kernel,
                                 Index replicates, std::uint64_t master_seed,
                                 SignificanceLevel level, int workers) {
  spec.validate();
  bw.validate();
  if (land_use.spec != spec.spatial) {
    throw ValidationError("build_null_ensemble: land use and grid spatial layouts differ");
  }
  return build_ensemble_impl(
      n, land_use, window, spec, level, replicates, master_seed, workers,
      [&](std::span<const Incident> incidents, Eigen::Ref<Eigen::VectorXd> column) {
        const DensityVolume volume = stkde_volume(incidents, spec, bw, kernel, 1);
        if (level == SignificanceLevel::Voxel) {
          Index u = 0;
          for (Index k = 0; k < spec.n_bins; ++k) {
            for (Index j = 0; j < spec.spatial.n_rows; ++j) {
              for (Index i = 0; i < spec.spatial.n_cols; ++i) {
                column(u++) = volume.at(i, j, k);
              }
            }
          }
        } else {
          const DensitySurface surface = marginalize_time(volume);
          Index u = 0;
          for (Index j = 0; j < spec.spatial.n_rows; ++j) {
            for (Index i = 0; i < spec.spatial.n_cols; ++i) {
              column(u++) = surface.values(j, i);
            }
          }
        }
      });
}

NullEnsemble build_null_ensemble_custom(Index n, const LandUseGrid& land_use,
                                        const TimeWindow& window, const GridSpec2D& spatial,
                                        const SurfaceEstimator& estimator, Index replicates,
                                        std::uint64_t master_seed, int workers) {
  spatial.validate();
  if (land_use.spec != spatial) {
    throw ValidationError("build_null_ensemble: land use and grid spatial layouts differ");
  }
  const GridSpec3D grid{spatial, window.start, window.length(), 1};
  return build_ensemble_impl(
      n, land_use, window, grid, SignificanceLevel::Surface, replicates, master_seed, workers,
      [&](std::span<const Incident> incidents, Eigen::Ref<Eigen::VectorXd> column) {
        const DensitySurface surface = estimator(incidents);
        if (surface.spec != spatial) {
          throw ValidationError("build_null_ensemble: estimator produced a misaligned surface");
        }
        Index u = 0;
        for (Index j = 0; j < spatial.n_rows; ++j) {
          for (Index i = 0; i < spatial.n_cols; ++i) {
            column(u++) = surface.values(j, i);
          }
        }
      });
}

SignificanceResult classify_significance(const DensityVolume& observed,
                                         const NullEnsemble& ensemble, double alpha) {
  if (ensemble.level != SignificanceLevel::Voxel) {
    throw ValidationError("classify_significance: ensemble was built at surface level");
  }
  if (observed.spec != ensemble.grid) {
    throw ValidationError("classify_significance: observed volume misaligned with ensemble grid");
  }
  const GridSpec3D& grid = ensemble.grid;
  return classify_units(
      ensemble, alpha,
      [&](Index u) {
        const Index per_slice = grid.spatial.cell_count();
        const Index k = u / per_slice;
        const Index rem = u % per_slice;
        return observed.at(rem % grid.spatial.n_cols, rem / grid.spatial.n_cols, k);
      },
      grid.n_bins);
}

SignificanceResult classify_significance(const DensitySurface& observed,
                                         const NullEnsemble& ensemble, double alpha) {
  if (ensemble.level != SignificanceLevel::Surface) {
    throw ValidationError("classify_significance: ensemble was built at voxel level");
  }
  if (observed.spec != ensemble.grid.spatial) {
    throw ValidationError("classify_significance: observed surface misaligned with ensemble grid");
  }
  const GridSpec2D& g = ensemble.grid.spatial;
  return classify_units(
      ensemble, alpha,
      [&](Index u) { return observed.values(u / g.n_cols, u % g.n_cols); }, 1);
}

DensitySurface marginalize_time(const DensityVolume& volume) {
  volume.spec.validate();
  DensitySurface surface = make_zero_surface(volume.spec.spatial);
  for (const Raster& slice : volume.slices) {
    surface.values += slice;
  }
  surface.values *= volume.spec.t_bin;
  return surface;
}

}  // namespace stkde
