#pragma once

#include "stkde/kernels.hpp"
#include "stkde/types.hpp"

#include <span>

namespace stkde {

/// ProMap search radii and the units its inverse-distance weights count in.
/// The weight of an incident at planar distance d meters and age a days is
/// 1 / ((1 + d/d_unit) (1 + a/t_unit)), accumulated while d <= h_s and
/// a <= h_t. Defaults follow the method's built-in 400 m / 2 month radii
/// with distance in grid-cell widths and time in weeks.
struct PromapParams {
  Scalar h_s = 400.0;    // meters
  Scalar h_t = 60.875;   // days (two mean Gregorian months)
  Scalar d_unit = 100.0; // meters per distance unit
  Scalar t_unit = 7.0;   // days per time unit

  static PromapParams for_cell_size(Scalar cell_size) {
    PromapParams p;
    p.d_unit = cell_size;
    return p;
  }

  void validate() const {
    auto ok = [](Scalar v) { return std::isfinite(v) && v > 0; };
    if (!ok(h_s) || !ok(h_t) || !ok(d_unit) || !ok(t_unit)) {
      throw ValidationError("PromapParams: all fields must be finite and positive");
    }
  }
};

/// Space-time product-kernel density at a single query point:
/// (1/n) sum_i k((x-X_i)/h_x) k((y-Y_i)/h_y) k((t-T_i)/h_t) / (h_x h_y h_t).
/// Incidents are summed in canonical (t, x, y, id) order so the result does
/// not depend on input order.
Scalar stkde_at_point(std::span<const Incident> incidents, const Point3& q,
                      const Bandwidths& bw, KernelId kernel);

/// The density evaluated at every voxel centroid. Values are bit-identical
/// to stkde_at_point at each centroid and to each other regardless of the
/// worker count; compact-support bucketing prunes incidents exactly.
DensityVolume stkde_volume(std::span<const Incident> incidents, const GridSpec3D& spec,
                           const Bandwidths& bw, KernelId kernel, int workers = 1);

/// Bivariate spatial KDE with the radially symmetric Epanechnikov kernel;
/// timestamps are ignored.
DensitySurface skde_surface(std::span<const Incident> incidents, const GridSpec2D& spec,
                            Scalar h_s, KernelId kernel, int workers = 1);

/// ProMap risk intensity at each cell centroid, accumulated over incidents
/// no farther than params.h_s in space and no older than params.h_t relative
/// to t_ref. Unnormalized; incidents after t_ref are an error.
DensitySurface promap_surface(std::span<const Incident> incidents, const GridSpec2D& spec,
                              const PromapParams& params, Scalar t_ref, int workers = 1);

}  // namespace stkde
