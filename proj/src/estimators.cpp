#include "stkde/estimators.hpp"

#include "stkde/parallel.hpp"
#include "accel.hpp"

#include <cmath>

namespace stkde {

namespace {

const detail::CanonicalPoints& require_non_empty(const detail::CanonicalPoints& pts,
                                                 const char* who) {
  if (pts.size() == 0) {
    throw ValidationError(std::string(who) + ": incident list is empty");
  }
  return pts;
}

}  // namespace

Scalar stkde_at_point(std::span<const Incident> incidents, const Point3& q,
                      const Bandwidths& bw, KernelId kernel) {
  bw.validate();
  const auto pts = require_non_empty(detail::canonical_points(incidents), "stkde_at_point");
  Scalar sum = 0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    sum += product_kernel_weight(q.x - pts.x[p], q.y - pts.y[p], q.t - pts.t[p], bw, kernel);
  }
  return sum / static_cast<Scalar>(pts.size());
}

DensityVolume stkde_volume(std::span<const Incident> incidents, const GridSpec3D& spec,
                           const Bandwidths& bw, KernelId kernel, int workers) {
  spec.validate();
  bw.validate();
  const auto pts = require_non_empty(detail::canonical_points(incidents), "stkde_volume");
  const detail::SpatialBuckets buckets(pts, bw.h_x, bw.h_y);
  const Scalar n = static_cast<Scalar>(pts.size());

  DensityVolume volume = make_zero_volume(spec);
  const GridSpec2D& g = spec.spatial;

  // One cell column at a time: gather planar candidates once, then slice the
  // (time-sorted) candidate list per bin with binary search. Candidates are
  // visited in ascending canonical order, and pruned terms are exactly zero,
  // so each voxel's sum is bit-identical to the unpruned canonical sum.
  parallel_for(g.cell_count(), workers, [&](Index begin, Index end) {
    std::vector<std::int32_t> cand;
    for (Index c = begin; c < end; ++c) {
      const Index j = c / g.n_cols;
      const Index i = c % g.n_cols;
      const Point2 cc = cell_centroid(i, j, g);
      buckets.gather(cc.x, cc.y, cand);
      if (cand.empty()) {
        continue;
      }
      for (Index k = 0; k < spec.n_bins; ++k) {
        const Scalar ct = spec.t_start + (static_cast<Scalar>(k) + 0.5) * spec.t_bin;
        const auto lo = std::lower_bound(cand.begin(), cand.end(), ct - bw.h_t,
                                         [&](std::int32_t p, Scalar v) { return pts.t[static_cast<std::size_t>(p)] < v; });
        const auto hi = std::upper_bound(cand.begin(), cand.end(), ct + bw.h_t,
                                         [&](Scalar v, std::int32_t p) { return v < pts.t[static_cast<std::size_t>(p)]; });
        Scalar sum = 0;
        for (auto it = lo; it != hi; ++it) {
          const auto p = static_cast<std::size_t>(*it);
          sum += product_kernel_weight(cc.x - pts.x[p], cc.y - pts.y[p], ct - pts.t[p], bw, kernel);
        }
        volume.at(i, j, k) = sum / n;
      }
    }
  });
  return volume;
}

DensitySurface skde_surface(std::span<const Incident> incidents, const GridSpec2D& spec,
                            Scalar h_s, KernelId kernel, int workers) {
  spec.validate();
  if (!std::isfinite(h_s) || h_s <= 0) {
    throw ValidationError("skde_surface: h_s must be finite and positive");
  }
  if (kernel != KernelId::Epanechnikov) {
    throw ValidationError("skde_surface: unsupported kernel");
  }
  const auto pts = require_non_empty(detail::canonical_points(incidents), "skde_surface");
  const detail::SpatialBuckets buckets(pts, h_s, h_s);
  const Scalar n = static_cast<Scalar>(pts.size());
  const Scalar norm = n * h_s * h_s;

  DensitySurface surface = make_zero_surface(spec);
  parallel_for(spec.cell_count(), workers, [&](Index begin, Index end) {
    std::vector<std::int32_t> cand;
    for (Index c = begin; c < end; ++c) {
      const Index j = c / spec.n_cols;
      const Index i = c % spec.n_cols;
      const Point2 cc = cell_centroid(i, j, spec);
      buckets.gather(cc.x, cc.y, cand);
      Scalar sum = 0;
      for (std::int32_t p32 : cand) {
        const auto p = static_cast<std::size_t>(p32);
        sum += bivariate_epanechnikov((cc.x - pts.x[p]) / h_s, (cc.y - pts.y[p]) / h_s);
      }
      surface.values(j, i) = sum / norm;
    }
  });
  return surface;
}

DensitySurface promap_surface(std::span<const Incident> incidents, const GridSpec2D& spec,
                              const PromapParams& params, Scalar t_ref, int workers) {
  spec.validate();
  params.validate();
  const auto pts = require_non_empty(detail::canonical_points(incidents), "promap_surface");
  if (pts.t.back() > t_ref) {
    const auto p = pts.original_index.back();
    throw ValidationError("promap_surface: incident '" +
                          incidents[static_cast<std::size_t>(p)].id +
                          "' occurs after t_ref (future incident in a retrospective estimator)");
  }
  // Only incidents no older than h_t can contribute; they form a canonical
  // suffix since positions are time-sorted.
  const std::size_t t_begin = detail::time_lower_bound(pts, t_ref - params.h_t);
  const detail::SpatialBuckets buckets(pts, params.h_s, params.h_s);

  DensitySurface surface = make_zero_surface(spec);
  parallel_for(spec.cell_count(), workers, [&](Index begin, Index end) {
    std::vector<std::int32_t> cand;
    for (Index c = begin; c < end; ++c) {
      const Index j = c / spec.n_cols;
      const Index i = c % spec.n_cols;
      const Point2 cc = cell_centroid(i, j, spec);
      buckets.gather(cc.x, cc.y, cand);
      Scalar sum = 0;
      for (std::int32_t p32 : cand) {
        const auto p = static_cast<std::size_t>(p32);
        if (p < t_begin) {
          continue;
        }
        const Scalar dx = cc.x - pts.x[p];
        const Scalar dy = cc.y - pts.y[p];
        const Scalar dist = std::sqrt(dx * dx + dy * dy);
        if (dist > params.h_s) {
          continue;
        }
        const Scalar d_i = dist / params.d_unit;
        const Scalar t_i = (t_ref - pts.t[p]) / params.t_unit;
        sum += 1.0 / ((1.0 + d_i) * (1.0 + t_i));
      }
      surface.values(j, i) = sum;
    }
  });
  return surface;
}

}  // namespace stkde
