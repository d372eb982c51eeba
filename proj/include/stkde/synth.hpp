#pragma once

#include "stkde/types.hpp"

#include <cstdint>
#include <vector>

namespace stkde {

/// A cluster of events around a (possibly moving) center. The center follows
/// the piecewise-linear trajectory through the knots; events are drawn at
/// times uniform in `extent` and placed with isotropic normal spread around
/// the center at that time, rejection-sampled into ELIGIBLE cells.
struct ClusterSpec {
  struct Knot {
    Scalar t = 0;
    Point2 position;
  };
  std::vector<Knot> trajectory;  // knot times ascending
  Scalar spread = 0;             // meters
  TimeWindow extent;
  Index count = 0;

  Point2 position_at(Scalar t) const;
};

/// A synthetic space-time point process: uniform background over ELIGIBLE
/// cells plus any number of clusters.
struct SynthProcessSpec {
  Scalar background_rate = 0;  // events per day
  std::vector<ClusterSpec> clusters;
  std::uint64_t master_seed = 0;
};

/// Full-rectangle study area with round(eligible_fraction * cells) ELIGIBLE
/// cells chosen uniformly; the rest are in-study but not eligible.
LandUseGrid generate_landuse(const GridSpec2D& spec, Scalar eligible_fraction,
                             std::uint64_t seed);

/// Background count is Poisson(rate * window length); every generated
/// incident falls in an ELIGIBLE cell and inside the window.
std::vector<Incident> generate_incidents(const SynthProcessSpec& process,
                                         const LandUseGrid& land_use, const TimeWindow& window);

/// The moving-hotspot preset: one cluster drifting diagonally across the
/// study area over the data window by several kernel bandwidths, over a
/// uniform background. Temporal weighting demonstrably matters on this data.
SynthProcessSpec drifting_cluster_preset(const GridSpec2D& extent, const TimeWindow& window,
                                         std::uint64_t seed);

}  // namespace stkde
