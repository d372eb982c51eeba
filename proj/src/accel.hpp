#pragma once

// Internal acceleration structures shared by the estimators and the
// bandwidth objective. Not installed.

#include "stkde/types.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace stkde::detail {

// Incident coordinates in canonical (t, x, y, id) order. Ascending position
// is ascending time, so a time window is a contiguous position range.
struct CanonicalPoints {
  std::vector<Scalar> x, y, t;
  std::vector<std::int32_t> original_index;  // canonical position -> input position

  std::size_t size() const { return x.size(); }
};

CanonicalPoints canonical_points(std::span<const Incident> incidents);

// First canonical position with t >= value (positions are time-sorted).
inline std::size_t time_lower_bound(const CanonicalPoints& pts, Scalar value) {
  return static_cast<std::size_t>(
      std::lower_bound(pts.t.begin(), pts.t.end(), value) - pts.t.begin());
}

// First canonical position with t > value.
inline std::size_t time_upper_bound(const CanonicalPoints& pts, Scalar value) {
  return static_cast<std::size_t>(
      std::upper_bound(pts.t.begin(), pts.t.end(), value) - pts.t.begin());
}

// Hash grid over fixed-width planar buckets. gather() collects, in ascending
// canonical order, a superset of the points within the closed box
// [cx - width_x, cx + width_x] x [cy - width_y, cy + width_y]; callers filter
// exactly (or let compactly supported kernels zero out the excess).
class SpatialBuckets {
public:
  SpatialBuckets(const CanonicalPoints& pts, Scalar width_x, Scalar width_y);

  void gather(Scalar cx, Scalar cy, std::vector<std::int32_t>& out) const;

private:
  std::uint64_t key(std::int64_t bx, std::int64_t by) const {
    return (static_cast<std::uint64_t>(bx) << 32) | static_cast<std::uint64_t>(by);
  }

  const CanonicalPoints& pts_;
  Scalar width_x_, width_y_;
  Scalar min_x_ = 0, min_y_ = 0;
  std::int64_t max_bx_ = -1, max_by_ = -1;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> buckets_;
};

}  // namespace stkde::detail
