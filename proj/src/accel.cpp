#include "accel.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

namespace stkde::detail {

CanonicalPoints canonical_points(std::span<const Incident> incidents) {
  const std::size_t n = incidents.size();
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    const Incident& u = incidents[static_cast<std::size_t>(a)];
    const Incident& v = incidents[static_cast<std::size_t>(b)];
    return std::tie(u.t, u.x, u.y, u.id) < std::tie(v.t, v.x, v.y, v.id);
  });

  CanonicalPoints pts;
  pts.x.reserve(n);
  pts.y.reserve(n);
  pts.t.reserve(n);
  pts.original_index = std::move(order);
  for (std::int32_t idx : pts.original_index) {
    const Incident& inc = incidents[static_cast<std::size_t>(idx)];
    if (!std::isfinite(inc.x) || !std::isfinite(inc.y) || !std::isfinite(inc.t)) {
      throw ValidationError("incident '" + inc.id + "' has non-finite coordinates");
    }
    pts.x.push_back(inc.x);
    pts.y.push_back(inc.y);
    pts.t.push_back(inc.t);
  }
  return pts;
}

SpatialBuckets::SpatialBuckets(const CanonicalPoints& pts, Scalar width_x, Scalar width_y)
    : pts_(pts), width_x_(width_x), width_y_(width_y) {
  if (pts.size() == 0) {
    return;
  }
  min_x_ = *std::min_element(pts.x.begin(), pts.x.end());
  min_y_ = *std::min_element(pts.y.begin(), pts.y.end());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto bx = static_cast<std::int64_t>(std::floor((pts.x[p] - min_x_) / width_x_));
    const auto by = static_cast<std::int64_t>(std::floor((pts.y[p] - min_y_) / width_y_));
    max_bx_ = std::max(max_bx_, bx);
    max_by_ = std::max(max_by_, by);
    buckets_[key(bx, by)].push_back(static_cast<std::int32_t>(p));
  }
}

void SpatialBuckets::gather(Scalar cx, Scalar cy, std::vector<std::int32_t>& out) const {
  out.clear();
  if (pts_.size() == 0) {
    return;
  }
  const auto bucket_floor = [](Scalar v, Scalar lo, Scalar w) {
    return static_cast<std::int64_t>(std::floor((v - lo) / w));
  };
  const std::int64_t bx0 = std::max<std::int64_t>(0, bucket_floor(cx - width_x_, min_x_, width_x_));
  const std::int64_t bx1 = std::min(max_bx_, bucket_floor(cx + width_x_, min_x_, width_x_));
  const std::int64_t by0 = std::max<std::int64_t>(0, bucket_floor(cy - width_y_, min_y_, width_y_));
  const std::int64_t by1 = std::min(max_by_, bucket_floor(cy + width_y_, min_y_, width_y_));
  for (std::int64_t bx = bx0; bx <= bx1; ++bx) {
    for (std::int64_t by = by0; by <= by1; ++by) {
      const auto it = buckets_.find(key(bx, by));
      if (it != buckets_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace stkde::detail
