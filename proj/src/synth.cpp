#include "stkde/synth.hpp"

#include "stkde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace stkde {

Point2 ClusterSpec::position_at(Scalar t) const {
  if (trajectory.empty()) {
    throw ValidationError("ClusterSpec: trajectory needs at least one knot");
  }
  if (t <= trajectory.front().t) {
    return trajectory.front().position;
  }
  if (t >= trajectory.back().t) {
    return trajectory.back().position;
  }
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    if (t <= trajectory[k].t) {
      const Knot& lo = trajectory[k - 1];
      const Knot& hi = trajectory[k];
      const Scalar w = (t - lo.t) / (hi.t - lo.t);
      return {lo.position.x + w * (hi.position.x - lo.position.x),
              lo.position.y + w * (hi.position.y - lo.position.y)};
    }
  }
  return trajectory.back().position;  // unreachable
}

LandUseGrid generate_landuse(const GridSpec2D& spec, Scalar eligible_fraction,
                             std::uint64_t seed) {
  spec.validate();
  if (!(eligible_fraction > 0) || eligible_fraction > 1) {
    throw ValidationError("generate_landuse: eligible_fraction must lie in (0, 1]");
  }
  const Index cells = spec.cell_count();
  const auto n_eligible =
      static_cast<Index>(std::llround(eligible_fraction * static_cast<Scalar>(cells)));
  if (n_eligible == 0) {
    throw ValidationError("generate_landuse: requested zero eligible cells");
  }

  // Partial Fisher-Yates over row-major flat indices.
  std::vector<Index> flat(static_cast<std::size_t>(cells));
  std::iota(flat.begin(), flat.end(), 0);
  Rng rng(seed);
  for (Index s = 0; s < n_eligible; ++s) {
    const auto pick =
        s + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(cells - s)));
    std::swap(flat[static_cast<std::size_t>(s)], flat[static_cast<std::size_t>(pick)]);
  }

  LandUseGrid grid{spec,
                   Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                       spec.n_rows, spec.n_cols,
                       static_cast<std::uint8_t>(LandUse::InStudyNonEligible))};
  for (Index s = 0; s < n_eligible; ++s) {
    const Index f = flat[static_cast<std::size_t>(s)];
    grid.classes(f / spec.n_cols, f % spec.n_cols) =
        static_cast<std::uint8_t>(LandUse::Eligible);
  }
  return grid;
}

std::vector<Incident> generate_incidents(const SynthProcessSpec& process,
                                         const LandUseGrid& land_use, const TimeWindow& window) {
  land_use.validate();
  window.validate();
  if (process.background_rate < 0) {
    throw ValidationError("generate_incidents: background_rate must be nonnegative");
  }
  const GridSpec2D& g = land_use.spec;
  const auto eligible = land_use.eligible_cells();
  Rng rng(process.master_seed);
  std::vector<Incident> incidents;

  const auto background_count = rng.poisson(process.background_rate * window.length());
  for (std::int64_t e = 0; e < background_count; ++e) {
    const CellIndex cell = eligible[rng.uniform_below(eligible.size())];
    Incident inc;
    inc.id = "b" + std::to_string(e);
    inc.x = g.x_origin + (static_cast<Scalar>(cell.i) + rng.uniform()) * g.cell_size;
    inc.y = g.y_origin + (static_cast<Scalar>(cell.j) + rng.uniform()) * g.cell_size;
    inc.t = window.start + rng.uniform() * window.length();
    incidents.push_back(std::move(inc));
  }

  constexpr int kMaxRetries = 1000;
  for (std::size_t c = 0; c < process.clusters.size(); ++c) {
    const ClusterSpec& cluster = process.clusters[c];
    if (cluster.count < 0 || !(cluster.spread >= 0)) {
      throw ValidationError("generate_incidents: bad cluster " + std::to_string(c));
    }
    const Scalar t_lo = std::max(window.start, cluster.extent.start);
    const Scalar t_hi = std::min(window.end, cluster.extent.end);
    if (cluster.count > 0 && !(t_lo < t_hi)) {
      throw ValidationError("generate_incidents: cluster " + std::to_string(c) +
                            " has no overlap with the data window");
    }
    for (Index e = 0; e < cluster.count; ++e) {
      const Scalar t = t_lo + rng.uniform() * (t_hi - t_lo);
      const Point2 center = cluster.position_at(t);
      bool placed = false;
      for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const Scalar x = center.x + cluster.spread * rng.normal();
        const Scalar y = center.y + cluster.spread * rng.normal();
        const auto cell = world_to_cell(x, y, g);
        if (cell && land_use.eligible(cell->i, cell->j)) {
          Incident inc;
          inc.id = "c" + std::to_string(c) + "-" + std::to_string(e);
          inc.x = x;
          inc.y = y;
          inc.t = t;
          incidents.push_back(std::move(inc));
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw ValidationError("generate_incidents: cluster " + std::to_string(c) +
                              " exceeded the rejection-sampling retry bound; move it inside "
                              "eligible land use or enlarge the eligible area");
      }
    }
  }
  return incidents;
}

SynthProcessSpec drifting_cluster_preset(const GridSpec2D& extent, const TimeWindow& window,
                                         std::uint64_t seed) {
  extent.validate();
  window.validate();
  const Scalar span_x = extent.extent_x();
  const Scalar span_y = extent.extent_y();
  const Scalar spread = 0.06 * std::min(span_x, span_y);

  ClusterSpec cluster;
  cluster.trajectory = {
      {window.start, {extent.x_origin + 0.2 * span_x, extent.y_origin + 0.2 * span_y}},
      {window.end, {extent.x_origin + 0.8 * span_x, extent.y_origin + 0.8 * span_y}},
  };
  cluster.spread = spread;
  cluster.extent = window;
  cluster.count = static_cast<Index>(std::llround(4.0 * window.length()));

  SynthProcessSpec process;
  process.background_rate = 2.0;
  process.clusters.push_back(std::move(cluster));
  process.master_seed = seed;
  return process;
}

}  // namespace stkde
