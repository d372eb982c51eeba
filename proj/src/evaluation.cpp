#include "stkde/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stkde {

namespace {

constexpr Scalar kNaN = std::numeric_limits<Scalar>::quiet_NaN();

// Candidate cells (significant and in-study) ordered by descending density,
// ascending row-major index on ties. Every hotspot set is a prefix.
std::vector<Index> ranked_candidates(const DensitySurface& surface, const BoolRaster& significant,
                                     const LandUseGrid& land_use) {
  const GridSpec2D& g = surface.spec;
  if (land_use.spec != g) {
    throw ValidationError("select_hotspots: land use misaligned with surface");
  }
  if (significant.rows() != g.n_rows || significant.cols() != g.n_cols) {
    throw ValidationError("select_hotspots: significance mask misaligned with surface");
  }
  std::vector<Index> cells;
  for (Index j = 0; j < g.n_rows; ++j) {
    for (Index i = 0; i < g.n_cols; ++i) {
      if (significant(j, i) && land_use.in_study(i, j)) {
        cells.push_back(g.flat(i, j));
      }
    }
  }
  const auto density = [&](Index flat) { return surface.values(flat / g.n_cols, flat % g.n_cols); };
  std::sort(cells.begin(), cells.end(), [&](Index a, Index b) {
    const Scalar da = density(a);
    const Scalar db = density(b);
    if (da != db) return da > db;
    return a < b;
  });
  return cells;
}

Index hotspot_target(const LandUseGrid& land_use, Scalar area_pct) {
  if (!(area_pct > 0) || area_pct > 100) {
    throw ValidationError("hotspots: area_pct must lie in (0, 100]");
  }
  return static_cast<Index>(
      std::llround(area_pct / 100.0 * static_cast<Scalar>(land_use.study_cell_count())));
}

}  // namespace

std::vector<PredictionGroup> build_prediction_groups(const TimeWindow& data_window,
                                                     Scalar first_forecast_start, Scalar horizon,
                                                     Scalar training_length, int group_count) {
  data_window.validate();
  if (!(horizon > 0) || !(training_length > 0)) {
    throw ValidationError("build_prediction_groups: horizon and training length must be positive");
  }
  if (group_count < 1) {
    throw ValidationError("build_prediction_groups: group_count must be >= 1");
  }
  std::vector<PredictionGroup> groups;
  groups.reserve(static_cast<std::size_t>(group_count));
  for (int g = 1; g <= group_count; ++g) {
    // Ends are computed the same way as the next group's start, so windows
    // tile exactly.
    const Scalar start = first_forecast_start + static_cast<Scalar>(g - 1) * horizon;
    const Scalar end = first_forecast_start + static_cast<Scalar>(g) * horizon;
    PredictionGroup group{g, {start - training_length, start}, {start, end}};
    if (group.training.start < data_window.start || group.forecast.end > data_window.end) {
      throw ValidationError("build_prediction_groups: group " + std::to_string(g) +
                            " does not fit inside the data window");
    }
    groups.push_back(group);
  }
  return groups;
}

HotspotSelection select_hotspots(const DensitySurface& surface, const BoolRaster& significant,
                                 const LandUseGrid& land_use, Scalar area_pct) {
  const std::vector<Index> ranked = ranked_candidates(surface, significant, land_use);
  HotspotSelection sel;
  sel.target = hotspot_target(land_use, area_pct);
  sel.feasible = static_cast<Index>(ranked.size()) >= sel.target;
  const auto take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(sel.target));
  sel.cells.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
  return sel;
}

Scalar hit_rate(std::span<const Index> hotspot_cells, std::span<const Incident> test_incidents,
                const GridSpec2D& spec) {
  spec.validate();
  std::vector<char> is_hotspot(static_cast<std::size_t>(spec.cell_count()), 0);
  for (Index flat : hotspot_cells) {
    is_hotspot[static_cast<std::size_t>(flat)] = 1;
  }
  Index inside = 0;
  Index captured = 0;
  for (const Incident& inc : test_incidents) {
    const auto cell = world_to_cell(inc.x, inc.y, spec);
    if (!cell) {
      continue;
    }
    ++inside;
    if (is_hotspot[static_cast<std::size_t>(spec.flat(cell->i, cell->j))]) {
      ++captured;
    }
  }
  if (inside == 0) {
    throw ValidationError("hit_rate: no test incidents fall inside the grid");
  }
  return static_cast<Scalar>(captured) / static_cast<Scalar>(inside);
}

Scalar pai(Scalar hit_rate, Scalar area_fraction) {
  if (!(area_fraction > 0) || area_fraction > 1) {
    throw ValidationError("pai: area_fraction must lie in (0, 1]");
  }
  return hit_rate / area_fraction;
}

PAICurve pai_curve(const DensitySurface& surface, const BoolRaster& significant,
                   const LandUseGrid& land_use, std::span<const Incident> test_incidents,
                   Scalar scale_min, Scalar scale_max, Scalar scale_step) {
  if (!(scale_step > 0) || scale_min < 0 || !(scale_max > scale_min) || scale_max > 100) {
    throw ValidationError("pai_curve: bad scale sweep parameters");
  }
  const std::vector<Index> ranked = ranked_candidates(surface, significant, land_use);
  const GridSpec2D& g = surface.spec;

  // Rank each test incident's cell among the candidates; prefix sums then
  // give the capture count for every prefix-shaped hotspot set at once.
  std::vector<Index> cell_rank(static_cast<std::size_t>(g.cell_count()), -1);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    cell_rank[static_cast<std::size_t>(ranked[r])] = static_cast<Index>(r);
  }
  Index inside = 0;
  std::vector<Index> hits_by_rank(ranked.size() + 1, 0);
  for (const Incident& inc : test_incidents) {
    const auto cell = world_to_cell(inc.x, inc.y, g);
    if (!cell) {
      continue;
    }
    ++inside;
    const Index rank = cell_rank[static_cast<std::size_t>(g.flat(cell->i, cell->j))];
    if (rank >= 0) {
      ++hits_by_rank[static_cast<std::size_t>(rank) + 1];
    }
  }
  if (inside == 0) {
    throw ValidationError("pai_curve: no test incidents fall inside the grid");
  }
  std::partial_sum(hits_by_rank.begin(), hits_by_rank.end(), hits_by_rank.begin());

  const auto n_scales =
      static_cast<Index>(std::floor((scale_max - scale_min) / scale_step + 1e-6));
  const Scalar study_cells = static_cast<Scalar>(land_use.study_cell_count());

  PAICurve curve;
  curve.points.reserve(static_cast<std::size_t>(n_scales));
  for (Index m = 1; m <= n_scales; ++m) {
    const Scalar area_pct = scale_min + scale_step * static_cast<Scalar>(m);
    const auto target =
        static_cast<Index>(std::llround(area_pct / 100.0 * study_cells));
    PAIPoint point;
    point.area_pct = area_pct;
    point.hotspot_cells = static_cast<Scalar>(target);
    if (target <= static_cast<Index>(ranked.size())) {
      point.feasible = true;
      point.hit_rate =
          static_cast<Scalar>(hits_by_rank[static_cast<std::size_t>(target)]) /
          static_cast<Scalar>(inside);
      point.pai = point.hit_rate / (area_pct / 100.0);
    }
    curve.points.push_back(point);
  }
  return curve;
}

PAICurve consolidate_curves(const std::vector<PAICurve>& curves) {
  if (curves.empty()) {
    throw ValidationError("consolidate_curves: no curves given");
  }
  const std::size_t n_points = curves.front().points.size();
  for (const PAICurve& c : curves) {
    if (c.points.size() != n_points) {
      throw ValidationError("consolidate_curves: curves use different scale lattices");
    }
    for (std::size_t m = 0; m < n_points; ++m) {
      if (c.points[m].area_pct != curves.front().points[m].area_pct) {
        throw ValidationError("consolidate_curves: curves use different scale lattices");
      }
    }
  }

  PAICurve mean_curve;
  mean_curve.points.resize(n_points);
  for (std::size_t m = 0; m < n_points; ++m) {
    PAIPoint& out = mean_curve.points[m];
    out.area_pct = curves.front().points[m].area_pct;
    out.feasible = true;
    Scalar hit_sum = 0, cell_sum = 0;
    Scalar feasible_count = 0;
    for (const PAICurve& c : curves) {
      const PAIPoint& p = c.points[m];
      out.feasible = out.feasible && p.feasible;
      if (p.feasible) {
        hit_sum += p.hit_rate;
        cell_sum += p.hotspot_cells;
        feasible_count += 1;
      }
    }
    if (feasible_count > 0) {
      out.hit_rate = hit_sum / feasible_count;
      out.hotspot_cells = cell_sum / feasible_count;
      // mean PAI recomputed from the mean hit rate; identical to the mean of
      // per-curve PAIs and keeps pai = hit_rate / (area_pct/100) exact
      out.pai = out.hit_rate / (out.area_pct / 100.0);
    } else {
      out.feasible = false;
    }
  }
  return mean_curve;
}

MethodComparison compare_methods(
    const std::map<std::string, std::vector<PAICurve>>& curves_by_method) {
  if (curves_by_method.size() < 2) {
    throw ValidationError("compare_methods: needs at least two methods");
  }
  const std::size_t group_count = curves_by_method.begin()->second.size();
  if (group_count < 2) {
    throw ValidationError("compare_methods: needs at least two prediction groups");
  }
  std::vector<PAICurve> all_curves;
  for (const auto& [method, curves] : curves_by_method) {
    if (curves.size() != group_count) {
      throw ValidationError("compare_methods: group counts differ between methods");
    }
    all_curves.insert(all_curves.end(), curves.begin(), curves.end());
  }
  consolidate_curves(all_curves);  // lattice alignment check

  MethodComparison cmp;
  const std::size_t n_scales = all_curves.front().points.size();
  for (const auto& [method, curves] : curves_by_method) {
    cmp.methods.push_back(method);
    auto& rows = cmp.scores[method];
    rows.resize(group_count, std::vector<Scalar>(n_scales, kNaN));
    for (std::size_t g = 0; g < group_count; ++g) {
      for (std::size_t m = 0; m < n_scales; ++m) {
        if (curves[g].points[m].feasible) {
          rows[g][m] = curves[g].points[m].pai;
        }
      }
    }
  }
  cmp.scales.reserve(n_scales);
  for (const PAIPoint& p : all_curves.front().points) {
    cmp.scales.push_back(p.area_pct);
  }

  const auto available = [&](const std::string& method, std::size_t m) {
    const auto& rows = cmp.scores.at(method);
    return std::all_of(rows.begin(), rows.end(),
                       [m](const std::vector<Scalar>& r) { return !std::isnan(r[m]); });
  };

  for (std::size_t m = 0; m < n_scales; ++m) {
    std::vector<std::string> methods_here;
    for (const std::string& method : cmp.methods) {
      if (available(method, m)) {
        methods_here.push_back(method);
      }
    }
    if (methods_here.size() >= 3) {
      std::vector<std::vector<Scalar>> groups;
      for (const auto& method : methods_here) {
        std::vector<Scalar> column;
        for (const auto& row : cmp.scores.at(method)) {
          column.push_back(row[m]);
        }
        groups.push_back(std::move(column));
      }
      cmp.anova_rows.push_back({cmp.scales[m], methods_here, anova_one_way(groups)});
    }
    for (std::size_t a = 0; a < methods_here.size(); ++a) {
      for (std::size_t b = a + 1; b < methods_here.size(); ++b) {
        std::vector<Scalar> va, vb;
        for (const auto& row : cmp.scores.at(methods_here[a])) va.push_back(row[m]);
        for (const auto& row : cmp.scores.at(methods_here[b])) vb.push_back(row[m]);
        cmp.t_rows.push_back({cmp.scales[m], methods_here[a], methods_here[b],
                              welch_t_test(va, vb)});
      }
    }
  }

  // Scales feasible for every method and group support the overall
  // comparison of per-group mean PAI.
  std::vector<std::size_t> common;
  for (std::size_t m = 0; m < n_scales; ++m) {
    if (std::all_of(cmp.methods.begin(), cmp.methods.end(),
                    [&](const std::string& method) { return available(method, m); })) {
      common.push_back(m);
      cmp.common_scales.push_back(cmp.scales[m]);
    }
  }
  if (!common.empty()) {
    std::vector<std::vector<Scalar>> per_method_group_means;
    for (const std::string& method : cmp.methods) {
      std::vector<Scalar> group_means;
      Scalar method_sum = 0;
      for (const auto& row : cmp.scores.at(method)) {
        Scalar sum = 0;
        for (std::size_t m : common) sum += row[m];
        group_means.push_back(sum / static_cast<Scalar>(common.size()));
        method_sum += group_means.back();
      }
      cmp.mean_pai[method] = method_sum / static_cast<Scalar>(group_count);
      per_method_group_means.push_back(std::move(group_means));
    }
    if (cmp.methods.size() >= 3) {
      cmp.overall_anova = anova_one_way(per_method_group_means);
    }
    for (std::size_t a = 0; a < cmp.methods.size(); ++a) {
      for (std::size_t b = a + 1; b < cmp.methods.size(); ++b) {
        cmp.overall_pairs.push_back({cmp.methods[a], cmp.methods[b],
                                     welch_t_test(per_method_group_means[a],
                                                  per_method_group_means[b])});
      }
    }
  }
  return cmp;
}

}  // namespace stkde
