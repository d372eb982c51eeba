#pragma once

#include "stkde/stats.hpp"
#include "stkde/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stkde {

/// One rolling train/test pair: densities are estimated from the training
/// window (Time 1) and scored against incidents in the forecast window
/// (Time 2).
struct PredictionGroup {
  int index = 1;  // 1-based
  TimeWindow training;
  TimeWindow forecast;
};

/// Group g forecasts [first_forecast_start + (g-1) * horizon, + horizon) and
/// trains on the immediately preceding training_length days. Consecutive
/// forecast windows tile exactly. Errors when any group leaves data_window.
std::vector<PredictionGroup> build_prediction_groups(const TimeWindow& data_window,
                                                     Scalar first_forecast_start, Scalar horizon,
                                                     Scalar training_length, int group_count);

/// Top-density significant in-study cells, up to round(area_pct/100 * study
/// cell count). Cutoff ties break by ascending row-major index. feasible is
/// false when there are fewer significant cells than the target.
struct HotspotSelection {
  std::vector<Index> cells;  // row-major flat indices, highest density first
  Index target = 0;
  bool feasible = true;
};

HotspotSelection select_hotspots(const DensitySurface& surface, const BoolRaster& significant,
                                 const LandUseGrid& land_use, Scalar area_pct);

/// Fraction of test incidents captured by the hotspot cells, over all test
/// incidents that fall inside the grid. Errors when none do.
Scalar hit_rate(std::span<const Index> hotspot_cells, std::span<const Incident> test_incidents,
                const GridSpec2D& spec);

/// PAI = hit_rate / area_fraction (Chainey's predictive accuracy index).
Scalar pai(Scalar hit_rate, Scalar area_fraction);

struct PAIPoint {
  Scalar area_pct = 0;
  Scalar hotspot_cells = 0;  // fractional in consolidated curves
  Scalar hit_rate = 0;
  Scalar pai = 0;
  bool feasible = false;
};

struct PAICurve {
  std::vector<PAIPoint> points;  // strictly increasing area_pct
};

/// Sweeps hotspot selection over area scales scale_min + step, ..., up to
/// scale_max, computing hit rate and PAI per scale. Scales whose hotspot
/// target exceeds the number of significant cells are flagged infeasible and
/// excluded from downstream statistics.
PAICurve pai_curve(const DensitySurface& surface, const BoolRaster& significant,
                   const LandUseGrid& land_use, std::span<const Incident> test_incidents,
                   Scalar scale_min, Scalar scale_max, Scalar scale_step);

/// Pointwise mean of hit rate (and PAI) across curves on the same scale
/// lattice. A scale is feasible in the output only when feasible in every
/// input; the mean at such scales is taken over all inputs.
PAICurve consolidate_curves(const std::vector<PAICurve>& curves);

/// ANOVA / t-test comparison of per-group PAI scores across methods.
/// A method is available at a scale when all of its groups are feasible
/// there; ANOVA rows cover scales with >= 3 available methods, pairwise
/// Welch t rows every available pair. Overall tests compare per-group mean
/// PAI over the scales feasible for every method and group.
struct MethodComparison {
  struct ScaleAnova {
    Scalar area_pct = 0;
    std::vector<std::string> methods;
    TestResult result;
  };
  struct ScalePair {
    Scalar area_pct = 0;
    std::string method_a, method_b;
    TestResult result;
  };
  struct OverallPair {
    std::string method_a, method_b;
    TestResult result;
  };

  std::vector<std::string> methods;
  std::vector<Scalar> scales;
  // method -> per-group PAI by scale; NaN where infeasible
  std::map<std::string, std::vector<std::vector<Scalar>>> scores;
  std::vector<ScaleAnova> anova_rows;
  std::vector<ScalePair> t_rows;
  std::vector<Scalar> common_scales;  // feasible for every method and group
  std::map<std::string, Scalar> mean_pai;  // consolidated mean over common scales
  std::optional<TestResult> overall_anova;
  std::vector<OverallPair> overall_pairs;
};

MethodComparison compare_methods(const std::map<std::string, std::vector<PAICurve>>& curves_by_method);

}  // namespace stkde
