#pragma once

#include "stkde/bandwidth.hpp"
#include "stkde/estimators.hpp"
#include "stkde/evaluation.hpp"
#include "stkde/io.hpp"
#include "stkde/significance.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stkde {

enum class Method { Stkde, Skde, Promap };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// The full rolling evaluation: (optional) bandwidth optimization on the
/// pre-forecast window, then per prediction group and method an observed
/// surface, a Monte-Carlo significance mask, and a PAI curve; finally per
/// method a consolidated mean curve.
struct EvaluateConfig {
  Scalar t_bin = 1.0;
  TimeWindow data_window;
  Scalar first_forecast_start = 0;
  Scalar horizon = 7;
  Scalar training_length = 30.4375;  // mean Gregorian month
  int group_count = 8;
  std::vector<Method> methods = {Method::Stkde, Method::Skde, Method::Promap};
  std::optional<Bandwidths> bandwidths;             // optimized when absent
  std::optional<BandwidthSearchConfig> search;      // defaults when absent
  Index replicates = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Scalar scale_min = 0;
  Scalar scale_max = 25;
  Scalar scale_step = 0.1;
  std::optional<PromapParams> promap;               // d_unit defaults to the cell size
  KernelId kernel = KernelId::Epanechnikov;
  int workers = 1;
};

struct EvaluateOutput {
  std::vector<PredictionGroup> groups;
  Bandwidths bandwidths;
  std::optional<BandwidthResult> optimization;  // present when bandwidths were searched
  std::map<std::string, io::MethodCurves> methods;
};

EvaluateOutput run_evaluation(std::span<const Incident> incidents, const LandUseGrid& land_use,
                              const EvaluateConfig& config);

}  // namespace stkde
