#include "stkde/pipeline.hpp"

#include "stkde/rng.hpp"

#include <algorithm>
#include <cmath>

namespace stkde {

std::string method_name(Method m) {
  switch (m) {
    case Method::Stkde:
      return "STKDE";
    case Method::Skde:
      return "SKDE";
    case Method::Promap:
      return "PROMAP";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "STKDE") return Method::Stkde;
  if (name == "SKDE") return Method::Skde;
  if (name == "PROMAP") return Method::Promap;
  throw ValidationError("unknown method '" + name + "' (available: STKDE, SKDE, PROMAP)");
}

namespace {

std::vector<Incident> incidents_in(std::span<const Incident> incidents, const TimeWindow& window) {
  std::vector<Incident> out;
  for (const Incident& inc : incidents) {
    if (window.contains(inc.t)) {
      out.push_back(inc);
    }
  }
  return out;
}

}  // namespace

EvaluateOutput run_evaluation(std::span<const Incident> incidents, const LandUseGrid& land_use,
                              const EvaluateConfig& config) {
  land_use.validate();
  if (config.methods.empty()) {
    throw ValidationError("run_evaluation: no methods selected");
  }
  if (!(config.t_bin > 0)) {
    throw ValidationError("run_evaluation: t_bin must be positive");
  }
  if (config.replicates < 1) {
    throw ValidationError("run_evaluation: needs at least one null replicate");
  }

  EvaluateOutput output;
  output.groups = build_prediction_groups(config.data_window, config.first_forecast_start,
                                          config.horizon, config.training_length,
                                          config.group_count);

  const GridSpec2D& spatial = land_use.spec;
  const Index forecast_bins = std::max<Index>(
      1, static_cast<Index>(std::ceil(config.horizon / config.t_bin - 1e-9)));

  // Bandwidths come from the whole pre-forecast period, as in a single
  // training/prediction split; the rolling groups then reuse them.
  if (config.bandwidths) {
    config.bandwidths->validate();
    output.bandwidths = *config.bandwidths;
  } else {
    const TimeWindow fit_window{config.data_window.start, config.first_forecast_start};
    const auto fit_incidents = incidents_in(incidents, fit_window);
    if (fit_incidents.size() < 2) {
      throw ValidationError("run_evaluation: too few incidents before the first forecast "
                            "window to optimize bandwidths");
    }
    BandwidthSearchConfig search;
    if (config.search) {
      search = *config.search;
    } else {
      const GridSpec3D grid{spatial, fit_window.start, config.t_bin,
                            std::max<Index>(1, static_cast<Index>(std::ceil(
                                                   fit_window.length() / config.t_bin)))};
      search = default_search_config(grid, fit_window);
    }
    output.optimization = optimize_bandwidths(fit_incidents, search, config.kernel,
                                              config.workers);
    output.bandwidths = output.optimization->bw;
  }
  const Bandwidths bw = output.bandwidths;
  const Scalar skde_h = std::max(bw.h_x, bw.h_y);
  const PromapParams promap =
      config.promap ? *config.promap : PromapParams::for_cell_size(spatial.cell_size);

  std::map<std::string, io::MethodCurves> per_method;
  for (const PredictionGroup& group : output.groups) {
    const auto training = incidents_in(incidents, group.training);
    const auto test = incidents_in(incidents, group.forecast);
    if (training.empty()) {
      throw ValidationError("run_evaluation: group " + std::to_string(group.index) +
                            " has no training incidents");
    }
    if (test.empty()) {
      throw ValidationError("run_evaluation: group " + std::to_string(group.index) +
                            " has no test incidents");
    }

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      const Method method = config.methods[m];
      SurfaceEstimator estimate;
      switch (method) {
        case Method::Stkde: {
          const GridSpec3D grid{spatial, group.forecast.start, config.t_bin, forecast_bins};
          estimate = [&, grid](std::span<const Incident> obs) {
            return marginalize_time(stkde_volume(obs, grid, bw, config.kernel, 1));
          };
          break;
        }
        case Method::Skde:
          estimate = [&](std::span<const Incident> obs) {
            return skde_surface(obs, spatial, skde_h, config.kernel, 1);
          };
          break;
        case Method::Promap:
          estimate = [&, t_ref = group.forecast.start](std::span<const Incident> obs) {
            return promap_surface(obs, spatial, promap, t_ref, 1);
          };
          break;
      }

      const DensitySurface observed = estimate(training);
      const std::uint64_t method_seed = sub_seed(
          sub_seed(config.seed, static_cast<std::uint64_t>(group.index)),
          static_cast<std::uint64_t>(method));
      const NullEnsemble ensemble = build_null_ensemble_custom(
          static_cast<Index>(training.size()), land_use, group.training, spatial, estimate,
          config.replicates, method_seed, config.workers);
      const SignificanceResult significance =
          classify_significance(observed, ensemble, config.alpha);

      per_method[method_name(method)].groups.push_back(
          pai_curve(observed, significance.significant[0], land_use, test, config.scale_min,
                    config.scale_max, config.scale_step));
    }
  }

  for (auto& [name, curves] : per_method) {
    curves.mean = consolidate_curves(curves.groups);
  }
  output.methods = std::move(per_method);
  return output;
}

}  // namespace stkde
