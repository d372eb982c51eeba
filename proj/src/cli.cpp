#include "stkde/cli.hpp"

#include "stkde/pipeline.hpp"
#include "stkde/synth.hpp"
#include "stkde/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

namespace stkde {

namespace {

namespace fs = std::filesystem;

/// Malformed flag values. The CLI maps this to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Scalar> parse_numbers(const std::string& text, std::size_t count, const char* flag) {
  std::vector<Scalar> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string field =
        pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
    Scalar v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw UsageError(std::string(flag) + ": expected " + std::to_string(count) +
                       " comma-separated numbers, got '" + text + "'");
    }
    values.push_back(v);
    if (pos == std::string::npos) {
      break;
    }
    start = pos + 1;
  }
  if (values.size() != count) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(count) +
                     " comma-separated numbers, got '" + text + "'");
  }
  return values;
}

Bandwidths parse_bandwidths_flag(const std::string& text) {
  const auto v = parse_numbers(text, 3, "--bandwidths");
  return {v[0], v[1], v[2]};
}

TimeWindow parse_window_flag(const std::string& text, const char* flag) {
  const auto v = parse_numbers(text, 2, flag);
  return {v[0], v[1]};
}

struct Extent {
  Scalar min_x, max_x, min_y, max_y, min_t, max_t;
};

Extent extent_of(std::span<const Incident> incidents) {
  Extent e{incidents[0].x, incidents[0].x, incidents[0].y,
           incidents[0].y, incidents[0].t, incidents[0].t};
  for (const Incident& inc : incidents) {
    e.min_x = std::min(e.min_x, inc.x);
    e.max_x = std::max(e.max_x, inc.x);
    e.min_y = std::min(e.min_y, inc.y);
    e.max_y = std::max(e.max_y, inc.y);
    e.min_t = std::min(e.min_t, inc.t);
    e.max_t = std::max(e.max_t, inc.t);
  }
  return e;
}

std::string num(Scalar v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

// ---------------------------------------------------------------------------
// per-subcommand option bags

struct GridFlags {
  std::string landuse_path;
  std::string origin = "0,0";
  Scalar cell = 100;
  Index cols = 0;
  Index rows = 0;

  void attach(CLI::App* cmd, bool allow_landuse = true) {
    if (allow_landuse) {
      cmd->add_option("--landuse", landuse_path, "land-use raster providing the spatial layout");
    }
    cmd->add_option("--grid-origin", origin, "lower-left corner as x,y meters");
    cmd->add_option("--grid-cell", cell, "cell size in meters");
    cmd->add_option("--grid-cols", cols, "number of columns");
    cmd->add_option("--grid-rows", rows, "number of rows");
  }

  GridSpec2D resolve(std::optional<LandUseGrid>* land_use_out = nullptr) const {
    if (!landuse_path.empty()) {
      LandUseGrid grid = io::landuse_from_ascii(io::read_ascii_grid(landuse_path));
      const GridSpec2D spec = grid.spec;
      if (land_use_out) {
        *land_use_out = std::move(grid);
      }
      return spec;
    }
    if (cols <= 0 || rows <= 0) {
      throw UsageError("provide either --landuse or --grid-cols/--grid-rows");
    }
    const auto o = parse_numbers(origin, 2, "--grid-origin");
    GridSpec2D spec{o[0], o[1], cell, cols, rows};
    spec.validate();
    return spec;
  }
};

struct TimeFlags {
  std::optional<Scalar> t_start;
  Scalar t_bin = 1.0;
  std::optional<Index> t_bins;

  void attach(CLI::App* cmd) {
    cmd->add_option("--t-start", t_start, "time axis origin in days (default: floor of min t)");
    cmd->add_option("--t-bin", t_bin, "temporal voxel depth in days");
    cmd->add_option("--t-bins", t_bins, "number of time bins (default: cover the data)");
  }

  GridSpec3D resolve(const GridSpec2D& spatial, std::span<const Incident> incidents) const {
    const Extent e = extent_of(incidents);
    const Scalar start = t_start ? *t_start : std::floor(e.min_t);
    Index bins;
    if (t_bins) {
      bins = *t_bins;
    } else {
      bins = std::max<Index>(1, static_cast<Index>(std::ceil((e.max_t - start) / t_bin + 1e-9)));
    }
    GridSpec3D spec{spatial, start, t_bin, bins};
    spec.validate();
    return spec;
  }
};

struct SearchFlags {
  std::string bounds;
  int lattice = 12;
  int refine_iters = 200;
  Scalar tolerance = 1e-8;

  void attach(CLI::App* cmd) {
    cmd->add_option("--search-bounds", bounds,
                    "bandwidth bounds as xlo,xhi,ylo,yhi,tlo,thi (default: one cell/bin up to "
                    "half the extent)");
    cmd->add_option("--lattice", lattice, "coarse lattice points per axis");
    cmd->add_option("--refine-iters", refine_iters, "Nelder-Mead refinement iterations");
    cmd->add_option("--tolerance", tolerance, "relative objective convergence tolerance");
  }

  BandwidthSearchConfig resolve(std::span<const Incident> incidents, Scalar cell,
                                Scalar t_bin) const {
    BandwidthSearchConfig config;
    if (!bounds.empty()) {
      const auto v = parse_numbers(bounds, 6, "--search-bounds");
      config.lower = {v[0], v[2], v[4]};
      config.upper = {v[1], v[3], v[5]};
    } else {
      const Extent e = extent_of(incidents);
      config.lower = {cell, cell, t_bin};
      config.upper = {(e.max_x - e.min_x) / 2, (e.max_y - e.min_y) / 2, (e.max_t - e.min_t) / 2};
    }
    config.lattice = {lattice, lattice, lattice};
    config.max_refine_iterations = refine_iters;
    config.tolerance = tolerance;
    config.validate();
    return config;
  }
};

// ---------------------------------------------------------------------------

void run_optimize(const std::string& incidents_path, const SearchFlags& search, Scalar cell,
                  Scalar t_bin, const std::string& kernel, int workers) {
  const auto csv = io::read_incidents_csv(incidents_path);
  for (const std::string& w : csv.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  const auto config = search.resolve(csv.incidents, cell, t_bin);
  const BandwidthResult result =
      optimize_bandwidths(csv.incidents, config, parse_kernel(kernel), workers);
  if (result.duplicate_fraction > 0.10) {
    std::cerr << "warning: " << num(result.duplicate_fraction * 100)
              << "% of incidents share exact coordinates with another record\n";
  }
  std::cout << "h_x=" << num(result.bw.h_x) << "\n"
            << "h_y=" << num(result.bw.h_y) << "\n"
            << "h_t=" << num(result.bw.h_t) << "\n"
            << "ln_L=" << num(result.log_likelihood) << "\n"
            << "evaluations=" << result.evaluations << "\n";
}

void run_estimate(const std::string& incidents_path, const GridFlags& grid_flags,
                  const TimeFlags& time_flags, const std::string& bandwidths_text,
                  const std::string& kernel, const std::string& out_dir, int workers) {
  const Bandwidths bw = parse_bandwidths_flag(bandwidths_text);
  const auto csv = io::read_incidents_csv(incidents_path);
  for (const std::string& w : csv.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  const GridSpec2D spatial = grid_flags.resolve();
  const GridSpec3D spec = time_flags.resolve(spatial, csv.incidents);
  const DensityVolume volume =
      stkde_volume(csv.incidents, spec, bw, parse_kernel(kernel), workers);
  fs::create_directories(out_dir);
  io::write_density_slices(out_dir, "density", volume);
  std::cout << "slices=" << spec.n_bins << "\n";
}

void run_significance(const std::string& incidents_path, const GridFlags& grid_flags,
                      const TimeFlags& time_flags, const std::string& bandwidths_text,
                      const std::string& window_text, Index replicates, double alpha,
                      std::uint64_t seed, const std::string& level_name,
                      const std::string& kernel, const std::string& out_dir, int workers) {
  const Bandwidths bw = parse_bandwidths_flag(bandwidths_text);
  const KernelId kern = parse_kernel(kernel);
  SignificanceLevel level;
  if (level_name == "surface") {
    level = SignificanceLevel::Surface;
  } else if (level_name == "voxel") {
    level = SignificanceLevel::Voxel;
  } else {
    throw UsageError("--level must be 'surface' or 'voxel'");
  }

  const auto csv = io::read_incidents_csv(incidents_path);
  for (const std::string& w : csv.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::optional<LandUseGrid> land_use;
  const GridSpec2D spatial = grid_flags.resolve(&land_use);
  if (!land_use) {
    throw UsageError("significance requires --landuse (eligible cells drive the null)");
  }
  const GridSpec3D spec = time_flags.resolve(spatial, csv.incidents);
  const TimeWindow window =
      window_text.empty()
          ? TimeWindow{spec.t_start, spec.t_start + spec.t_bin * static_cast<Scalar>(spec.n_bins)}
          : parse_window_flag(window_text, "--window");

  const DensityVolume volume = stkde_volume(csv.incidents, spec, bw, kern, workers);
  const NullEnsemble ensemble =
      build_null_ensemble(static_cast<Index>(csv.incidents.size()), *land_use, window, spec, bw,
                          kern, replicates, seed, level, workers);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  if (level == SignificanceLevel::Surface) {
    const SignificanceResult result =
        classify_significance(marginalize_time(volume), ensemble, alpha);
    io::write_ascii_grid(dir / "pvalues.asc",
                         io::to_ascii(DensitySurface{spatial, result.p_values[0]}));
    io::write_ascii_grid(dir / "mask.asc", io::to_ascii(result.significant[0], spatial));
    std::cout << "significant_cells=" << result.significant[0].count() << "\n";
  } else {
    const SignificanceResult result = classify_significance(volume, ensemble, alpha);
    Index total = 0;
    for (Index k = 0; k < spec.n_bins; ++k) {
      const auto ks = std::to_string(k);
      io::write_ascii_grid(dir / ("pvalues_t" + ks + ".asc"),
                           io::to_ascii(DensitySurface{spatial, result.p_values[static_cast<std::size_t>(k)]}));
      io::write_ascii_grid(dir / ("mask_t" + ks + ".asc"),
                           io::to_ascii(result.significant[static_cast<std::size_t>(k)], spatial));
      total += result.significant[static_cast<std::size_t>(k)].count();
    }
    std::cout << "significant_voxels=" << total << "\n";
  }
}

void run_hotspots(const std::string& surface_path, const std::string& mask_path,
                  const std::string& landuse_path, Scalar area_pct, const std::string& out_path) {
  const DensitySurface surface = io::surface_from_ascii(io::read_ascii_grid(surface_path));
  const BoolRaster mask = io::mask_from_ascii(io::read_ascii_grid(mask_path));
  const LandUseGrid land_use = io::landuse_from_ascii(io::read_ascii_grid(landuse_path));
  const HotspotSelection sel = select_hotspots(surface, mask, land_use, area_pct);

  const GridSpec2D& g = surface.spec;
  BoolRaster hotspot = BoolRaster::Constant(g.n_rows, g.n_cols, false);
  for (Index flat : sel.cells) {
    hotspot(flat / g.n_cols, flat % g.n_cols) = true;
  }
  io::AsciiGrid out = io::to_ascii(hotspot, g);
  for (Index j = 0; j < g.n_rows; ++j) {
    for (Index i = 0; i < g.n_cols; ++i) {
      out.nodata(j, i) = !land_use.in_study(i, j);
    }
  }
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  io::write_ascii_grid(out_path, out);
  std::cout << "cells=" << sel.cells.size() << " target=" << sel.target << " feasible="
            << (sel.feasible ? "true" : "false") << "\n";
}

void run_evaluate(const std::string& incidents_path, const std::string& landuse_path,
                  const std::string& methods_text, EvaluateConfig config,
                  const std::string& forecast_start_text, const std::string& data_window_text,
                  const std::string& bandwidths_text, const SearchFlags& search,
                  const std::string& promap_text, const std::string& out_path) {
  config.methods.clear();
  for (const std::string& name : CLI::detail::split(methods_text, ',')) {
    config.methods.push_back(parse_method(name));
  }
  if (!bandwidths_text.empty()) {
    config.bandwidths = parse_bandwidths_flag(bandwidths_text);
  }
  if (!promap_text.empty()) {
    const auto v = parse_numbers(promap_text, 4, "--promap");
    config.promap = PromapParams{v[0], v[1], v[2], v[3]};
  }

  const auto csv = io::read_incidents_csv(incidents_path);
  for (const std::string& w : csv.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  const LandUseGrid land_use = io::landuse_from_ascii(io::read_ascii_grid(landuse_path));

  // --forecast-start takes a day number, or an ISO date when the incidents
  // CSV is calendar-based.
  {
    Scalar v = 0;
    const auto [ptr, ec] = std::from_chars(
        forecast_start_text.data(), forecast_start_text.data() + forecast_start_text.size(), v);
    if (ec == std::errc() && ptr == forecast_start_text.data() + forecast_start_text.size()) {
      config.first_forecast_start = v;
    } else if (const auto serial = io::parse_iso_datetime(forecast_start_text)) {
      if (!csv.calendar) {
        throw ValidationError("--forecast-start is a calendar date but the incidents CSV uses "
                              "numeric days");
      }
      const auto epoch = io::parse_iso_datetime(csv.epoch);
      config.first_forecast_start = *serial - *epoch;
    } else {
      throw UsageError("--forecast-start: expected a day number or ISO date, got '" +
                       forecast_start_text + "'");
    }
  }

  if (data_window_text.empty()) {
    const Extent e = extent_of(csv.incidents);
    config.data_window = {e.min_t, e.max_t + 1e-6};
  } else {
    config.data_window = parse_window_flag(data_window_text, "--data-window");
  }
  if (!config.bandwidths && !search.bounds.empty()) {
    config.search = search.resolve(csv.incidents, land_use.spec.cell_size, config.t_bin);
  }

  const EvaluateOutput output = run_evaluation(csv.incidents, land_use, config);
  if (output.optimization && output.optimization->duplicate_fraction > 0.10) {
    std::cerr << "warning: " << num(output.optimization->duplicate_fraction * 100)
              << "% of incidents share exact coordinates with another record\n";
  }
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  io::write_pai_csv(out_path, output.methods);
  std::cout << "h_x=" << num(output.bandwidths.h_x) << "\n"
            << "h_y=" << num(output.bandwidths.h_y) << "\n"
            << "h_t=" << num(output.bandwidths.h_t) << "\n"
            << "groups=" << output.groups.size() << "\n"
            << "written=" << out_path << "\n";
}

void run_synth(const std::string& out_dir, std::uint64_t seed, Index cols, Index rows,
               Scalar cell, const std::string& origin_text, Scalar eligible_fraction,
               const std::string& window_text, bool preset_drifting, Scalar background_rate,
               const std::vector<std::string>& cluster_texts) {
  const auto o = parse_numbers(origin_text, 2, "--origin");
  const GridSpec2D spec{o[0], o[1], cell, cols, rows};
  spec.validate();
  const TimeWindow window = parse_window_flag(window_text, "--window");

  SynthProcessSpec process;
  if (preset_drifting) {
    process = drifting_cluster_preset(spec, window, sub_seed(seed, 1));
  } else {
    process.background_rate = background_rate;
    process.master_seed = sub_seed(seed, 1);
    for (const std::string& text : cluster_texts) {
      const auto v = parse_numbers(text, 8, "--cluster");
      ClusterSpec cluster;
      cluster.trajectory = {{v[2], {v[0], v[1]}}, {v[5], {v[3], v[4]}}};
      cluster.spread = v[6];
      cluster.extent = {std::min(v[2], v[5]), std::max(v[2], v[5])};
      cluster.count = static_cast<Index>(v[7]);
      process.clusters.push_back(std::move(cluster));
    }
  }

  const LandUseGrid land_use = generate_landuse(spec, eligible_fraction, sub_seed(seed, 0));
  const auto incidents = generate_incidents(process, land_use, window);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  io::write_ascii_grid(dir / "landuse.asc", io::to_ascii(land_use));
  io::write_incidents_csv(dir / "incidents.csv", incidents);
  std::cout << "incidents=" << incidents.size()
            << " eligible_cells=" << land_use.eligible_cell_count() << "\n";
}

void run_compare(const std::string& pai_path, const std::string& out_path) {
  const auto curves = io::read_pai_csv(pai_path);
  std::map<std::string, std::vector<PAICurve>> by_method;
  for (const auto& [method, mc] : curves) {
    by_method[method] = mc.groups;
  }
  const MethodComparison comparison = compare_methods(by_method);
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  io::write_comparison_csv(out_path, comparison);
  std::cout << "anova_rows=" << comparison.anova_rows.size()
            << " t_rows=" << comparison.t_rows.size()
            << " common_scales=" << comparison.common_scales.size() << "\n";
}

}  // namespace

int cli_run(std::vector<std::string> args) {
  CLI::App app{"Spatio-temporal kernel density hotspot forecasting toolkit"};
  app.require_subcommand(1);

  // optimize ---------------------------------------------------------------
  auto* optimize = app.add_subcommand("optimize", "select bandwidths by likelihood cross-validation");
  std::string opt_incidents;
  optimize->add_option("--incidents", opt_incidents, "incident CSV (id,x,y,t)")->required();
  SearchFlags opt_search;
  opt_search.attach(optimize);
  Scalar opt_cell = 100, opt_tbin = 1;
  optimize->add_option("--grid-cell", opt_cell, "cell size anchoring the default lower bound");
  optimize->add_option("--t-bin", opt_tbin, "time bin anchoring the default lower bound");
  std::string opt_kernel = "epanechnikov";
  optimize->add_option("--kernel", opt_kernel);
  int opt_workers = 1;
  optimize->add_option("--workers", opt_workers);

  // estimate ---------------------------------------------------------------
  auto* estimate = app.add_subcommand("estimate", "evaluate the density volume over a grid");
  std::string est_incidents, est_bw, est_kernel = "epanechnikov", est_out = ".";
  estimate->add_option("--incidents", est_incidents)->required();
  estimate->add_option("--bandwidths", est_bw, "h_x,h_y,h_t")->required();
  GridFlags est_grid;
  est_grid.attach(estimate);
  TimeFlags est_time;
  est_time.attach(estimate);
  estimate->add_option("--kernel", est_kernel);
  estimate->add_option("--out", est_out, "output directory for density_t<k>.asc");
  int est_workers = 1;
  estimate->add_option("--workers", est_workers);

  // significance -----------------------------------------------------------
  auto* significance = app.add_subcommand("significance", "Monte-Carlo significance classification");
  std::string sig_incidents, sig_bw, sig_window, sig_level = "surface",
              sig_kernel = "epanechnikov", sig_out = ".";
  Index sig_replicates = 1000;
  double sig_alpha = 0.05;
  std::uint64_t sig_seed = 0;
  int sig_workers = 1;
  significance->add_option("--incidents", sig_incidents)->required();
  GridFlags sig_grid;
  sig_grid.attach(significance);
  TimeFlags sig_time;
  sig_time.attach(significance);
  significance->add_option("--bandwidths", sig_bw, "h_x,h_y,h_t")->required();
  significance->add_option("--window", sig_window, "null time window lo,hi (default: grid span)");
  significance->add_option("--replicates", sig_replicates);
  significance->add_option("--alpha", sig_alpha);
  significance->add_option("--seed", sig_seed);
  significance->add_option("--level", sig_level, "surface or voxel");
  significance->add_option("--kernel", sig_kernel);
  significance->add_option("--out", sig_out, "output directory");
  significance->add_option("--workers", sig_workers);

  // hotspots ----------------------------------------------------------------
  auto* hotspots = app.add_subcommand("hotspots", "select top significant cells at an area scale");
  std::string hot_surface, hot_mask, hot_landuse, hot_out = "hotspots.asc";
  Scalar hot_area = 2.0;
  hotspots->add_option("--surface", hot_surface)->required();
  hotspots->add_option("--mask", hot_mask)->required();
  hotspots->add_option("--landuse", hot_landuse)->required();
  hotspots->add_option("--area-pct", hot_area, "hotspot area as percent of the study area");
  hotspots->add_option("--out", hot_out);

  // evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "rolling prediction-group evaluation (PAI CSV)");
  std::string eval_incidents, eval_landuse, eval_methods = "STKDE,SKDE,PROMAP";
  std::string eval_forecast_start, eval_data_window, eval_bw, eval_promap, eval_out = "pai.csv";
  EvaluateConfig eval_config;
  SearchFlags eval_search;
  evaluate->add_option("--incidents", eval_incidents)->required();
  evaluate->add_option("--landuse", eval_landuse)->required();
  evaluate->add_option("--methods", eval_methods, "comma-separated subset of STKDE,SKDE,PROMAP");
  evaluate->add_option("--t-bin", eval_config.t_bin);
  evaluate->add_option("--forecast-start", eval_forecast_start,
                       "first forecast window start (day number or ISO date)")
      ->required();
  evaluate->add_option("--horizon", eval_config.horizon, "forecast window length in days");
  evaluate->add_option("--training-days", eval_config.training_length);
  evaluate->add_option("--groups", eval_config.group_count);
  evaluate->add_option("--replicates", eval_config.replicates);
  evaluate->add_option("--alpha", eval_config.alpha);
  evaluate->add_option("--seed", eval_config.seed);
  evaluate->add_option("--scale-min", eval_config.scale_min);
  evaluate->add_option("--scale-max", eval_config.scale_max);
  evaluate->add_option("--scale-step", eval_config.scale_step);
  evaluate->add_option("--bandwidths", eval_bw, "h_x,h_y,h_t (skips optimization)");
  eval_search.attach(evaluate);
  evaluate->add_option("--data-window", eval_data_window, "lo,hi days (default: data extent)");
  evaluate->add_option("--promap", eval_promap, "h_s,h_t,d_unit,t_unit");
  evaluate->add_option("--out", eval_out);
  evaluate->add_option("--workers", eval_config.workers);

  // synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate synthetic land use and incidents");
  std::string syn_out = "synth", syn_origin = "0,0", syn_window = "0,365";
  std::uint64_t syn_seed = 0;
  Index syn_cols = 40, syn_rows = 40;
  Scalar syn_cell = 100, syn_fraction = 0.7, syn_rate = 1.0;
  bool syn_preset = false;
  std::vector<std::string> syn_clusters;
  synth->add_option("--out", syn_out, "output directory");
  synth->add_option("--seed", syn_seed);
  synth->add_option("--cols", syn_cols);
  synth->add_option("--rows", syn_rows);
  synth->add_option("--cell", syn_cell);
  synth->add_option("--origin", syn_origin);
  synth->add_option("--eligible-fraction", syn_fraction);
  synth->add_option("--window", syn_window);
  synth->add_flag("--preset-drifting-cluster", syn_preset,
                  "one cluster drifting across the grid over the window");
  synth->add_option("--background-rate", syn_rate, "uniform background events per day");
  synth->add_option("--cluster", syn_clusters,
                    "x0,y0,t0,x1,y1,t1,spread,count (repeatable)");

  // compare ---------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "ANOVA / t-test report from a PAI CSV");
  std::string cmp_pai, cmp_out = "comparison.csv";
  compare->add_option("--pai", cmp_pai, "PAI CSV produced by evaluate")->required();
  compare->add_option("--out", cmp_out);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*optimize) {
      run_optimize(opt_incidents, opt_search, opt_cell, opt_tbin, opt_kernel, opt_workers);
    } else if (*estimate) {
      run_estimate(est_incidents, est_grid, est_time, est_bw, est_kernel, est_out, est_workers);
    } else if (*significance) {
      run_significance(sig_incidents, sig_grid, sig_time, sig_bw, sig_window, sig_replicates,
                       sig_alpha, sig_seed, sig_level, sig_kernel, sig_out, sig_workers);
    } else if (*hotspots) {
      run_hotspots(hot_surface, hot_mask, hot_landuse, hot_area, hot_out);
    } else if (*evaluate) {
      run_evaluate(eval_incidents, eval_landuse, eval_methods, eval_config, eval_forecast_start,
                   eval_data_window, eval_bw, eval_search, eval_promap, eval_out);
    } else if (*synth) {
      run_synth(syn_out, syn_seed, syn_cols, syn_rows, syn_cell, syn_origin, syn_fraction,
                syn_window, syn_preset, syn_rate, syn_clusters);
    } else if (*compare) {
      run_compare(cmp_pai, cmp_out);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stkde
