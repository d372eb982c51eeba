#include "stkde/bandwidth.hpp"

#include "stkde/parallel.hpp"
#include "accel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stkde {

namespace {

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

Scalar loo_log_likelihood_impl(const detail::CanonicalPoints& pts, const Bandwidths& bw,
                               KernelId kernel) {
  const std::size_t n = pts.size();
  const detail::SpatialBuckets buckets(pts, bw.h_x, bw.h_y);
  const Scalar divisor = static_cast<Scalar>(n - 1);

  Scalar ln_l = 0;
  std::vector<std::int32_t> cand;
  for (std::size_t p = 0; p < n; ++p) {
    buckets.gather(pts.x[p], pts.y[p], cand);
    const auto lo = std::lower_bound(cand.begin(), cand.end(), pts.t[p] - bw.h_t,
                                     [&](std::int32_t q, Scalar v) { return pts.t[static_cast<std::size_t>(q)] < v; });
    const auto hi = std::upper_bound(cand.begin(), cand.end(), pts.t[p] + bw.h_t,
                                     [&](Scalar v, std::int32_t q) { return v < pts.t[static_cast<std::size_t>(q)]; });
    Scalar sum = 0;
    for (auto it = lo; it != hi; ++it) {
      const auto q = static_cast<std::size_t>(*it);
      if (q == p) {
        continue;
      }
      sum += product_kernel_weight(pts.x[p] - pts.x[q], pts.y[p] - pts.y[q],
                                   pts.t[p] - pts.t[q], bw, kernel);
    }
    const Scalar f = sum / divisor;
    if (f == 0.0) {
      return kNegInf;
    }
    ln_l += std::log(f);
  }
  return ln_l;
}

Scalar duplicate_fraction_of(const detail::CanonicalPoints& pts) {
  // Canonical order groups coordinate-identical incidents contiguously.
  const std::size_t n = pts.size();
  std::size_t dup = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const bool same_prev = p > 0 && pts.t[p] == pts.t[p - 1] && pts.x[p] == pts.x[p - 1] &&
                           pts.y[p] == pts.y[p - 1];
    const bool same_next = p + 1 < n && pts.t[p] == pts.t[p + 1] && pts.x[p] == pts.x[p + 1] &&
                           pts.y[p] == pts.y[p + 1];
    if (same_prev || same_next) {
      ++dup;
    }
  }
  return static_cast<Scalar>(dup) / static_cast<Scalar>(n);
}

struct LogSpace {
  std::array<Scalar, 3> lo, hi;

  explicit LogSpace(const BandwidthSearchConfig& c)
      : lo{std::log(c.lower.h_x), std::log(c.lower.h_y), std::log(c.lower.h_t)},
        hi{std::log(c.upper.h_x), std::log(c.upper.h_y), std::log(c.upper.h_t)} {}

  std::array<Scalar, 3> clamp(std::array<Scalar, 3> theta) const {
    for (int a = 0; a < 3; ++a) {
      theta[a] = std::min(hi[a], std::max(lo[a], theta[a]));
    }
    return theta;
  }

  static Bandwidths to_bandwidths(const std::array<Scalar, 3>& theta) {
    return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
  }
};

}  // namespace

BandwidthSearchConfig default_search_config(const GridSpec3D& grid, const TimeWindow& training) {
  grid.validate();
  training.validate();
  BandwidthSearchConfig c;
  c.lower = {grid.spatial.cell_size, grid.spatial.cell_size, grid.t_bin};
  c.upper = {grid.spatial.extent_x() / 2, grid.spatial.extent_y() / 2, training.length() / 2};
  return c;
}

Scalar loo_density(std::span<const Incident> incidents, std::size_t i, const Bandwidths& bw,
                   KernelId kernel) {
  bw.validate();
  if (incidents.size() < 2) {
    throw ValidationError("loo_density: needs at least 2 incidents");
  }
  if (i >= incidents.size()) {
    throw std::out_of_range("loo_density: incident index out of range");
  }
  const auto pts = detail::canonical_points(incidents);
  const Incident& target = incidents[i];
  Scalar sum = 0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    if (pts.original_index[p] == static_cast<std::int32_t>(i)) {
      continue;
    }
    sum += product_kernel_weight(target.x - pts.x[p], target.y - pts.y[p],
                                 target.t - pts.t[p], bw, kernel);
  }
  return sum / static_cast<Scalar>(incidents.size() - 1);
}

Scalar loo_log_likelihood(std::span<const Incident> incidents, const Bandwidths& bw,
                          KernelId kernel) {
  bw.validate();
  if (incidents.size() < 2) {
    throw ValidationError("loo_log_likelihood: needs at least 2 incidents");
  }
  return loo_log_likelihood_impl(detail::canonical_points(incidents), bw, kernel);
}

BandwidthResult optimize_bandwidths(std::span<const Incident> incidents,
                                    const BandwidthSearchConfig& config, KernelId kernel,
                                    int workers) {
  config.validate();
  if (incidents.size() < 2) {
    throw ValidationError("optimize_bandwidths: needs at least 2 incidents");
  }
  const auto pts = detail::canonical_points(incidents);
  const LogSpace space(config);

  BandwidthResult result;
  result.duplicate_fraction = duplicate_fraction_of(pts);

  // Coarse exhaustive lattice, log-spaced per axis, row-major order.
  std::array<std::vector<Scalar>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    const int m = config.lattice[static_cast<std::size_t>(a)];
    axes[a].resize(static_cast<std::size_t>(m));
    for (int idx = 0; idx < m; ++idx) {
      axes[a][static_cast<std::size_t>(idx)] =
          std::exp(space.lo[a] + (space.hi[a] - space.lo[a]) * static_cast<Scalar>(idx) /
                                     static_cast<Scalar>(m - 1));
    }
  }
  std::vector<Bandwidths> lattice;
  lattice.reserve(axes[0].size() * axes[1].size() * axes[2].size());
  for (Scalar hx : axes[0]) {
    for (Scalar hy : axes[1]) {
      for (Scalar ht : axes[2]) {
        lattice.push_back({hx, hy, ht});
      }
    }
  }

  std::vector<Scalar> lattice_ln_l(lattice.size());
  parallel_for(static_cast<Index>(lattice.size()), workers, [&](Index begin, Index end) {
    for (Index q = begin; q < end; ++q) {
      lattice_ln_l[static_cast<std::size_t>(q)] =
          loo_log_likelihood_impl(pts, lattice[static_cast<std::size_t>(q)], kernel);
    }
  });
  for (std::size_t q = 0; q < lattice.size(); ++q) {
    result.trace.emplace_back(lattice[q], lattice_ln_l[q]);
  }

  std::size_t best_q = 0;
  for (std::size_t q = 1; q < lattice.size(); ++q) {
    if (lattice_ln_l[q] > lattice_ln_l[best_q]) {
      best_q = q;
    }
  }
  if (lattice_ln_l[best_q] == kNegInf) {
    throw ValidationError(
        "optimize_bandwidths: every lattice point has zero likelihood; widen the search bounds");
  }

  // Nelder-Mead refinement in log-bandwidth space (minimizing -ln L).
  // Evaluation points are projected into the bounds, so the simplex never
  // leaves the search box.
  const auto evaluate = [&](const std::array<Scalar, 3>& theta) {
    const Bandwidths bw = LogSpace::to_bandwidths(theta);
    const Scalar ln_l = loo_log_likelihood_impl(pts, bw, kernel);
    result.trace.emplace_back(bw, ln_l);
    return -ln_l;
  };

  struct Vertex {
    std::array<Scalar, 3> theta;
    Scalar f;
  };
  std::vector<Vertex> simplex;
  {
    const Bandwidths& b = lattice[best_q];
    const std::array<Scalar, 3> theta0 =
        space.clamp({std::log(b.h_x), std::log(b.h_y), std::log(b.h_t)});
    simplex.push_back({theta0, -lattice_ln_l[best_q]});
    for (int a = 0; a < 3; ++a) {
      const int m = config.lattice[static_cast<std::size_t>(a)];
      const Scalar step = 0.5 * (space.hi[a] - space.lo[a]) / static_cast<Scalar>(m - 1);
      std::array<Scalar, 3> theta = theta0;
      theta[a] += (theta0[a] + step <= space.hi[a]) ? step : -step;
      theta = space.clamp(theta);
      simplex.push_back({theta, evaluate(theta)});
    }
  }

  constexpr Scalar kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  for (int iter = 0; iter < config.max_refine_iterations; ++iter) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const Scalar f_best = simplex.front().f;
    const Scalar f_worst = simplex.back().f;
    if (std::isfinite(f_best) && std::isfinite(f_worst) &&
        f_worst - f_best <= config.tolerance * (std::abs(f_best) + 1e-300)) {
      break;
    }

    std::array<Scalar, 3> centroid = {0, 0, 0};
    for (std::size_t v = 0; v + 1 < simplex.size(); ++v) {
      for (int a = 0; a < 3; ++a) {
        centroid[a] += simplex[v].theta[a];
      }
    }
    for (int a = 0; a < 3; ++a) {
      centroid[a] /= static_cast<Scalar>(simplex.size() - 1);
    }
    const auto& worst = simplex.back();

    const auto blend = [&](Scalar coef) {
      std::array<Scalar, 3> theta;
      for (int a = 0; a < 3; ++a) {
        theta[a] = centroid[a] + coef * (centroid[a] - worst.theta[a]);
      }
      return space.clamp(theta);
    };

    const auto reflected = blend(kReflect);
    const Scalar f_reflected = evaluate(reflected);
    if (f_reflected < f_best) {
      const auto expanded = blend(kExpand);
      const Scalar f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        simplex.back() = {expanded, f_expanded};
      } else {
        simplex.back() = {reflected, f_reflected};
      }
      continue;
    }
    if (f_reflected < simplex[simplex.size() - 2].f) {
      simplex.back() = {reflected, f_reflected};
      continue;
    }
    const auto contracted = blend(f_reflected < worst.f ? kContract : -kContract);
    const Scalar f_contracted = evaluate(contracted);
    if (f_contracted < std::min(f_reflected, worst.f)) {
      simplex.back() = {contracted, f_contracted};
      continue;
    }
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (int a = 0; a < 3; ++a) {
        simplex[v].theta[a] =
            simplex[0].theta[a] + kShrink * (simplex[v].theta[a] - simplex[0].theta[a]);
      }
      simplex[v].theta = space.clamp(simplex[v].theta);
      simplex[v].f = evaluate(simplex[v].theta);
    }
  }

  // Best point seen anywhere (lattice or refinement); earliest wins ties.
  std::size_t best_t = 0;
  for (std::size_t q = 1; q < result.trace.size(); ++q) {
    if (result.trace[q].second > result.trace[best_t].second) {
      best_t = q;
    }
  }
  result.bw = result.trace[best_t].first;
  result.log_likelihood = result.trace[best_t].second;
  result.evaluations = static_cast<long>(result.trace.size());
  return result;
}

}  // namespace stkde
