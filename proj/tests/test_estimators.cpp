#include "stkde/estimators.hpp"

#include "stkde/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

using namespace stkde;

namespace {

// Definitional oracle: sort by (t, x, y, id), then the plain double loop
// over voxels and incidents. Independent of the library's pruned path.
std::vector<Incident> sorted_canonically(std::vector<Incident> incidents) {
  std::sort(incidents.begin(), incidents.end(), [](const Incident& a, const Incident& b) {
    return std::tie(a.t, a.x, a.y, a.id) < std::tie(b.t, b.x, b.y, b.id);
  });
  return incidents;
}

DensityVolume naive_stkde_volume(std::vector<Incident> incidents, const GridSpec3D& spec,
                                 const Bandwidths& bw) {
  incidents = sorted_canonically(std::move(incidents));
  DensityVolume volume = make_zero_volume(spec);
  for (Index k = 0; k < spec.n_bins; ++k) {
    for (Index j = 0; j < spec.spatial.n_rows; ++j) {
      for (Index i = 0; i < spec.spatial.n_cols; ++i) {
        const Point3 c = voxel_centroid(i, j, k, spec);
        Scalar sum = 0;
        for (const Incident& inc : incidents) {
          sum += product_kernel_weight(c.x - inc.x, c.y - inc.y, c.t - inc.t, bw,
                                       KernelId::Epanechnikov);
        }
        volume.at(i, j, k) = sum / static_cast<Scalar>(incidents.size());
      }
    }
  }
  return volume;
}

std::vector<Incident> random_incidents(int n, Rng& rng, Scalar span_x, Scalar span_y,
                                       Scalar span_t, Scalar margin = 0) {
  std::vector<Incident> incidents;
  incidents.reserve(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    incidents.push_back({"r" + std::to_string(e),
                         margin + rng.uniform() * (span_x - 2 * margin),
                         margin + rng.uniform() * (span_y - 2 * margin),
                         margin + rng.uniform() * (span_t - 2 * margin)});
  }
  return incidents;
}

}  // namespace

TEST_CASE("stkde_at_point hand values") {
  const Bandwidths unit{1.0, 1.0, 1.0};
  const Point3 q{10.0, 20.0, 5.0};

  std::vector<Incident> one = {{"a", 10.0, 20.0, 5.0}};
  CHECK(stkde_at_point(one, q, unit, KernelId::Epanechnikov) == 0.421875);

  std::vector<Incident> two = {{"a", 10.0, 20.0, 5.0}, {"b", 10.0, 20.0, 5.0}};
  CHECK(stkde_at_point(two, q, unit, KernelId::Epanechnikov) == 0.421875);

  std::vector<Incident> far = {{"a", 10.0, 20.0, 5.0}};
  CHECK(stkde_at_point(far, {11.5, 20.0, 5.0}, unit, KernelId::Epanechnikov) == 0.0);
  CHECK(stkde_at_point(far, {10.0, 18.0, 5.0}, unit, KernelId::Epanechnikov) == 0.0);

  CHECK_THROWS_AS(stkde_at_point({}, q, unit, KernelId::Epanechnikov), ValidationError);
  CHECK_THROWS_AS(stkde_at_point(one, q, Bandwidths{1, 1, -1}, KernelId::Epanechnikov),
                  ValidationError);
}

TEST_CASE("stkde_volume: single incident at a centroid with sub-cell bandwidths") {
  const GridSpec3D spec{{0, 0, 1.0, 5, 5}, 0.0, 1.0, 4};
  const Point3 c = voxel_centroid(2, 3, 1, spec);
  const std::vector<Incident> incidents = {{"a", c.x, c.y, c.t}};
  const Bandwidths bw{0.4, 0.4, 0.4};  // smaller than one cell/bin

  const DensityVolume volume = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov);
  for (Index k = 0; k < spec.n_bins; ++k) {
    for (Index j = 0; j < spec.spatial.n_rows; ++j) {
      for (Index i = 0; i < spec.spatial.n_cols; ++i) {
        if (i == 2 && j == 3 && k == 1) {
          CHECK(volume.at(i, j, k) ==
                doctest::Approx(std::pow(0.75, 3) / (bw.h_x * bw.h_y * bw.h_t)).epsilon(1e-15));
        } else {
          CHECK(volume.at(i, j, k) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("stkde_volume matches the naive double loop bit-for-bit") {
  Rng rng(101);
  const GridSpec3D spec{{0, 0, 2.0, 24, 18}, 0.0, 1.5, 8};
  const auto incidents = random_incidents(150, rng, 48.0, 36.0, 12.0);
  const Bandwidths bw{5.0, 7.0, 3.0};

  const DensityVolume fast = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov);
  const DensityVolume naive = naive_stkde_volume(incidents, spec, bw);
  for (Index k = 0; k < spec.n_bins; ++k) {
    REQUIRE((fast.slices[static_cast<std::size_t>(k)] ==
             naive.slices[static_cast<std::size_t>(k)]).all());
    REQUIRE((fast.slices[static_cast<std::size_t>(k)] >= 0.0).all());
    REQUIRE(fast.slices[static_cast<std::size_t>(k)].isFinite().all());
  }
}

TEST_CASE("stkde_volume is invariant to incident order and worker count") {
  Rng rng(202);
  const GridSpec3D spec{{0, 0, 1.0, 16, 16}, 0.0, 1.0, 5};
  auto incidents = random_incidents(80, rng, 16.0, 16.0, 5.0);
  const Bandwidths bw{2.5, 2.5, 1.5};

  const DensityVolume base = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov, 1);

  for (std::size_t s = incidents.size(); s > 1; --s) {
    std::swap(incidents[s - 1], incidents[rng.uniform_below(s)]);
  }
  const DensityVolume shuffled = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov, 1);
  const DensityVolume threaded = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov, 7);

  for (std::size_t k = 0; k < base.slices.size(); ++k) {
    REQUIRE((shuffled.slices[k] == base.slices[k]).all());
    REQUIRE((threaded.slices[k] == base.slices[k]).all());
  }
}

TEST_CASE("stkde_volume mass approaches one for interior incidents") {
  Rng rng(303);
  const Bandwidths bw{5.0, 5.0, 2.0};
  // resolution = bandwidth / 5 per axis, incidents at least one bandwidth
  // inside the grid
  const GridSpec3D spec{{0, 0, 1.0, 40, 40}, 0.0, 0.4, 40};
  const auto incidents = random_incidents(60, rng, 40.0, 40.0, 16.0, 6.0);
  const DensityVolume volume = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov);
  CHECK(volume.mass() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("estimators are translation equivariant") {
  Rng rng(404);
  auto incidents = random_incidents(40, rng, 20.0, 20.0, 6.0);
  // snap coordinates to 2^-10 so that adding the (power-of-two) offsets below
  // keeps every value exactly representable; the volumes then agree bit-for-bit
  for (Incident& inc : incidents) {
    inc.x = std::floor(inc.x * 1024.0) / 1024.0;
    inc.y = std::floor(inc.y * 1024.0) / 1024.0;
    inc.t = std::floor(inc.t * 1024.0) / 1024.0;
  }
  const GridSpec3D spec{{0, 0, 1.0, 20, 20}, 0.0, 1.0, 6};
  const Bandwidths bw{3.0, 3.0, 2.0};

  const DensityVolume base = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov);

  const Scalar dx = 512.0, dy = -128.0, dt = 64.0;
  GridSpec3D moved = spec;
  moved.spatial.x_origin += dx;
  moved.spatial.y_origin += dy;
  moved.t_start += dt;
  for (Incident& inc : incidents) {
    inc.x += dx;
    inc.y += dy;
    inc.t += dt;
  }
  const DensityVolume shifted = stkde_volume(incidents, moved, bw, KernelId::Epanechnikov);
  for (std::size_t k = 0; k < base.slices.size(); ++k) {
    REQUIRE((shifted.slices[k] == base.slices[k]).all());
  }
}

TEST_CASE("skde_surface hand values and time invariance") {
  const GridSpec2D spec{0, 0, 1.0, 9, 9};
  const Point2 c = cell_centroid(4, 4, spec);
  std::vector<Incident> incidents = {{"a", c.x, c.y, 3.0}};
  const Scalar h_s = 2.0;

  DensitySurface surface = skde_surface(incidents, spec, h_s, KernelId::Epanechnikov);
  CHECK(surface.values(4, 4) == doctest::Approx(2.0 / (M_PI * h_s * h_s)).epsilon(1e-15));
  CHECK(surface.values(4, 8) == 0.0);  // beyond the radius

  // timestamps are ignored entirely
  incidents[0].t = -1234.5;
  const DensitySurface perturbed = skde_surface(incidents, spec, h_s, KernelId::Epanechnikov);
  REQUIRE((perturbed.values == surface.values).all());
}

TEST_CASE("skde_surface integrates to about one for interior incidents") {
  Rng rng(505);
  const GridSpec2D spec{0, 0, 0.5, 60, 60};  // 30 x 30 area, cell = h_s / 6
  std::vector<Incident> incidents;
  for (int e = 0; e < 50; ++e) {
    incidents.push_back({"e" + std::to_string(e), 5.0 + 20.0 * rng.uniform(),
                         5.0 + 20.0 * rng.uniform(), rng.uniform()});
  }
  const DensitySurface surface = skde_surface(incidents, spec, 3.0, KernelId::Epanechnikov);
  CHECK(surface.mass() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("promap hand values") {
  const GridSpec2D spec{0, 0, 100.0, 11, 11};
  const PromapParams params = PromapParams::for_cell_size(spec.cell_size);
  const Point2 c = cell_centroid(5, 5, spec);

  SUBCASE("incident at the centroid, zero age") {
    const std::vector<Incident> incidents = {{"a", c.x, c.y, 30.0}};
    const DensitySurface s = promap_surface(incidents, spec, params, 30.0);
    CHECK(s.values(5, 5) == 1.0);
  }
  SUBCASE("d_i = 2 cells, t_i = 3 weeks") {
    const std::vector<Incident> incidents = {{"a", c.x + 200.0, c.y, 9.0}};
    const DensitySurface s = promap_surface(incidents, spec, params, 30.0);
    CHECK(s.values(5, 5) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  }
  SUBCASE("beyond the spatial radius contributes nothing") {
    const std::vector<Incident> incidents = {{"a", c.x + 401.0, c.y, 30.0}};
    const DensitySurface s = promap_surface(incidents, spec, params, 30.0);
    CHECK(s.values(5, 5) == 0.0);
  }
  SUBCASE("older than the temporal window contributes nothing") {
    const std::vector<Incident> incidents = {{"a", c.x, c.y, 30.0 - 60.876}};
    const DensitySurface s = promap_surface(incidents, spec, params, 30.0);
    CHECK(s.values(5, 5) == 0.0);
  }
  SUBCASE("future incidents are rejected") {
    const std::vector<Incident> incidents = {{"late", c.x, c.y, 31.0}};
    CHECK_THROWS_WITH_AS(promap_surface(incidents, spec, params, 30.0),
                         doctest::Contains("late"), ValidationError);
  }
}

TEST_CASE("promap monotonicity under added incidents") {
  Rng rng(606);
  const GridSpec2D spec{0, 0, 50.0, 20, 20};
  const PromapParams params = PromapParams::for_cell_size(spec.cell_size);
  const Scalar t_ref = 100.0;

  std::vector<Incident> incidents;
  for (int e = 0; e < 30; ++e) {
    incidents.push_back({"e" + std::to_string(e), rng.uniform(0.0, 1000.0),
                         rng.uniform(0.0, 1000.0), rng.uniform(50.0, 100.0)});
  }
  const DensitySurface before = promap_surface(incidents, spec, params, t_ref);

  SUBCASE("inside both radii never decreases any cell") {
    incidents.push_back({"new", 500.0, 500.0, 95.0});
    const DensitySurface after = promap_surface(incidents, spec, params, t_ref);
    CHECK((after.values >= before.values).all());
    CHECK(after.values.sum() > before.values.sum());
  }
  SUBCASE("outside the temporal window changes nothing") {
    incidents.push_back({"old", 500.0, 500.0, t_ref - 100.0});
    const DensitySurface after = promap_surface(incidents, spec, params, t_ref);
    CHECK((after.values == before.values).all());
  }
}
