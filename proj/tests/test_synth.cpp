#include "stkde/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace stkde;

TEST_CASE("generate_landuse selects the requested eligible share") {
  const GridSpec2D spec{0, 0, 100.0, 20, 15};

  SUBCASE("eligible count is round(fraction * cells)") {
    const LandUseGrid grid = generate_landuse(spec, 0.37, 5);
    CHECK(grid.eligible_cell_count() == std::llround(0.37 * 300));
    CHECK(grid.study_cell_count() == 300);  // full-rectangle study area
  }
  SUBCASE("fraction one saturates") {
    const LandUseGrid grid = generate_landuse(spec, 1.0, 5);
    CHECK(grid.eligible_cell_count() == 300);
  }
  SUBCASE("same seed, same grid") {
    const LandUseGrid a = generate_landuse(spec, 0.5, 9);
    const LandUseGrid b = generate_landuse(spec, 0.5, 9);
    const LandUseGrid c = generate_landuse(spec, 0.5, 10);
    CHECK((a.classes == b.classes).all());
    CHECK_FALSE((a.classes == c.classes).all());
  }
  SUBCASE("degenerate fractions are rejected") {
    CHECK_THROWS_AS(generate_landuse(spec, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(generate_landuse(spec, 1.2, 1), ValidationError);
    CHECK_THROWS_AS(generate_landuse(spec, 0.001, 1), ValidationError);  // rounds to zero cells
  }
}

TEST_CASE("background counts follow the Poisson oracle") {
  const GridSpec2D spec{0, 0, 50.0, 30, 30};
  const LandUseGrid grid = generate_landuse(spec, 0.8, 21);
  const TimeWindow window{0.0, 200.0};

  SynthProcessSpec process;
  process.background_rate = 3.0;
  process.master_seed = 23;
  const auto incidents = generate_incidents(process, grid, window);

  const Scalar lambda = 3.0 * 200.0;
  const Scalar count = static_cast<Scalar>(incidents.size());
  CHECK(std::abs(count - lambda) <= 4.0 * std::sqrt(lambda));

  for (const Incident& inc : incidents) {
    const auto cell = world_to_cell(inc.x, inc.y, spec);
    REQUIRE(cell.has_value());
    CHECK(grid.eligible(cell->i, cell->j));
    CHECK(window.contains(inc.t));
  }
}

TEST_CASE("a stationary cluster lands near its center") {
  const GridSpec2D spec{0, 0, 50.0, 30, 30};
  const LandUseGrid grid = generate_landuse(spec, 1.0, 25);
  const TimeWindow window{0.0, 100.0};

  ClusterSpec cluster;
  cluster.trajectory = {{0.0, {700.0, 800.0}}, {100.0, {700.0, 800.0}}};
  cluster.spread = 60.0;
  cluster.extent = window;
  cluster.count = 400;

  SynthProcessSpec process;
  process.background_rate = 0.0;
  process.clusters = {cluster};
  process.master_seed = 27;

  const auto incidents = generate_incidents(process, grid, window);
  REQUIRE(incidents.size() == 400);
  Scalar mx = 0, my = 0;
  for (const Incident& inc : incidents) {
    mx += inc.x;
    my += inc.y;
  }
  mx /= 400.0;
  my /= 400.0;
  const Scalar se = 60.0 / std::sqrt(400.0);
  CHECK(std::abs(mx - 700.0) < 4.0 * se);
  CHECK(std::abs(my - 800.0) < 4.0 * se);
}

TEST_CASE("generation is deterministic per seed") {
  const GridSpec2D spec{0, 0, 100.0, 10, 10};
  const LandUseGrid grid = generate_landuse(spec, 0.6, 31);
  const TimeWindow window{0.0, 50.0};
  const SynthProcessSpec process = drifting_cluster_preset(spec, window, 33);

  const auto a = generate_incidents(process, grid, window);
  const auto b = generate_incidents(process, grid, window);
  REQUIRE(a.size() == b.size());
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].id == b[e].id);
    CHECK(a[e].x == b[e].x);
    CHECK(a[e].y == b[e].y);
    CHECK(a[e].t == b[e].t);
  }
}

TEST_CASE("cluster rejection reports the offending cluster") {
  const GridSpec2D spec{0, 0, 100.0, 10, 10};
  LandUseGrid grid{spec, Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                             10, 10, static_cast<std::uint8_t>(LandUse::InStudyNonEligible))};
  grid.classes(0, 0) = static_cast<std::uint8_t>(LandUse::Eligible);

  ClusterSpec far;  // centered far from the lone eligible cell, tiny spread
  far.trajectory = {{0.0, {950.0, 950.0}}, {10.0, {950.0, 950.0}}};
  far.spread = 5.0;
  far.extent = {0.0, 10.0};
  far.count = 3;

  SynthProcessSpec process;
  process.clusters = {far};
  process.master_seed = 35;
  CHECK_THROWS_WITH_AS(generate_incidents(process, grid, {0.0, 10.0}),
                       doctest::Contains("cluster 0"), ValidationError);
}

TEST_CASE("cluster windows must overlap the data window") {
  const GridSpec2D spec{0, 0, 100.0, 10, 10};
  const LandUseGrid grid = generate_landuse(spec, 1.0, 37);

  ClusterSpec late;
  late.trajectory = {{0.0, {500.0, 500.0}}};
  late.spread = 50.0;
  late.extent = {200.0, 300.0};
  late.count = 5;

  SynthProcessSpec process;
  process.clusters = {late};
  CHECK_THROWS_AS(generate_incidents(process, grid, {0.0, 100.0}), ValidationError);
}

TEST_CASE("the drifting preset moves by several spreads over the window") {
  const GridSpec2D spec{0, 0, 100.0, 60, 60};
  const TimeWindow window{0.0, 365.0};
  const SynthProcessSpec process = drifting_cluster_preset(spec, window, 41);
  REQUIRE(process.clusters.size() == 1);
  const ClusterSpec& cluster = process.clusters[0];

  const Point2 start = cluster.position_at(window.start);
  const Point2 end = cluster.position_at(window.end);
  const Scalar drift = std::hypot(end.x - start.x, end.y - start.y);
  CHECK(drift > 4.0 * cluster.spread);
  CHECK(cluster.count > 0);
  CHECK(process.background_rate > 0);
}

TEST_CASE("piecewise-linear trajectories interpolate and clamp") {
  ClusterSpec cluster;
  cluster.trajectory = {{10.0, {0.0, 0.0}}, {20.0, {100.0, 50.0}}, {30.0, {100.0, 150.0}}};
  CHECK(cluster.position_at(5.0).x == 0.0);    // clamped before the first knot
  CHECK(cluster.position_at(15.0).x == 50.0);  // halfway along the first leg
  CHECK(cluster.position_at(15.0).y == 25.0);
  CHECK(cluster.position_at(25.0).y == 100.0);
  CHECK(cluster.position_at(99.0).y == 150.0);  // clamped after the last knot
}
