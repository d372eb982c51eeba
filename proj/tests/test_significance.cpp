#include "stkde/significance.hpp"

#include "stkde/estimators.hpp"
#include "stkde/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace stkde;

namespace {

LandUseGrid all_eligible(const GridSpec2D& spec) {
  return {spec, Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                    spec.n_rows, spec.n_cols, static_cast<std::uint8_t>(LandUse::Eligible))};
}

// Hand-built surface-level ensemble over a 1x1 grid with the given samples;
// exercises the p-value and quantile conventions in isolation.
NullEnsemble tiny_ensemble(std::vector<Scalar> samples) {
  const GridSpec2D spec{0, 0, 1.0, 1, 1};
  std::sort(samples.begin(), samples.end());
  NullEnsemble e;
  e.level = SignificanceLevel::Surface;
  e.grid = {spec, 0.0, 1.0, 1};
  e.land_use = all_eligible(spec);
  e.replicate_count = static_cast<Index>(samples.size());
  e.samples.resize(1, e.replicate_count);
  for (Index r = 0; r < e.replicate_count; ++r) {
    e.samples(0, r) = samples[static_cast<std::size_t>(r)];
  }
  return e;
}

DensitySurface one_cell_surface(Scalar value) {
  DensitySurface s = make_zero_surface({0, 0, 1.0, 1, 1});
  s.values(0, 0) = value;
  return s;
}

}  // namespace

TEST_CASE("null incidents stay inside a single eligible cell") {
  GridSpec2D spec{0, 0, 100.0, 5, 4};
  LandUseGrid grid{spec, Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                             4, 5, static_cast<std::uint8_t>(LandUse::InStudyNonEligible))};
  grid.classes(2, 3) = static_cast<std::uint8_t>(LandUse::Eligible);

  const TimeWindow window{10.0, 20.0};
  const auto incidents = simulate_null_incidents(200, grid, window, 42);
  REQUIRE(incidents.size() == 200);
  for (const Incident& inc : incidents) {
    CHECK(inc.x >= 300.0);
    CHECK(inc.x < 400.0);
    CHECK(inc.y >= 200.0);
    CHECK(inc.y < 300.0);
    CHECK(window.contains(inc.t));
  }
}

TEST_CASE("null incidents are deterministic per seed") {
  const auto grid = all_eligible({0, 0, 50.0, 8, 8});
  const TimeWindow window{0.0, 30.0};
  const auto a = simulate_null_incidents(500, grid, window, 7);
  const auto b = simulate_null_incidents(500, grid, window, 7);
  const auto c = simulate_null_incidents(500, grid, window, 8);
  REQUIRE(a.size() == b.size());
  bool all_equal = true;
  bool any_differs_from_c = false;
  for (std::size_t e = 0; e < a.size(); ++e) {
    all_equal = all_equal && a[e].x == b[e].x && a[e].y == b[e].y && a[e].t == b[e].t;
    any_differs_from_c = any_differs_from_c || a[e].x != c[e].x;
  }
  CHECK(all_equal);
  CHECK(any_differs_from_c);
}

TEST_CASE("null incidents are uniform over cells and time deciles") {
  const GridSpec2D spec{0, 0, 10.0, 10, 10};
  const auto grid = all_eligible(spec);
  const TimeWindow window{0.0, 50.0};
  const Index n = 10000;
  const auto incidents = simulate_null_incidents(n, grid, window, 12345);

  Eigen::ArrayXXd counts = Eigen::ArrayXXd::Zero(10, 10);
  Eigen::ArrayXd time_decile = Eigen::ArrayXd::Zero(10);
  for (const Incident& inc : incidents) {
    const auto cell = world_to_cell(inc.x, inc.y, spec);
    REQUIRE(cell.has_value());
    counts(cell->j, cell->i) += 1;
    time_decile(std::min<Index>(9, static_cast<Index>((inc.t / 50.0) * 10))) += 1;
  }
  // chi-square over the 100 cells; 99 df, upper 1% point 134.642
  const Scalar expected = static_cast<Scalar>(n) / 100.0;
  const Scalar chi2 = ((counts - expected).square() / expected).sum();
  CHECK(chi2 < 134.642);

  // 9 df, upper 1% point 21.666
  const Scalar expected_t = static_cast<Scalar>(n) / 10.0;
  const Scalar chi2_t = ((time_decile - expected_t).square() / expected_t).sum();
  CHECK(chi2_t < 21.666);
}

TEST_CASE("ensemble shape, determinism, and worker invariance") {
  const GridSpec2D spatial{0, 0, 20.0, 6, 5};
  const GridSpec3D spec{spatial, 0.0, 5.0, 3};
  const auto grid = all_eligible(spatial);
  const TimeWindow window{0.0, 15.0};
  const Bandwidths bw{30.0, 30.0, 6.0};

  SUBCASE("degenerate ensemble has one sample per cell") {
    const NullEnsemble e =
        build_null_ensemble(20, grid, window, spec, bw, KernelId::Epanechnikov, 1, 9);
    CHECK(e.samples.rows() == 30);
    CHECK(e.samples.cols() == 1);
  }

  SUBCASE("worker count does not change the ensemble") {
    const NullEnsemble serial =
        build_null_ensemble(25, grid, window, spec, bw, KernelId::Epanechnikov, 12, 11,
                            SignificanceLevel::Surface, 1);
    const NullEnsemble threaded =
        build_null_ensemble(25, grid, window, spec, bw, KernelId::Epanechnikov, 12, 11,
                            SignificanceLevel::Surface, 5);
    REQUIRE(serial.samples.rows() == threaded.samples.rows());
    CHECK((serial.samples.array() == threaded.samples.array()).all());
  }

  SUBCASE("voxel level stores one sorted row per voxel") {
    const NullEnsemble e = build_null_ensemble(20, grid, window, spec, bw,
                                               KernelId::Epanechnikov, 4, 13,
                                               SignificanceLevel::Voxel);
    CHECK(e.samples.rows() == spec.voxel_count());
    for (Index u = 0; u < e.samples.rows(); ++u) {
      for (Index r = 1; r < 4; ++r) {
        CHECK(e.samples(u, r - 1) <= e.samples(u, r));
      }
    }
  }
}

TEST_CASE("replicate mass is conserved for interior-dominated masks") {
  // eligibility confined to the interior, grid padded by one bandwidth in
  // every direction, resolution at bandwidth/5
  const GridSpec2D spatial{0, 0, 1.0, 30, 30};
  LandUseGrid grid{spatial, Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                                30, 30, static_cast<std::uint8_t>(LandUse::InStudyNonEligible))};
  for (Index j = 6; j < 24; ++j) {
    for (Index i = 6; i < 24; ++i) {
      grid.classes(j, i) = static_cast<std::uint8_t>(LandUse::Eligible);
    }
  }
  const Bandwidths bw{5.0, 5.0, 2.0};
  const TimeWindow window{2.0, 10.0};
  const GridSpec3D spec{spatial, 0.0, 0.4, 35};  // time axis covers window +- h_t

  const Index replicates = 10;
  Scalar mean_mass = 0;
  for (Index r = 0; r < replicates; ++r) {
    const auto incidents =
        simulate_null_incidents(40, grid, window, sub_seed(17, static_cast<std::uint64_t>(r)));
    const DensityVolume v = stkde_volume(incidents, spec, bw, KernelId::Epanechnikov);
    mean_mass += v.mass();
  }
  mean_mass /= static_cast<Scalar>(replicates);
  CHECK(mean_mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("p-value and quantile conventions") {
  SUBCASE("R = 999, observed above every null sample") {
    std::vector<Scalar> samples(999);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      samples[s] = static_cast<Scalar>(s);
    }
    const NullEnsemble e = tiny_ensemble(samples);
    const SignificanceResult r = classify_significance(one_cell_surface(2000.0), e, 0.05);
    CHECK(r.p_values[0](0, 0) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(r.significant[0](0, 0));
  }

  SUBCASE("R = 1000 with 49 null samples at or above the observation") {
    std::vector<Scalar> samples;
    for (int s = 0; s < 951; ++s) samples.push_back(static_cast<Scalar>(s));  // below 1000
    for (int s = 0; s < 49; ++s) samples.push_back(2000.0 + s);               // at or above
    const NullEnsemble e = tiny_ensemble(samples);
    const SignificanceResult r = classify_significance(one_cell_surface(1000.0), e, 0.05);
    CHECK(r.p_values[0](0, 0) == doctest::Approx(50.0 / 1001.0).epsilon(1e-12));
    CHECK(r.significant[0](0, 0));
  }

  SUBCASE("observed equal to every null sample is not significant") {
    const NullEnsemble e = tiny_ensemble(std::vector<Scalar>(200, 3.5));
    const SignificanceResult r = classify_significance(one_cell_surface(3.5), e, 0.05);
    CHECK(r.p_values[0](0, 0) == 1.0);
    CHECK_FALSE(r.significant[0](0, 0));
  }

  SUBCASE("p-values never fall below 1/(R+1)") {
    Rng rng(19);
    std::vector<Scalar> samples(200);
    for (Scalar& s : samples) s = rng.uniform();
    const NullEnsemble e = tiny_ensemble(samples);
    for (const Scalar obs : {-1.0, 0.2, 0.5, 0.9999, 5.0}) {
      const SignificanceResult r = classify_significance(one_cell_surface(obs), e, 0.05);
      CHECK(r.p_values[0](0, 0) >= 1.0 / 201.0);
      CHECK(r.p_values[0](0, 0) <= 1.0);
    }
  }

  SUBCASE("raising alpha never shrinks the significant set") {
    Rng rng(23);
    const GridSpec2D spatial{0, 0, 10.0, 8, 8};
    NullEnsemble e;
    e.level = SignificanceLevel::Surface;
    e.grid = {spatial, 0.0, 1.0, 1};
    e.land_use = all_eligible(spatial);
    e.replicate_count = 99;
    e.samples.resize(64, 99);
    for (Index u = 0; u < 64; ++u) {
      std::vector<Scalar> row(99);
      for (Scalar& v : row) v = rng.uniform();
      std::sort(row.begin(), row.end());
      for (Index r = 0; r < 99; ++r) e.samples(u, r) = row[static_cast<std::size_t>(r)];
    }
    DensitySurface observed = make_zero_surface(spatial);
    for (Index j = 0; j < 8; ++j) {
      for (Index i = 0; i < 8; ++i) {
        observed.values(j, i) = rng.uniform();
      }
    }
    Index previous = 0;
    for (const double alpha : {0.01, 0.05, 0.1, 0.25, 0.5}) {
      const SignificanceResult r = classify_significance(observed, e, alpha);
      const Index flagged = r.significant[0].count();
      CHECK(flagged >= previous);
      previous = flagged;
    }
  }

  SUBCASE("misaligned rasters are rejected") {
    const NullEnsemble e = tiny_ensemble(std::vector<Scalar>(10, 1.0));
    DensitySurface wrong = make_zero_surface({0, 0, 1.0, 2, 2});
    CHECK_THROWS_AS(classify_significance(wrong, e, 0.05), ValidationError);
    DensityVolume volume = make_zero_volume({{0, 0, 1.0, 1, 1}, 0.0, 1.0, 1});
    CHECK_THROWS_AS(classify_significance(volume, e, 0.05), ValidationError);  // level mismatch
    CHECK_THROWS_AS(classify_significance(one_cell_surface(1.0), e, 0.7), ValidationError);
  }
}

TEST_CASE("marginalize_time") {
  const GridSpec3D spec{{0, 0, 2.0, 3, 2}, 0.0, 1.0, 3};
  DensityVolume volume = make_zero_volume(spec);
  volume.at(1, 1, 0) = 0.1;
  volume.at(1, 1, 1) = 0.2;
  volume.at(1, 1, 2) = 0.3;

  SUBCASE("sums slices times the bin depth") {
    const DensitySurface surface = marginalize_time(volume);
    CHECK(surface.values(1, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(surface.values(0, 0) == 0.0);
  }

  SUBCASE("all-zero volume gives the zero surface") {
    const DensitySurface zero = marginalize_time(make_zero_volume(spec));
    CHECK((zero.values == 0.0).all());
  }

  SUBCASE("mass is preserved up to summation reordering") {
    Rng rng(29);
    DensityVolume random_volume = make_zero_volume(spec);
    for (auto& slice : random_volume.slices) {
      for (Index j = 0; j < 2; ++j) {
        for (Index i = 0; i < 3; ++i) {
          slice(j, i) = rng.uniform();
        }
      }
    }
    const DensitySurface surface = marginalize_time(random_volume);
    CHECK(surface.mass() == doctest::Approx(random_volume.mass()).epsilon(1e-12));
  }

  SUBCASE("commutes with scalar multiplication") {
    const DensitySurface before = marginalize_time(volume);
    for (auto& slice : volume.slices) {
      slice *= 3.0;
    }
    const DensitySurface after = marginalize_time(volume);
    CHECK(((after.values - 3.0 * before.values).abs() <= 1e-15 * after.values.abs()).all());
  }
}

TEST_CASE("calibration smoke test: null observations flag about alpha of cells") {
  const GridSpec2D spatial{0, 0, 1.0, 30, 30};
  const auto grid = all_eligible(spatial);
  const TimeWindow window{0.0, 10.0};
  const GridSpec3D spec{spatial, 0.0, 2.0, 5};
  const Bandwidths bw{2.5, 2.5, 3.0};
  const Index n = 300;

  const NullEnsemble ensemble = build_null_ensemble(n, grid, window, spec, bw,
                                                    KernelId::Epanechnikov, 60, 31,
                                                    SignificanceLevel::Surface, 4);
  const auto observed_incidents = simulate_null_incidents(n, grid, window, 777777);
  const DensitySurface observed =
      marginalize_time(stkde_volume(observed_incidents, spec, bw, KernelId::Epanechnikov));
  const SignificanceResult r = classify_significance(observed, ensemble, 0.05);
  const Scalar fraction =
      static_cast<Scalar>(r.significant[0].count()) / static_cast<Scalar>(spatial.cell_count());
  // loose band; the acceptance suite runs the full-size calibration
  CHECK(fraction > 0.005);
  CHECK(fraction < 0.12);
}
