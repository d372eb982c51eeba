#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stkde {

using Scalar = double;
using Index = Eigen::Index;

// Rasters are indexed (row, col) = (j, i): row j counts cells northward from
// y_origin, col i counts cells eastward from x_origin.
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using BoolRaster = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Invalid data or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One timestamped event point in projected planar coordinates.
struct Incident {
  std::string id;
  Scalar x = 0;  // easting, meters
  Scalar y = 0;  // northing, meters
  Scalar t = 0;  // continuous days since the dataset epoch
};

struct Point2 {
  Scalar x = 0;
  Scalar y = 0;
};

struct Point3 {
  Scalar x = 0;
  Scalar y = 0;
  Scalar t = 0;
};

/// Half-open time interval [start, end) in days.
struct TimeWindow {
  Scalar start = 0;
  Scalar end = 0;

  Scalar length() const { return end - start; }
  bool contains(Scalar t) const { return t >= start && t < end; }

  void validate() const {
    if (!(start < end)) {
      throw ValidationError("TimeWindow: start must be strictly before end");
    }
  }
};

/// Kernel half-widths per axis. All strictly positive.
struct Bandwidths {
  Scalar h_x = 0;  // meters
  Scalar h_y = 0;  // meters
  Scalar h_t = 0;  // days

  void validate() const {
    auto ok = [](Scalar h) { return std::isfinite(h) && h > 0; };
    if (!ok(h_x) || !ok(h_y) || !ok(h_t)) {
      throw ValidationError("Bandwidths: h_x, h_y, h_t must be finite and positive");
    }
  }
};

struct CellIndex {
  Index i = 0;  // column (x)
  Index j = 0;  // row (y)

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct VoxelIndex {
  Index i = 0;
  Index j = 0;
  Index k = 0;  // time bin

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

/// Planar layout of square grid cells; (x_origin, y_origin) is the lower-left
/// corner of cell (0, 0). Cells are half-open: [lo, lo + cell_size) per axis.
struct GridSpec2D {
  Scalar x_origin = 0;
  Scalar y_origin = 0;
  Scalar cell_size = 1;  // meters, square cells
  Index n_cols = 0;
  Index n_rows = 0;

  Index cell_count() const { return n_cols * n_rows; }
  Scalar extent_x() const { return static_cast<Scalar>(n_cols) * cell_size; }
  Scalar extent_y() const { return static_cast<Scalar>(n_rows) * cell_size; }

  bool contains(Index i, Index j) const {
    return i >= 0 && i < n_cols && j >= 0 && j < n_rows;
  }

  /// Row-major flat index, used for tie-breaking and raster serialization.
  Index flat(Index i, Index j) const { return j * n_cols + i; }

  void validate() const {
    if (!(cell_size > 0) || !std::isfinite(cell_size)) {
      throw ValidationError("GridSpec2D: cell_size must be positive");
    }
    if (n_cols <= 0 || n_rows <= 0) {
      throw ValidationError("GridSpec2D: n_cols and n_rows must be positive");
    }
    if (!std::isfinite(x_origin) || !std::isfinite(y_origin)) {
      throw ValidationError("GridSpec2D: origin must be finite");
    }
  }

  friend bool operator==(const GridSpec2D&, const GridSpec2D&) = default;
};

/// The discretized space-time cube: a GridSpec2D plus a half-open time axis
/// partitioned into n_bins bins of depth t_bin days.
struct GridSpec3D {
  GridSpec2D spatial;
  Scalar t_start = 0;
  Scalar t_bin = 1;  // days
  Index n_bins = 0;

  Index voxel_count() const { return spatial.cell_count() * n_bins; }

  bool contains(Index i, Index j, Index k) const {
    return spatial.contains(i, j) && k >= 0 && k < n_bins;
  }

  void validate() const {
    spatial.validate();
    if (!(t_bin > 0) || !std::isfinite(t_bin)) {
      throw ValidationError("GridSpec3D: t_bin must be positive");
    }
    if (n_bins <= 0) {
      throw ValidationError("GridSpec3D: n_bins must be positive");
    }
    if (!std::isfinite(t_start)) {
      throw ValidationError("GridSpec3D: t_start must be finite");
    }
  }

  friend bool operator==(const GridSpec3D&, const GridSpec3D&) = default;
};

inline Point2 cell_centroid(Index i, Index j, const GridSpec2D& spec) {
  if (!spec.contains(i, j)) {
    throw std::out_of_range("cell_centroid: index outside grid");
  }
  return {spec.x_origin + (static_cast<Scalar>(i) + 0.5) * spec.cell_size,
          spec.y_origin + (static_cast<Scalar>(j) + 0.5) * spec.cell_size};
}

inline Point3 voxel_centroid(Index i, Index j, Index k, const GridSpec3D& spec) {
  if (!spec.contains(i, j, k)) {
    throw std::out_of_range("voxel_centroid: index outside grid");
  }
  const Point2 c = cell_centroid(i, j, spec.spatial);
  return {c.x, c.y, spec.t_start + (static_cast<Scalar>(k) + 0.5) * spec.t_bin};
}

/// Maps a planar point to its cell, or nullopt when it falls outside the grid.
/// Points on the maximum edge are outside (cells are half-open).
inline std::optional<CellIndex> world_to_cell(Scalar x, Scalar y, const GridSpec2D& spec) {
  const Index i = static_cast<Index>(std::floor((x - spec.x_origin) / spec.cell_size));
  const Index j = static_cast<Index>(std::floor((y - spec.y_origin) / spec.cell_size));
  if (!spec.contains(i, j)) {
    return std::nullopt;
  }
  return CellIndex{i, j};
}

inline std::optional<VoxelIndex> world_to_voxel(const Point3& p, const GridSpec3D& spec) {
  const auto cell = world_to_cell(p.x, p.y, spec.spatial);
  if (!cell) {
    return std::nullopt;
  }
  const Index k = static_cast<Index>(std::floor((p.t - spec.t_start) / spec.t_bin));
  if (k < 0 || k >= spec.n_bins) {
    return std::nullopt;
  }
  return VoxelIndex{cell->i, cell->j, k};
}

/// Density estimates at voxel centroids, per m^2 * day. slices[k](j, i).
struct DensityVolume {
  GridSpec3D spec;
  std::vector<Raster> slices;

  Scalar& at(Index i, Index j, Index k) { return slices[static_cast<std::size_t>(k)](j, i); }
  Scalar at(Index i, Index j, Index k) const { return slices[static_cast<std::size_t>(k)](j, i); }

  /// Riemann-sum total mass: sum of values times the voxel volume.
  Scalar mass() const {
    Scalar total = 0;
    for (const Raster& s : slices) {
      total += s.sum();
    }
    return total * spec.spatial.cell_size * spec.spatial.cell_size * spec.t_bin;
  }
};

inline DensityVolume make_zero_volume(const GridSpec3D& spec) {
  spec.validate();
  DensityVolume v{spec, {}};
  v.slices.assign(static_cast<std::size_t>(spec.n_bins),
                  Raster::Zero(spec.spatial.n_rows, spec.spatial.n_cols));
  return v;
}

/// A planar density (or risk-intensity) raster. values(j, i).
struct DensitySurface {
  GridSpec2D spec;
  Raster values;

  Scalar mass() const { return values.sum() * spec.cell_size * spec.cell_size; }
};

inline DensitySurface make_zero_surface(const GridSpec2D& spec) {
  spec.validate();
  return {spec, Raster::Zero(spec.n_rows, spec.n_cols)};
}

enum class LandUse : std::uint8_t {
  Outside = 0,            // not part of the study area
  InStudyNonEligible = 1, // in the study area, excluded from null simulation
  Eligible = 2,           // in the study area, eligible for null simulation
};

/// Per-cell land-use classification aligned with a GridSpec2D.
struct LandUseGrid {
  GridSpec2D spec;
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> classes;  // (j, i)

  LandUse at(Index i, Index j) const { return static_cast<LandUse>(classes(j, i)); }
  bool in_study(Index i, Index j) const { return at(i, j) != LandUse::Outside; }
  bool eligible(Index i, Index j) const { return at(i, j) == LandUse::Eligible; }

  Index study_cell_count() const {
    return (classes != static_cast<std::uint8_t>(LandUse::Outside)).count();
  }
  Index eligible_cell_count() const {
    return (classes == static_cast<std::uint8_t>(LandUse::Eligible)).count();
  }

  /// Study area A in m^2 (in-study cells times the cell footprint).
  Scalar study_area() const {
    return static_cast<Scalar>(study_cell_count()) * spec.cell_size * spec.cell_size;
  }

  /// Eligible cells in ascending row-major order.
  std::vector<CellIndex> eligible_cells() const {
    std::vector<CellIndex> out;
    out.reserve(static_cast<std::size_t>(eligible_cell_count()));
    for (Index j = 0; j < spec.n_rows; ++j) {
      for (Index i = 0; i < spec.n_cols; ++i) {
        if (eligible(i, j)) {
          out.push_back({i, j});
        }
      }
    }
    return out;
  }

  void validate() const {
    spec.validate();
    if (classes.rows() != spec.n_rows || classes.cols() != spec.n_cols) {
      throw ValidationError("LandUseGrid: raster dimensions do not match the grid spec");
    }
    if (eligible_cell_count() == 0) {
      throw ValidationError("LandUseGrid: at least one ELIGIBLE cell is required");
    }
  }
};

}  // namespace stkde
