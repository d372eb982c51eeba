#pragma once

#include "stkde/evaluation.hpp"
#include "stkde/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stkde::io {

/// Incidents parsed from a `id,x,y,t` CSV. The t column is either ISO-8601
/// dates/datetimes (normalized to fractional days since the minimum date,
/// which becomes the epoch) or plain decimal days (epoch "0"). Rows with
/// unparseable fields are skipped and reported in `warnings` with their line
/// numbers.
struct IncidentsCsv {
  std::vector<Incident> incidents;
  bool calendar = false;
  std::string epoch;  // ISO date of day zero, or "0" for numeric timelines
  std::vector<std::string> warnings;
};

IncidentsCsv read_incidents_csv(const std::filesystem::path& path);
void write_incidents_csv(const std::filesystem::path& path, std::span<const Incident> incidents);

/// Fractional days since 1970-01-01 for "YYYY-MM-DD", with optional
/// "THH:MM[:SS[.frac]]" (a space also separates). nullopt when malformed.
std::optional<Scalar> parse_iso_datetime(const std::string& text);

/// ESRI ASCII grid. values(j, i) with j = 0 the southernmost row; the file
/// stores rows north to south. Doubles are written with 17 significant
/// digits, so write-then-read round-trips bit-exactly.
struct AsciiGrid {
  GridSpec2D spec;
  Raster values;
  BoolRaster nodata;
  Scalar nodata_value = -9999;
};

AsciiGrid read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid);

/// Land-use encoding: NODATA = outside study area, 0 = in-study non-eligible,
/// 1 = eligible for null simulation.
AsciiGrid to_ascii(const LandUseGrid& grid);
LandUseGrid landuse_from_ascii(const AsciiGrid& grid);

AsciiGrid to_ascii(const DensitySurface& surface);
DensitySurface surface_from_ascii(const AsciiGrid& grid);

AsciiGrid to_ascii(const BoolRaster& mask, const GridSpec2D& spec);
BoolRaster mask_from_ascii(const AsciiGrid& grid);

/// One file per time bin, named `<stem>_t<k>.asc`.
void write_density_slices(const std::filesystem::path& dir, const std::string& stem,
                          const DensityVolume& volume);

struct MethodCurves {
  std::vector<PAICurve> groups;  // ordered by group index
  PAICurve mean;
};

/// `method,group,area_pct,hotspot_cells,hit_rate,pai,feasible` with rows
/// ordered by (method, group, area_pct); consolidated rows use group "mean".
/// Infeasible scales carry feasible = false and empty value fields.
void write_pai_csv(const std::filesystem::path& path,
                   const std::map<std::string, MethodCurves>& curves);
std::map<std::string, MethodCurves> read_pai_csv(const std::filesystem::path& path);

void write_comparison_csv(const std::filesystem::path& path, const MethodComparison& comparison);

/// Writes content to a temporary sibling and renames it into place, so an
/// interrupted run never leaves a truncated artifact.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace stkde::io
