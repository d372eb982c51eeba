#include "stkde/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace stkde::io {

namespace {

std::string format_double(Scalar v, const char* fmt) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, v);
  return buffer;
}

// Full precision: round-trips any double exactly.
std::string full(Scalar v) { return format_double(v, "%.17g"); }

// Reporting precision for metric CSVs.
std::string metric(Scalar v) { return format_double(v, "%.10g"); }

std::optional<Scalar> parse_double(const std::string& text) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  Scalar value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  return in;
}

std::string iso_date_of_day(std::int64_t serial_day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{serial_day}}};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buffer;
}

}  // namespace

std::optional<Scalar> parse_iso_datetime(const std::string& text) {
  std::string date_part = text;
  std::string time_part;
  const std::size_t sep = text.find_first_of("T ");
  if (sep != std::string::npos) {
    date_part = text.substr(0, sep);
    time_part = text.substr(sep + 1);
  }

  int y = 0, mo = 0, d = 0;
  char tail = 0;
  if (std::sscanf(date_part.c_str(), "%d-%d-%d%c", &y, &mo, &d, &tail) != 3) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    return std::nullopt;
  }

  Scalar day_fraction = 0;
  if (!time_part.empty()) {
    int h = 0, mi = 0;
    double sec = 0;
    char extra = 0;
    const int with_sec = std::sscanf(time_part.c_str(), "%d:%d:%lf%c", &h, &mi, &sec, &extra);
    if (with_sec != 3) {
      sec = 0;
      if (std::sscanf(time_part.c_str(), "%d:%d%c", &h, &mi, &extra) != 2) {
        return std::nullopt;
      }
    }
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec >= 60) {
      return std::nullopt;
    }
    day_fraction = (static_cast<Scalar>(h) * 3600.0 + static_cast<Scalar>(mi) * 60.0 + sec) / 86400.0;
  }
  const auto serial = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Scalar>(serial) + day_fraction;
}

IncidentsCsv read_incidents_csv(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "id,x,y,t") {
    throw ValidationError("'" + path.string() + "': missing or malformed header (expected id,x,y,t)");
  }

  struct Row {
    Incident incident;
    std::optional<Scalar> serial;  // set when t was an ISO date
  };
  std::vector<Row> rows;
  IncidentsCsv result;
  std::unordered_set<std::string> seen_ids;
  bool any_numeric = false;
  bool any_calendar = false;

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    const auto reject = [&](const std::string& why) {
      result.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) {
      reject("expected 4 fields, got " + std::to_string(fields.size()));
      continue;
    }
    if (fields[0].empty()) {
      reject("empty id");
      continue;
    }
    const auto x = parse_double(fields[1]);
    const auto y = parse_double(fields[2]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      reject("unparseable coordinates");
      continue;
    }
    Row row;
    row.incident.id = fields[0];
    row.incident.x = *x;
    row.incident.y = *y;
    if (const auto t = parse_double(fields[3]); t && std::isfinite(*t)) {
      row.incident.t = *t;
      any_numeric = true;
    } else if (const auto serial = parse_iso_datetime(fields[3])) {
      row.serial = *serial;
      any_calendar = true;
    } else {
      reject("unparseable t value '" + fields[3] + "'");
      continue;
    }
    if (!seen_ids.insert(row.incident.id).second) {
      throw ValidationError("'" + path.string() + "': duplicate incident id '" +
                            row.incident.id + "'");
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) {
    throw ValidationError("'" + path.string() + "': no valid incident rows");
  }
  if (any_numeric && any_calendar) {
    throw ValidationError("'" + path.string() +
                          "': t column mixes numeric days and calendar dates");
  }

  result.calendar = any_calendar;
  if (any_calendar) {
    Scalar min_serial = rows.front().serial.value();
    for (const Row& row : rows) {
      min_serial = std::min(min_serial, row.serial.value());
    }
    const Scalar epoch_day = std::floor(min_serial);
    result.epoch = iso_date_of_day(static_cast<std::int64_t>(epoch_day));
    for (Row& row : rows) {
      row.incident.t = row.serial.value() - epoch_day;
    }
  } else {
    result.epoch = "0";
  }
  result.incidents.reserve(rows.size());
  for (Row& row : rows) {
    result.incidents.push_back(std::move(row.incident));
  }
  return result;
}

void write_incidents_csv(const std::filesystem::path& path, std::span<const Incident> incidents) {
  std::string out = "id,x,y,t\n";
  for (const Incident& inc : incidents) {
    out += inc.id;
    out += ',';
    out += full(inc.x);
    out += ',';
    out += full(inc.y);
    out += ',';
    out += full(inc.t);
    out += '\n';
  }
  atomic_write(path, out);
}

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  const char* keys[6] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value"};
  Scalar header[6];
  std::string line;
  for (int h = 0; h < 6; ++h) {
    if (!std::getline(in, line)) {
      throw ValidationError("'" + path.string() + "': truncated header at line " +
                            std::to_string(h + 1));
    }
    std::istringstream ls(strip_cr(line));
    std::string key;
    ls >> key >> header[h];
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::string expected = keys[h];
    std::transform(expected.begin(), expected.end(), expected.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (!ls || key != expected) {
      throw ValidationError("'" + path.string() + "': line " + std::to_string(h + 1) +
                            ": expected '" + keys[h] + " <value>'");
    }
  }

  AsciiGrid grid;
  grid.spec.n_cols = static_cast<Index>(header[0]);
  grid.spec.n_rows = static_cast<Index>(header[1]);
  grid.spec.x_origin = header[2];
  grid.spec.y_origin = header[3];
  grid.spec.cell_size = header[4];
  grid.nodata_value = header[5];
  grid.spec.validate();
  grid.values = Raster::Zero(grid.spec.n_rows, grid.spec.n_cols);
  grid.nodata = BoolRaster::Constant(grid.spec.n_rows, grid.spec.n_cols, false);

  for (Index r = 0; r < grid.spec.n_rows; ++r) {
    const long line_no = 7 + r;
    if (!std::getline(in, line)) {
      throw ValidationError("'" + path.string() + "': line " + std::to_string(line_no) +
                            ": expected " + std::to_string(grid.spec.n_rows) + " data rows");
    }
    std::istringstream ls(strip_cr(line));
    const Index j = grid.spec.n_rows - 1 - r;  // file rows run north to south
    for (Index i = 0; i < grid.spec.n_cols; ++i) {
      Scalar v;
      if (!(ls >> v)) {
        throw ValidationError("'" + path.string() + "': line " + std::to_string(line_no) +
                              ": row has fewer than " + std::to_string(grid.spec.n_cols) +
                              " values");
      }
      grid.values(j, i) = v;
      grid.nodata(j, i) = v == grid.nodata_value;
    }
    Scalar extra;
    if (ls >> extra) {
      throw ValidationError("'" + path.string() + "': line " + std::to_string(line_no) +
                            ": row has more than " + std::to_string(grid.spec.n_cols) +
                            " values");
    }
  }
  return grid;
}

void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid) {
  grid.spec.validate();
  std::string out;
  out += "ncols " + std::to_string(grid.spec.n_cols) + "\n";
  out += "nrows " + std::to_string(grid.spec.n_rows) + "\n";
  out += "xllcorner " + full(grid.spec.x_origin) + "\n";
  out += "yllcorner " + full(grid.spec.y_origin) + "\n";
  out += "cellsize " + full(grid.spec.cell_size) + "\n";
  out += "NODATA_value " + full(grid.nodata_value) + "\n";
  for (Index r = 0; r < grid.spec.n_rows; ++r) {
    const Index j = grid.spec.n_rows - 1 - r;
    for (Index i = 0; i < grid.spec.n_cols; ++i) {
      if (i > 0) {
        out += ' ';
      }
      out += full(grid.nodata(j, i) ? grid.nodata_value : grid.values(j, i));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

AsciiGrid to_ascii(const LandUseGrid& grid) {
  AsciiGrid out;
  out.spec = grid.spec;
  out.values = Raster::Zero(grid.spec.n_rows, grid.spec.n_cols);
  out.nodata = BoolRaster::Constant(grid.spec.n_rows, grid.spec.n_cols, false);
  for (Index j = 0; j < grid.spec.n_rows; ++j) {
    for (Index i = 0; i < grid.spec.n_cols; ++i) {
      switch (grid.at(i, j)) {
        case LandUse::Outside:
          out.nodata(j, i) = true;
          break;
        case LandUse::InStudyNonEligible:
          out.values(j, i) = 0;
          break;
        case LandUse::Eligible:
          out.values(j, i) = 1;
          break;
      }
    }
  }
  return out;
}

LandUseGrid landuse_from_ascii(const AsciiGrid& grid) {
  LandUseGrid out{grid.spec,
                  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                      grid.spec.n_rows, grid.spec.n_cols,
                      static_cast<std::uint8_t>(LandUse::Outside))};
  for (Index j = 0; j < grid.spec.n_rows; ++j) {
    for (Index i = 0; i < grid.spec.n_cols; ++i) {
      if (grid.nodata(j, i)) {
        continue;
      }
      const Scalar v = grid.values(j, i);
      if (v == 0) {
        out.classes(j, i) = static_cast<std::uint8_t>(LandUse::InStudyNonEligible);
      } else if (v == 1) {
        out.classes(j, i) = static_cast<std::uint8_t>(LandUse::Eligible);
      } else {
        throw ValidationError("land-use raster holds code " + metric(v) +
                              " (expected NODATA, 0, or 1)");
      }
    }
  }
  out.validate();
  return out;
}

AsciiGrid to_ascii(const DensitySurface& surface) {
  AsciiGrid out;
  out.spec = surface.spec;
  out.values = surface.values;
  out.nodata = BoolRaster::Constant(surface.spec.n_rows, surface.spec.n_cols, false);
  return out;
}

DensitySurface surface_from_ascii(const AsciiGrid& grid) {
  if (grid.nodata.any()) {
    throw ValidationError("density raster holds NODATA cells");
  }
  return {grid.spec, grid.values};
}

AsciiGrid to_ascii(const BoolRaster& mask, const GridSpec2D& spec) {
  AsciiGrid out;
  out.spec = spec;
  out.values = mask.cast<Scalar>();
  out.nodata = BoolRaster::Constant(spec.n_rows, spec.n_cols, false);
  return out;
}

BoolRaster mask_from_ascii(const AsciiGrid& grid) {
  return !grid.nodata && grid.values != 0.0;
}

void write_density_slices(const std::filesystem::path& dir, const std::string& stem,
                          const DensityVolume& volume) {
  for (Index k = 0; k < volume.spec.n_bins; ++k) {
    const DensitySurface slice{volume.spec.spatial,
                               volume.slices[static_cast<std::size_t>(k)]};
    write_ascii_grid(dir / (stem + "_t" + std::to_string(k) + ".asc"), to_ascii(slice));
  }
}

namespace {

void append_curve_rows(std::string& out, const std::string& method, const std::string& group,
                       const PAICurve& curve) {
  for (const PAIPoint& p : curve.points) {
    out += method + "," + group + "," + metric(p.area_pct) + ",";
    if (p.feasible) {
      out += metric(p.hotspot_cells) + "," + metric(p.hit_rate) + "," + metric(p.pai) + ",true\n";
    } else {
      out += ",,,false\n";
    }
  }
}

}  // namespace

void write_pai_csv(const std::filesystem::path& path,
                   const std::map<std::string, MethodCurves>& curves) {
  std::string out = "method,group,area_pct,hotspot_cells,hit_rate,pai,feasible\n";
  for (const auto& [method, mc] : curves) {
    for (std::size_t g = 0; g < mc.groups.size(); ++g) {
      append_curve_rows(out, method, std::to_string(g + 1), mc.groups[g]);
    }
    append_curve_rows(out, method, "mean", mc.mean);
  }
  atomic_write(path, out);
}

std::map<std::string, MethodCurves> read_pai_csv(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::string line;
  if (!std::getline(in, line) ||
      strip_cr(line) != "method,group,area_pct,hotspot_cells,hit_rate,pai,feasible") {
    throw ValidationError("'" + path.string() + "': missing or malformed PAI CSV header");
  }

  std::map<std::string, std::map<long, PAICurve>> groups;  // group "mean" keyed as -1
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 7) {
      throw ValidationError("'" + path.string() + "': line " + std::to_string(line_no) +
                            ": expected 7 fields");
    }
    const auto bad = [&](const std::string& what) {
      return ValidationError("'" + path.string() + "': line " + std::to_string(line_no) + ": " +
                             what);
    };
    long group_key;
    if (fields[1] == "mean") {
      group_key = -1;
    } else {
      try {
        group_key = std::stol(fields[1]);
      } catch (const std::exception&) {
        throw bad("unparseable group '" + fields[1] + "'");
      }
    }
    PAIPoint p;
    const auto area = parse_double(fields[2]);
    if (!area) {
      throw bad("unparseable area_pct");
    }
    p.area_pct = *area;
    if (fields[6] == "true") {
      p.feasible = true;
      const auto cells = parse_double(fields[3]);
      const auto hit = parse_double(fields[4]);
      const auto score = parse_double(fields[5]);
      if (!cells || !hit || !score) {
        throw bad("unparseable feasible row");
      }
      p.hotspot_cells = *cells;
      p.hit_rate = *hit;
      p.pai = *score;
    } else if (fields[6] != "false") {
      throw bad("feasible must be true or false");
    }
    groups[fields[0]][group_key].points.push_back(p);
  }

  std::map<std::string, MethodCurves> result;
  for (auto& [method, by_group] : groups) {
    MethodCurves mc;
    for (auto& [key, curve] : by_group) {
      if (key == -1) {
        mc.mean = std::move(curve);
      } else {
        mc.groups.push_back(std::move(curve));
      }
    }
    result[method] = std::move(mc);
  }
  return result;
}

void write_comparison_csv(const std::filesystem::path& path, const MethodComparison& cmp) {
  std::string out = "kind,area_pct,method_a,method_b,statistic,p\n";
  for (const auto& row : cmp.anova_rows) {
    std::string joined;
    for (const auto& m : row.methods) {
      if (!joined.empty()) {
        joined += '+';
      }
      joined += m;
    }
    out += "anova," + metric(row.area_pct) + "," + joined + ",," +
           metric(row.result.statistic) + "," + metric(row.result.p_value) + "\n";
  }
  for (const auto& row : cmp.t_rows) {
    out += "t_test," + metric(row.area_pct) + "," + row.method_a + "," + row.method_b + "," +
           metric(row.result.statistic) + "," + metric(row.result.p_value) + "\n";
  }
  if (cmp.overall_anova) {
    out += "anova_overall,,,," + metric(cmp.overall_anova->statistic) + "," +
           metric(cmp.overall_anova->p_value) + "\n";
  }
  for (const auto& row : cmp.overall_pairs) {
    out += "t_test_overall,," + row.method_a + "," + row.method_b + "," +
           metric(row.result.statistic) + "," + metric(row.result.p_value) + "\n";
  }
  for (const auto& [method, score] : cmp.mean_pai) {
    out += "mean_pai,," + method + ",," + metric(score) + ",\n";
  }
  atomic_write(path, out);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write '" + tmp.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw ValidationError("failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace stkde::io
