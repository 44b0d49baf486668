#include "rdeq/gridio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rdeq/errors.hpp"

namespace rdeq {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Parses "key=value" tokens from the descriptor comment line.
bool parse_header_fields(const std::string& line, GridSpec2D& spec, bool& normalized) {
  std::istringstream in(line);
  std::string token;
  in >> token;  // leading '#'
  int seen = 0;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    char* end = nullptr;
    if (key == "x_min") spec.x_min = std::strtod(value.c_str(), &end);
    else if (key == "x_max") spec.x_max = std::strtod(value.c_str(), &end);
    else if (key == "y_min") spec.y_min = std::strtod(value.c_str(), &end);
    else if (key == "y_max") spec.y_max = std::strtod(value.c_str(), &end);
    else if (key == "nx") spec.nx = std::strtoull(value.c_str(), &end, 10);
    else if (key == "ny") spec.ny = std::strtoull(value.c_str(), &end, 10);
    else if (key == "normalized") { normalized = value == "true"; end = nullptr; ++seen; continue; }
    else continue;
    if (end == value.c_str()) return false;
    ++seen;
  }
  return seen == 7;
}

}  // namespace

void write_grid_csv(const DensityGrid2D& g, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_metadata) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  const GridSpec2D& s = g.spec();
  out << "# x_min=" << format_double(s.x_min) << " x_max=" << format_double(s.x_max)
      << " y_min=" << format_double(s.y_min) << " y_max=" << format_double(s.y_max)
      << " nx=" << s.nx << " ny=" << s.ny
      << " normalized=" << (g.normalized() ? "true" : "false") << "\n";
  for (const auto& line : extra_metadata) {
    out << "# " << line << "\n";
  }
  for (std::size_t iy = 0; iy < s.ny; ++iy) {
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      if (ix > 0) out << ',';
      out << format_double(g.at(ix, iy));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

DensityGrid2D read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");

  GridSpec2D spec;
  bool normalized = false;
  bool have_header = false;
  long line_no = 0;
  std::string line;

  // Header block: comment lines, one of which carries the grid descriptor.
  while (in.peek() == '#' && std::getline(in, line)) {
    ++line_no;
    if (!have_header && line.find("x_min=") != std::string::npos) {
      if (!parse_header_fields(line, spec, normalized)) {
        throw ParseError("malformed grid header", line_no);
      }
      have_header = true;
    }
  }
  if (!have_header) throw ParseError("missing grid header", line_no + 1);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid grid header: ") + e.what(), line_no);
  }

  DensityGrid2D g(spec, normalized);
  for (std::size_t iy = 0; iy < spec.ny; ++iy) {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of file: expected " + std::to_string(spec.ny) +
                           " data rows",
                       line_no + 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* cursor = line.c_str();
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
      char* end = nullptr;
      const double v = std::strtod(cursor, &end);
      if (end == cursor) {
        throw ParseError("expected " + std::to_string(spec.nx) + " values, found " +
                             std::to_string(ix),
                         line_no);
      }
      g.at(ix, iy) = v;
      cursor = end;
      if (*cursor == ',') ++cursor;
    }
    while (*cursor == ' ') ++cursor;
    if (*cursor != '\0') {
      throw ParseError("trailing content after " + std::to_string(spec.nx) + " values",
                       line_no);
    }
  }
  return g;
}

void write_heatmap_pgm(const DensityGrid2D& g, const std::filesystem::path& path,
                       double gamma, const std::vector<std::string>& extra_metadata) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const GridSpec2D& s = g.spec();
  const double v_max = g.max_value();
  if (v_max == 0.0) {
    std::cerr << "warning: empty grid, writing all-black heatmap to " << path.string()
              << "\n";
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n";
  for (const auto& line : extra_metadata) out << "# " << line << "\n";
  out << s.nx << " " << s.ny << "\n255\n";

  std::vector<unsigned char> row(s.nx);
  for (std::size_t iy = s.ny; iy-- > 0;) {  // last grid row = top image row
    for (std::size_t ix = 0; ix < s.nx; ++ix) {
      double level = 0.0;
      if (v_max > 0.0) {
        level = std::pow(g.at(ix, iy) / v_max, gamma) * 255.0;
      }
      row[ix] = static_cast<unsigned char>(std::lround(std::clamp(level, 0.0, 255.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

PeakList find_peaks(const DensityGrid2D& g, double threshold_fraction, int merge_radius) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold_fraction must be in (0,1)");
  }
  if (merge_radius < 0) throw std::invalid_argument("merge_radius must be >= 0");

  const GridSpec2D& s = g.spec();
  const double v_max = g.max_value();
  const double threshold = threshold_fraction * v_max;

  struct Candidate {
    std::size_t ix, iy;
    double v;
  };
  std::vector<Candidate> candidates;
  if (v_max > 0.0) {
    for (std::size_t iy = 0; iy < s.ny; ++iy) {
      for (std::size_t ix = 0; ix < s.nx; ++ix) {
        const double v = g.at(ix, iy);
        if (v < threshold) continue;
        bool strict_max = true;
        for (int dy = -1; dy <= 1 && strict_max; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const long jx = static_cast<long>(ix) + dx;
            const long jy = static_cast<long>(iy) + dy;
            if (jx < 0 || jy < 0 || jx >= static_cast<long>(s.nx) ||
                jy >= static_cast<long>(s.ny)) {
              continue;  // border cells compare against existing neighbors only
            }
            if (g.at(static_cast<std::size_t>(jx), static_cast<std::size_t>(jy)) >= v) {
              strict_max = false;
              break;
            }
          }
        }
        if (strict_max) candidates.push_back({ix, iy, v});
      }
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.v > b.v; });

  PeakList result{{}, threshold_fraction, merge_radius};
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    bool merged = false;
    for (const auto& k : kept) {
      const auto dist = std::max(
          c.ix > k.ix ? c.ix - k.ix : k.ix - c.ix,
          c.iy > k.iy ? c.iy - k.iy : k.iy - c.iy);
      if (dist < static_cast<std::size_t>(merge_radius)) {
        merged = true;  // the kept one is at least as large
        break;
      }
    }
    if (!merged) {
      kept.push_back(c);
      result.peaks.push_back({s.x_center(c.ix), s.y_center(c.iy), c.v});
    }
  }
  return result;
}

}  // namespace rdeq
