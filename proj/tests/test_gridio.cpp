#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdeq/errors.hpp"
#include "rdeq/gridio.hpp"
#include "test_util.hpp"

using rdeq::DensityGrid2D;
using rdeq::GridSpec2D;
using rdeq::test::TempDir;
using rdeq::test::uniform;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Pgm {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<unsigned char> pixels;
};

Pgm parse_pgm(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  REQUIRE(magic == "P5");
  std::string token;
  std::vector<std::size_t> dims;
  while (dims.size() < 3 && in >> token) {
    if (token[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    dims.push_back(std::stoull(token));
  }
  REQUIRE(dims.size() == 3);
  REQUIRE(dims[2] == 255);
  Pgm pgm{dims[0], dims[1], {}};
  in.get();  // single whitespace after maxval
  const auto offset = static_cast<std::size_t>(in.tellg());
  pgm.pixels.assign(bytes.begin() + static_cast<long>(offset), bytes.end());
  REQUIRE(pgm.pixels.size() == pgm.width * pgm.height);
  return pgm;
}

DensityGrid2D gaussian_bumps(const GridSpec2D& spec,
                             const std::vector<std::array<double, 3>>& bumps,
                             double width) {
  DensityGrid2D g(spec, false);
  for (std::size_t iy = 0; iy < spec.ny; ++iy) {
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
      const double x = spec.x_center(ix);
      const double y = spec.y_center(iy);
      double v = 0.0;
      for (const auto& b : bumps) {
        const double dx = (x - b[0]) / width;
        const double dy = (y - b[1]) / width;
        v += b[2] * std::exp(-0.5 * (dx * dx + dy * dy));
      }
      g.at(ix, iy) = v;
    }
  }
  return g;
}

}  // namespace

TEST_CASE("csv: write/read round trip is lossless") {
  TempDir dir("csv");
  std::mt19937_64 rng(71);
  const GridSpec2D spec{-0.25, 1.75, 0.5, 2.0, 7, 5};
  std::vector<double> values(35);
  for (auto& v : values) v = std::exp(uniform(rng, -200.0, 200.0));
  values[3] = 0.0;
  const DensityGrid2D g(spec, values, true);

  const auto path = dir.path() / "grid.csv";
  rdeq::write_grid_csv(g, path, {"scenario_hash=abc seed=7 tool_version=0.0.0"});
  const DensityGrid2D back = rdeq::read_grid_csv(path);

  CHECK(back.spec() == g.spec());
  CHECK(back.normalized() == g.normalized());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(back.values()[i] == g.values()[i]);
  }
}

TEST_CASE("csv: a 2x2 zero grid is exactly two '0,0' lines") {
  TempDir dir("csv0");
  const DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 2, 2}, false);
  const auto path = dir.path() / "zeros.csv";
  rdeq::write_grid_csv(g, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("# x_min=0") == 0);
  std::getline(in, line);
  CHECK(line == "0,0");
  std::getline(in, line);
  CHECK(line == "0,0");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("csv: the header records the normalization flag") {
  TempDir dir("csvflag");
  const DensityGrid2D raw({0.0, 1.0, 0.0, 1.0, 2, 2}, std::vector<double>{1, 2, 3, 4}, false);
  const DensityGrid2D norm({0.0, 1.0, 0.0, 1.0, 2, 2}, std::vector<double>{1, 1, 1, 1}, true);
  rdeq::write_grid_csv(raw, dir.path() / "raw.csv");
  rdeq::write_grid_csv(norm, dir.path() / "norm.csv");
  CHECK_FALSE(rdeq::read_grid_csv(dir.path() / "raw.csv").normalized());
  CHECK(rdeq::read_grid_csv(dir.path() / "norm.csv").normalized());
}

TEST_CASE("csv: parse errors carry line numbers") {
  TempDir dir("csverr");

  const auto truncated = dir.path() / "truncated.csv";
  {
    std::ofstream out(truncated);
    out << "# x_min=0 x_max=1 y_min=0 y_max=1 nx=2 ny=3 normalized=false\n0,0\n";
  }
  CHECK_THROWS_AS(rdeq::read_grid_csv(truncated), rdeq::ParseError);

  const auto bad_columns = dir.path() / "columns.csv";
  {
    std::ofstream out(bad_columns);
    out << "# x_min=0 x_max=1 y_min=0 y_max=1 nx=3 ny=4 normalized=false\n"
        << "1,2,3\n1,2,3\n1,2,3\n1,2\n";  // line 5 has two values
  }
  try {
    rdeq::read_grid_csv(bad_columns);
    FAIL("expected ParseError");
  } catch (const rdeq::ParseError& e) {
    CHECK(e.line() == 5);
  }

  const auto headerless = dir.path() / "headerless.csv";
  {
    std::ofstream out(headerless);
    out << "1,2\n3,4\n";
  }
  CHECK_THROWS_AS(rdeq::read_grid_csv(headerless), rdeq::ParseError);
}

TEST_CASE("pgm: uniform grid renders uniformly white") {
  TempDir dir("pgmu");
  const DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 6, 3}, std::vector<double>(18, 4.2), false);
  const auto path = dir.path() / "u.pgm";
  rdeq::write_heatmap_pgm(g, path, 0.5);
  const Pgm pgm = parse_pgm(path);
  CHECK(pgm.width == 6);
  CHECK(pgm.height == 3);
  for (unsigned char p : pgm.pixels) CHECK(p == 255);
}

TEST_CASE("pgm: single hot cell maps to a single white pixel, y axis upward") {
  TempDir dir("pgm1");
  DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 5, 4}, false);
  g.at(1, 2) = 3.0;
  const auto path = dir.path() / "one.pgm";
  rdeq::write_heatmap_pgm(g, path, 0.5);
  const Pgm pgm = parse_pgm(path);
  REQUIRE(pgm.pixels.size() == 20);
  // Grid row iy=2 is the second image row from the top (ny-1-iy = 1).
  const std::size_t expected = 1 * 5 + 1;
  for (std::size_t i = 0; i < pgm.pixels.size(); ++i) {
    CHECK(pgm.pixels[i] == (i == expected ? 255 : 0));
  }
}

TEST_CASE("pgm: gamma shapes the intensity ramp") {
  TempDir dir("pgmg");
  DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 2, 2}, std::vector<double>{0.25, 1.0, 0.0, 0.0}, false);
  const auto path = dir.path() / "g.pgm";
  rdeq::write_heatmap_pgm(g, path, 0.5);
  const Pgm pgm = parse_pgm(path);
  // Grid row iy=0 is the bottom image row; 255 * 0.25^0.5 = 127.5 -> 128.
  CHECK(pgm.pixels[1 * 2 + 0] == 128);
  CHECK(pgm.pixels[1 * 2 + 1] == 255);
}

TEST_CASE("pgm: empty grid writes an all-black image") {
  TempDir dir("pgm0");
  const DensityGrid2D g({0.0, 1.0, 0.0, 1.0, 3, 3}, false);
  const auto path = dir.path() / "black.pgm";
  rdeq::write_heatmap_pgm(g, path, 0.5);
  const Pgm pgm = parse_pgm(path);
  for (unsigned char p : pgm.pixels) CHECK(p == 0);
}

TEST_CASE("peaks: a single bump yields a single centered peak") {
  const GridSpec2D spec{0.0, 1.0, 0.0, 1.0, 51, 51};
  const auto g = gaussian_bumps(spec, {{0.52, 0.48, 1.0}}, 0.08);
  const auto list = rdeq::find_peaks(g, 0.05, 3);
  REQUIRE(list.peaks.size() == 1);
  CHECK(std::abs(list.peaks[0].x - 0.52) <= spec.dx());
  CHECK(std::abs(list.peaks[0].y - 0.48) <= spec.dy());
}

TEST_CASE("peaks: nearby maxima merge, keeping the larger") {
  const GridSpec2D spec{0.0, 1.0, 0.0, 1.0, 40, 40};
  DensityGrid2D g(spec, false);
  g.at(20, 20) = 1.0;
  g.at(21, 21) = 0.8;  // Chebyshev distance 1 < merge radius
  const auto list = rdeq::find_peaks(g, 0.05, 3);
  REQUIRE(list.peaks.size() == 1);
  CHECK(list.peaks[0].density == 1.0);

  g.at(25, 20) = 0.9;  // distance 5 >= merge radius: a separate peak
  const auto two = rdeq::find_peaks(g, 0.05, 3);
  CHECK(two.peaks.size() == 2);
  CHECK(two.peaks[0].density >= two.peaks[1].density);
}

TEST_CASE("peaks: relative threshold drops shallow maxima") {
  const GridSpec2D spec{0.0, 1.0, 0.0, 1.0, 40, 40};
  DensityGrid2D g(spec, false);
  g.at(5, 5) = 1.0;
  g.at(30, 30) = 0.01;  // below 5% of the maximum
  CHECK(rdeq::find_peaks(g, 0.05, 3).peaks.size() == 1);
  CHECK(rdeq::find_peaks(g, 0.005, 3).peaks.size() == 2);
}

TEST_CASE("peaks: detection is invariant under positive rescaling") {
  const GridSpec2D spec{0.0, 1.2, 0.4, 1.6, 80, 80};
  const auto g = gaussian_bumps(spec,
                                {{0.3, 0.8, 1.0}, {0.7, 1.2, 0.5}, {0.9, 0.6, 0.2}}, 0.05);
  const auto base = rdeq::find_peaks(g, 0.05, 3);
  for (double scale : {2.0, 0.125, 3.7, 1e-6}) {
    std::vector<double> scaled(g.values().begin(), g.values().end());
    for (auto& v : scaled) v *= scale;
    const auto list = rdeq::find_peaks(DensityGrid2D(spec, scaled, false), 0.05, 3);
    REQUIRE(list.peaks.size() == base.peaks.size());
    for (std::size_t i = 0; i < list.peaks.size(); ++i) {
      CHECK(list.peaks[i].x == base.peaks[i].x);
      CHECK(list.peaks[i].y == base.peaks[i].y);
    }
  }
}

TEST_CASE("peaks: twelve separated bumps are all found") {
  const GridSpec2D spec{0.0, 1.5, 0.0, 1.5, 150, 150};
  std::vector<std::array<double, 3>> bumps;
  std::mt19937_64 rng(72);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      // Centers off the cell-boundary midpoints so each bump has a unique
      // maximal cell.
      bumps.push_back({0.253 + 0.4 * i, 0.204 + 0.35 * j, uniform(rng, 0.3, 1.0)});
    }
  }
  const auto g = gaussian_bumps(spec, bumps, 0.03);
  const auto list = rdeq::find_peaks(g, 0.05, 3);
  CHECK(list.peaks.size() == 12);
  for (std::size_t i = 1; i < list.peaks.size(); ++i) {
    CHECK(list.peaks[i - 1].density >= list.peaks[i].density);
  }
}
