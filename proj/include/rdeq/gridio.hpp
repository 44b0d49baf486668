#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rdeq/grid.hpp"

namespace rdeq {

struct Peak {
  double x;
  double y;
  double density;
};

struct PeakList {
  std::vector<Peak> peaks;  // sorted by descending density
  double threshold_fraction;
  int merge_radius;
};

/// Writes a grid as text: comment header lines carrying the window, cell
/// counts and normalization flag (plus any extra metadata lines), then ny
/// rows of nx comma-separated values, y increasing, at full double
/// precision (17 significant digits, lossless round trip).
void write_grid_csv(const DensityGrid2D& g, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_metadata = {});

/// Inverse of write_grid_csv. Throws ParseError (with the offending line
/// number) on malformed input, IoError when the file cannot be read.
DensityGrid2D read_grid_csv(const std::filesystem::path& path);

/// Binary portable graymap (P5, maxval 255) rendering of a grid,
/// pixel = round(255 * (v / v_max)^gamma), y axis upward. A grid with
/// v_max = 0 produces an all-black image and a warning on stderr.
void write_heatmap_pgm(const DensityGrid2D& g, const std::filesystem::path& path,
                       double gamma = 0.5,
                       const std::vector<std::string>& extra_metadata = {});

/// Cells that are strict maxima over their 8-neighborhood and reach
/// threshold_fraction of the grid maximum; maxima closer than merge_radius
/// (Chebyshev cell distance) are merged keeping the larger. Coordinates are
/// cell centers. The threshold is relative, so the result is invariant
/// under positive rescaling of the grid.
PeakList find_peaks(const DensityGrid2D& g, double threshold_fraction = 0.05,
                    int merge_radius = 3);

}  // namespace rdeq
