#pragma once

#include "splatsim/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace splatsim {

// Screen-space form of a projected Gaussian. `conic` is the upper triangle
// (a, b, c) of the inverse 2x2 screen covariance; `radius` is the 3-sigma
// extent in pixels (3 * sqrt of the larger eigenvalue).
struct Gaussian2D {
  Eigen::Vector2f xy = Eigen::Vector2f::Zero();  // pixel coords of the center
  float conic_a = 1.0f;
  float conic_b = 0.0f;
  float conic_c = 1.0f;
  float opacity = 1.0f;
  Eigen::Vector3f color = Eigen::Vector3f::Zero();
  float depth = 1.0f;  // camera-space z
  float radius = 0.0f;
};

// Per-tile depth-sorted index lists over a row-major tile grid.
struct TileBinning {
  int tile_cols = 0;
  int tile_rows = 0;
  std::vector<std::uint32_t> point_list;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> tile_ranges;  // [start, end)

  int tile_count() const { return tile_cols * tile_rows; }
  int tile_size(int t) const { return static_cast<int>(tile_ranges[t].second - tile_ranges[t].first); }
};

struct TileHistogram {
  std::vector<std::uint32_t> counts;
  std::uint32_t min = 0;
  std::uint32_t max = 0;
  double mean = 0.0;
  std::uint32_t p50 = 0;  // nearest-rank percentiles
  std::uint32_t p99 = 0;
};

inline constexpr float kNearPlane = 0.01f;

// Screen covariance J * W * Sigma * W^T * J^T restricted to 2x2. Exposed for
// direct testing against hand-built J/W matrices.
Eigen::Matrix2d project_covariance(const Eigen::Matrix<double, 2, 3>& jacobian,
                                   const Eigen::Matrix3d& view_rot,
                                   const Eigen::Matrix3d& cov3d);

// Projects one Gaussian through the camera. Returns nullopt when camera-space
// z <= kNearPlane or the 2D footprint degenerates.
std::optional<Gaussian2D> project_gaussian(const Gaussian3D& g, const Camera& cam);

std::vector<Gaussian2D> project_all(const std::vector<Gaussian3D>& gaussians, const Camera& cam);

// Bins Gaussians into tiles: a Gaussian lands in every tile whose pixel rect
// overlaps the axis-aligned box of its radius circle. Within each tile the
// list is sorted by depth ascending, ties by index ascending.
TileBinning bin_tiles(const std::vector<Gaussian2D>& gaussians, int width, int height,
                      int patch_width, int patch_height);

TileHistogram tile_load_histogram(const TileBinning& binning);

// CSV dump, columns tile_id,count.
std::string binning_csv(const TileBinning& binning, const std::string& config_comment);

}  // namespace splatsim
