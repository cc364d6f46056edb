#include "splatsim/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace splatsim {

Eigen::Matrix2d project_covariance(const Eigen::Matrix<double, 2, 3>& jacobian,
                                   const Eigen::Matrix3d& view_rot,
                                   const Eigen::Matrix3d& cov3d) {
  Eigen::Matrix<double, 2, 3> t = jacobian * view_rot;
  return t * cov3d * t.transpose();
}

std::optional<Gaussian2D> project_gaussian(const Gaussian3D& g, const Camera& cam) {
  const Eigen::Matrix3f rot = cam.view_transform.topLeftCorner<3, 3>();
  const Eigen::Vector3f trans = cam.view_transform.topRightCorner<3, 1>();
  const Eigen::Vector3f p_cam = rot * g.mean + trans;
  if (!(p_cam.z() > kNearPlane)) return std::nullopt;

  const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
  const double fx = cam.focal.x(), fy = cam.focal.y();

  // Affine approximation of the perspective projection at the splat center.
  Eigen::Matrix<double, 2, 3> jac;
  jac << fx / z, 0.0, -fx * x / (z * z),
         0.0, fy / z, -fy * y / (z * z);

  Eigen::Matrix2d cov2 =
      project_covariance(jac, rot.cast<double>(), covariance_of(g).cast<double>());

  const double det = cov2(0, 0) * cov2(1, 1) - cov2(0, 1) * cov2(1, 0);
  if (!(det > 0.0) || !std::isfinite(det)) return std::nullopt;

  const double mid = 0.5 * (cov2(0, 0) + cov2(1, 1));
  const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
  if (!(lambda_max > 0.0)) return std::nullopt;

  Gaussian2D out;
  out.xy = {static_cast<float>(fx * x / z) + 0.5f * cam.width,
            static_cast<float>(fy * y / z) + 0.5f * cam.height};
  out.conic_a = static_cast<float>(cov2(1, 1) / det);
  out.conic_b = static_cast<float>(-cov2(0, 1) / det);
  out.conic_c = static_cast<float>(cov2(0, 0) / det);
  out.opacity = g.opacity;
  out.color = g.color;
  out.depth = static_cast<float>(z);
  out.radius = static_cast<float>(3.0 * std::sqrt(lambda_max));
  if (!std::isfinite(out.conic_a) || !std::isfinite(out.conic_b) || !std::isfinite(out.conic_c) ||
      !std::isfinite(out.radius))
    return std::nullopt;
  return out;
}

std::vector<Gaussian2D> project_all(const std::vector<Gaussian3D>& gaussians, const Camera& cam) {
  std::vector<Gaussian2D> out;
  out.reserve(gaussians.size());
  for (const Gaussian3D& g : gaussians) {
    if (auto p = project_gaussian(g, cam)) out.push_back(*p);
  }
  return out;
}

TileBinning bin_tiles(const std::vector<Gaussian2D>& gaussians, int width, int height,
                      int patch_width, int patch_height) {
  TileBinning b;
  b.tile_cols = (width + patch_width - 1) / patch_width;
  b.tile_rows = (height + patch_height - 1) / patch_height;
  const int tiles = b.tile_count();
  b.tile_ranges.assign(tiles, {0, 0});

  struct Entry {
    std::uint32_t tile;
    float depth;
    std::uint32_t index;
  };
  std::vector<Entry> entries;

  for (std::uint32_t i = 0; i < gaussians.size(); ++i) {
    const Gaussian2D& g = gaussians[i];
    const float r = std::ceil(g.radius);
    const float x0 = g.xy.x() - r, x1 = g.xy.x() + r;
    const float y0 = g.xy.y() - r, y1 = g.xy.y() + r;
    if (x1 < 0.0f || y1 < 0.0f || x0 >= static_cast<float>(width) ||
        y0 >= static_cast<float>(height))
      continue;
    const int tx0 = std::max(0, static_cast<int>(std::floor(x0 / patch_width)));
    const int tx1 = std::min(b.tile_cols - 1, static_cast<int>(std::floor(x1 / patch_width)));
    const int ty0 = std::max(0, static_cast<int>(std::floor(y0 / patch_height)));
    const int ty1 = std::min(b.tile_rows - 1, static_cast<int>(std::floor(y1 / patch_height)));
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        entries.push_back({static_cast<std::uint32_t>(ty * b.tile_cols + tx), g.depth, i});
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& c) {
    if (a.tile != c.tile) return a.tile < c.tile;
    if (a.depth != c.depth) return a.depth < c.depth;
    return a.index < c.index;
  });

  b.point_list.resize(entries.size());
  std::size_t pos = 0;
  for (int t = 0; t < tiles; ++t) {
    const std::size_t start = pos;
    while (pos < entries.size() && entries[pos].tile == static_cast<std::uint32_t>(t)) {
      b.point_list[pos] = entries[pos].index;
      ++pos;
    }
    b.tile_ranges[t] = {static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(pos)};
  }
  return b;
}

TileHistogram tile_load_histogram(const TileBinning& binning) {
  TileHistogram h;
  h.counts.resize(binning.tile_count());
  for (int t = 0; t < binning.tile_count(); ++t)
    h.counts[t] = binning.tile_ranges[t].second - binning.tile_ranges[t].first;
  if (h.counts.empty()) return h;

  std::vector<std::uint32_t> sorted = h.counts;
  std::sort(sorted.begin(), sorted.end());
  h.min = sorted.front();
  h.max = sorted.back();
  h.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  auto rank = [&](double q) {
    std::size_t k = static_cast<std::size_t>(std::ceil(q * sorted.size()));
    return sorted[std::min(sorted.size() - 1, k == 0 ? 0 : k - 1)];
  };
  h.p50 = rank(0.50);
  h.p99 = rank(0.99);
  return h;
}

std::string binning_csv(const TileBinning& binning, const std::string& config_comment) {
  std::ostringstream out;
  out << "# " << config_comment << "\n";
  out << "tile_id,count\n";
  for (int t = 0; t < binning.tile_count(); ++t)
    out << t << ',' << (binning.tile_ranges[t].second - binning.tile_ranges[t].first) << "\n";
  return out.str();
}

}  // namespace splatsim
