#include "splatsim/blend.hpp"

#include <cmath>
#include <stdexcept>

namespace splatsim {

AlphaEval eval_alpha(const Gaussian2D& g, float px, float py) {
  const float dx = px - g.xy.x();
  const float dy = py - g.xy.y();
  const float power = -0.5f * (g.conic_a * dx * dx + g.conic_c * dy * dy) - g.conic_b * dx * dy;
  const float alpha = std::min(kAlphaClamp, g.opacity * std::exp(power));
  return {power, alpha};
}

PixelResult blend_pixel(std::span<const BlendStep> steps, const Eigen::Vector3f& background) {
  PixelState s;
  PixelResult r;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const BlendStep& step = steps[i];
    if (step.alpha < kAlphaSkip) continue;
    const float tmp_t = s.t * (1.0f - step.alpha);
    if (tmp_t < kStopThreshold) {
      r.term_index = static_cast<int>(i) + 1;
      break;
    }
    const double w = static_cast<double>(step.alpha) * static_cast<double>(s.t);
    s.color[0] += step.color[0] * w;
    s.color[1] += step.color[1] * w;
    s.color[2] += step.color[2] * w;
    s.weight += w;
    s.depth += step.depth * w;
    s.t = tmp_t;
    ++r.contrib_count;
  }
  r.final_t = s.t;
  r.out_alpha = 1.0f - s.t;
  r.out_depth = static_cast<float>(s.depth);
  for (int c = 0; c < 3; ++c)
    r.color[c] = static_cast<float>(s.color[c] + static_cast<double>(background[c]) * s.t);
  return r;
}

std::optional<int> termination_index(std::span<const BlendStep> steps) {
  float t = 1.0f;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].alpha < kAlphaSkip) continue;
    const float tmp_t = t * (1.0f - steps[i].alpha);
    if (tmp_t < kStopThreshold) return static_cast<int>(i) + 1;
    t = tmp_t;
  }
  return std::nullopt;
}

RenderOutput render_reference(const TileBinning& binning, const std::vector<Gaussian2D>& gaussians,
                              int width, int height, int patch_width, int patch_height,
                              const Eigen::Vector3f& background) {
  const int cols = (width + patch_width - 1) / patch_width;
  const int rows = (height + patch_height - 1) / patch_height;
  if (cols != binning.tile_cols || rows != binning.tile_rows)
    throw std::invalid_argument("render_reference: binning grid does not match image dims");

  RenderOutput out;
  out.width = width;
  out.height = height;
  out.color.assign(out.pixels() * 3, 0.0f);
  out.alpha.assign(out.pixels(), 0.0f);
  out.depth.assign(out.pixels(), 0.0f);
  out.final_t.assign(out.pixels(), 1.0f);
  out.contrib.assign(out.pixels(), 0);
  out.term.assign(out.pixels(), 0);

  std::vector<BlendStep> steps;
  for (int t = 0; t < binning.tile_count(); ++t) {
    const auto [start, end] = binning.tile_ranges[t];
    const int tx = t % cols, ty = t / cols;
    const int x0 = tx * patch_width, y0 = ty * patch_height;
    const int x1 = std::min(width, x0 + patch_width);
    const int y1 = std::min(height, y0 + patch_height);
    for (int py = y0; py < y1; ++py) {
      for (int px = x0; px < x1; ++px) {
        const float sx = px + 0.5f, sy = py + 0.5f;
        steps.clear();
        steps.reserve(end - start);
        for (std::uint32_t k = start; k < end; ++k) {
          const Gaussian2D& g = gaussians[binning.point_list[k]];
          const AlphaEval e = eval_alpha(g, sx, sy);
          // The power > 0 arm of the skip rule; unreachable for PD conics but
          // kept in the predicate.
          const float alpha = e.power > 0.0f ? 0.0f : e.alpha;
          steps.push_back({alpha, {g.color.x(), g.color.y(), g.color.z()}, g.depth});
        }
        const PixelResult r = blend_pixel(steps, background);
        const std::size_t p = static_cast<std::size_t>(py) * width + px;
        out.color[p * 3 + 0] = r.color[0];
        out.color[p * 3 + 1] = r.color[1];
        out.color[p * 3 + 2] = r.color[2];
        out.alpha[p] = r.out_alpha;
        out.depth[p] = r.out_depth;
        out.final_t[p] = r.final_t;
        out.contrib[p] = r.contrib_count;
        out.term[p] = r.term_index.value_or(0);
      }
    }
  }
  return out;
}

}  // namespace splatsim
