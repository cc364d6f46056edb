#pragma once

#include "splatsim/preprocess.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace splatsim {

inline constexpr float kAlphaClamp = 0.99f;
inline constexpr float kAlphaSkip = 1.0f / 255.0f;
inline constexpr float kStopThreshold = 1e-4f;

// One depth-ordered candidate at a pixel.
struct BlendStep {
  float alpha = 0.0f;  // production path clamps to [0, 0.99]
  std::array<float, 3> color = {0, 0, 0};
  float depth = 0.0f;
};

// Blending state. Transmittance stays in float (it drives the skip/stop
// decisions and must match across every kernel variant bit for bit); the
// color/weight/depth accumulators run in double.
struct PixelState {
  std::array<double, 3> color = {0, 0, 0};
  double weight = 0.0;
  double depth = 0.0;
  float t = 1.0f;
};

struct PixelResult {
  std::array<float, 3> color = {0, 0, 0};
  float out_alpha = 0.0f;
  float out_depth = 0.0f;
  float final_t = 1.0f;
  int contrib_count = 0;
  std::optional<int> term_index;  // 1-based step that tripped the stop rule
};

struct AlphaEval {
  float power;
  float alpha;
};

// power = -1/2 d^T conic d with d = pixel - center; alpha = min(0.99, opacity * exp(power)).
AlphaEval eval_alpha(const Gaussian2D& g, float px, float py);

// Front-to-back blending with the skip rule (alpha < 1/255) and the early
// stop rule (t * (1 - alpha) < 1e-4, which commits nothing for the
// terminating step). Finalize adds background * final_t.
PixelResult blend_pixel(std::span<const BlendStep> steps, const Eigen::Vector3f& background);

// Index (1-based) of the first non-skipped step whose tentative transmittance
// falls below the stop threshold; nullopt if blending runs the whole list.
std::optional<int> termination_index(std::span<const BlendStep> steps);

template <typename T>
struct WarpPrefix {
  std::array<T, 32> per_lane;  // per_lane[k] = t_in * prod_{j<=k} factors[j]
  T t_out;                     // per_lane[31]
};

// Inclusive prefix product across 32 lanes via the shuffle-up doubling scheme
// (offsets 1,2,4,8,16): each round, lane k >= offset multiplies in the value
// lane k-offset held before the round.
template <typename T>
WarpPrefix<T> warp_prefix_product(const std::array<T, 32>& factors, T t_in) {
  std::array<T, 32> acc = factors;
  for (int offset = 1; offset < 32; offset *= 2) {
    std::array<T, 32> shifted;
    for (int lane = 0; lane < 32; ++lane)
      shifted[lane] = lane >= offset ? acc[lane - offset] : T(1);
    for (int lane = 0; lane < 32; ++lane)
      if (lane >= offset) acc[lane] *= shifted[lane];
  }
  WarpPrefix<T> out;
  for (int lane = 0; lane < 32; ++lane) out.per_lane[lane] = t_in * acc[lane];
  out.t_out = out.per_lane[31];
  return out;
}

// Per-pixel output planes of one rendered frame.
struct RenderOutput {
  int width = 0;
  int height = 0;
  std::vector<float> color;    // 3 * width * height, rgb interleaved
  std::vector<float> alpha;    // width * height
  std::vector<float> depth;    // width * height
  std::vector<float> final_t;  // width * height
  std::vector<std::int32_t> contrib;  // committed steps per pixel
  std::vector<std::int32_t> term;     // 1-based termination index, 0 = none

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
};

// Sequential ground truth: every pixel of every tile blended in list order.
RenderOutput render_reference(const TileBinning& binning, const std::vector<Gaussian2D>& gaussians,
                              int width, int height, int patch_width, int patch_height,
                              const Eigen::Vector3f& background);

}  // namespace splatsim
