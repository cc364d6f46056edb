#pragma once

#include "splatsim/blend.hpp"

#include <filesystem>
#include <string>

namespace splatsim {

// Binary P6, 8-bit, channels clamped to [0,1] and rounded.
void write_ppm(const RenderOutput& out, const std::filesystem::path& path);

// Raw little-endian float32 grid, row-major.
void write_float_grid(const std::vector<float>& grid, int width, int height,
                      const std::filesystem::path& path);

// Per-channel min/max/mean digest of one frame.
std::string render_digest_csv(const RenderOutput& out, const std::string& config_comment);

// Max deviation between a variant frame and the reference, per plane.
struct Deviation {
  double max_abs = 0.0;
  double max_rel = 0.0;  // |a-b| / max(1, |ref|)
  bool contrib_equal = true;
};

Deviation compare_outputs(const RenderOutput& reference, const RenderOutput& candidate);

}  // namespace splatsim
