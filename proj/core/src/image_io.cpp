#include "splatsim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splatsim {
namespace {

std::ofstream open_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void write_ppm(const RenderOutput& render, const std::filesystem::path& path) {
  std::ofstream out = open_binary(path);
  out << "P6\n" << render.width << ' ' << render.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(render.width) * 3);
  for (int y = 0; y < render.height; ++y) {
    for (int x = 0; x < render.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = render.color[(static_cast<std::size_t>(y) * render.width + x) * 3 + c];
        const float clamped = std::clamp(v, 0.0f, 1.0f);
        row[static_cast<std::size_t>(x) * 3 + c] =
            static_cast<unsigned char>(std::lround(clamped * 255.0f));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_float_grid(const std::vector<float>& grid, int width, int height,
                      const std::filesystem::path& path) {
  if (grid.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("write_float_grid: size mismatch");
  std::ofstream out = open_binary(path);
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(grid.data()),
            static_cast<std::streamsize>(grid.size() * sizeof(float)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string render_digest_csv(const RenderOutput& out, const std::string& config_comment) {
  std::ostringstream csv;
  csv.precision(17);
  csv << "# " << config_comment << "\n";
  csv << "plane,min,max,mean\n";
  auto digest = [&](const char* name, auto get, std::size_t n) {
    double lo = n ? 1e300 : 0.0, hi = n ? -1e300 : 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = get(i);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    csv << name << ',' << lo << ',' << hi << ',' << (n ? sum / n : 0.0) << "\n";
  };
  const std::size_t px = out.pixels();
  digest("r", [&](std::size_t i) { return out.color[i * 3 + 0]; }, px);
  digest("g", [&](std::size_t i) { return out.color[i * 3 + 1]; }, px);
  digest("b", [&](std::size_t i) { return out.color[i * 3 + 2]; }, px);
  digest("alpha", [&](std::size_t i) { return out.alpha[i]; }, px);
  digest("depth", [&](std::size_t i) { return out.depth[i]; }, px);
  return csv.str();
}

Deviation compare_outputs(const RenderOutput& reference, const RenderOutput& candidate) {
  if (reference.width != candidate.width || reference.height != candidate.height)
    throw std::invalid_argument("compare_outputs: dimension mismatch");
  Deviation d;
  auto scan = [&](const std::vector<float>& a, const std::vector<float>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double abs_err = std::abs(static_cast<double>(a[i]) - b[i]);
      d.max_abs = std::max(d.max_abs, abs_err);
      d.max_rel = std::max(d.max_rel, abs_err / std::max(1.0, std::abs(static_cast<double>(a[i]))));
    }
  };
  scan(reference.color, candidate.color);
  scan(reference.alpha, candidate.alpha);
  scan(reference.depth, candidate.depth);
  d.contrib_equal = reference.contrib == candidate.contrib && reference.term == candidate.term;
  return d;
}

}  // namespace splatsim
