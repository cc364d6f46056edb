#include "splatsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splatsim {

std::string_view variant_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::Naive: return "Naive";
    case KernelVariant::DynamicBlocks: return "DynamicBlocks";
    case KernelVariant::GaussianWise: return "GaussianWise";
    case KernelVariant::FineGrainedCombined: return "FineGrainedCombined";
    case KernelVariant::SharedMemOpt: return "SharedMemOpt";
  }
  return "?";
}

std::optional<KernelVariant> variant_from_name(std::string_view name) {
  for (KernelVariant v : kAllVariants)
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

std::int64_t warp_steps_pixelwise(const std::vector<std::optional<std::int64_t>>& term_indices,
                                  std::int64_t list_len) {
  std::int64_t steps = 0;
  for (const auto& t : term_indices) steps = std::max(steps, t.value_or(list_len));
  return steps;
}

std::int64_t warp_steps_gaussianwise(std::optional<std::int64_t> term_index,
                                     std::int64_t list_len) {
  const std::int64_t consumed = term_index.value_or(list_len);
  return (consumed + kWarpLanes - 1) / kWarpLanes;
}

namespace {

bool pixelwise(KernelVariant v) {
  return v == KernelVariant::Naive || v == KernelVariant::DynamicBlocks ||
         v == KernelVariant::SharedMemOpt;
}

std::int64_t chunk_count(std::int64_t list_len) {
  return (list_len + kBlockThreads - 1) / kBlockThreads;
}

// Gaussian-wise execution of one pixel: 32 list entries per warp round, the
// running transmittance carried through the doubling prefix product, and the
// lane-31 value broadcast into the next round. The committed t sequence is
// tracked with the same serial float recurrence the reference uses, so the
// skip/stop decisions (and final_t) agree with it bit for bit while the
// accumulated color goes through the reassociated prefix weights.
PixelResult blend_pixel_gaussianwise(std::span<const BlendStep> steps,
                                     const Eigen::Vector3f& background) {
  PixelState s;
  PixelResult r;
  const std::size_t n = steps.size();
  for (std::size_t base = 0; base < n && !r.term_index; base += kWarpLanes) {
    const std::size_t count = std::min<std::size_t>(kWarpLanes, n - base);
    std::array<float, kWarpLanes> factors;
    std::array<bool, kWarpLanes> skip;
    for (std::size_t lane = 0; lane < kWarpLanes; ++lane) {
      const bool active = lane < count;
      skip[lane] = !active || steps[base + lane].alpha < kAlphaSkip;
      factors[lane] = skip[lane] ? 1.0f : 1.0f - steps[base + lane].alpha;
    }

    const WarpPrefix<float> prefix = warp_prefix_product<float>(factors, s.t);

    float serial_t = s.t;
    std::size_t commit_end = count;
    for (std::size_t lane = 0; lane < count; ++lane) {
      if (skip[lane]) continue;
      const float tmp_t = serial_t * factors[lane];
      if (tmp_t < kStopThreshold) {
        r.term_index = static_cast<int>(base + lane) + 1;
        commit_end = lane;
        break;
      }
      serial_t = tmp_t;
    }

    for (std::size_t lane = 0; lane < commit_end; ++lane) {
      if (skip[lane]) continue;
      const float t_before = lane == 0 ? s.t : prefix.per_lane[lane - 1];
      const BlendStep& step = steps[base + lane];
      const double w = static_cast<double>(step.alpha) * static_cast<double>(t_before);
      s.color[0] += step.color[0] * w;
      s.color[1] += step.color[1] * w;
      s.color[2] += step.color[2] * w;
      s.weight += w;
      s.depth += step.depth * w;
      ++r.contrib_count;
    }
    s.t = serial_t;
  }
  r.final_t = s.t;
  r.out_alpha = 1.0f - s.t;
  r.out_depth = static_cast<float>(s.depth);
  for (int c = 0; c < 3; ++c)
    r.color[c] = static_cast<float>(s.color[c] + static_cast<double>(background[c]) * s.t);
  return r;
}

RenderOutput render_gaussianwise(const TileBinning& binning,
                                 const std::vector<Gaussian2D>& gaussians, int width, int height,
                                 int patch_width, int patch_height,
                                 const Eigen::Vector3f& background) {
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
    const int tx = t % binning.tile_cols, ty = t / binning.tile_cols;
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
          const float alpha = e.power > 0.0f ? 0.0f : e.alpha;
          steps.push_back({alpha, {g.color.x(), g.color.y(), g.color.z()}, g.depth});
        }
        const PixelResult r = blend_pixel_gaussianwise(steps, background);
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

}  // namespace

std::vector<TaskSpec> make_task_specs(KernelVariant variant, int width, int height,
                                      int patch_width, int patch_height) {
  const int cols = (width + patch_width - 1) / patch_width;
  const int rows = (height + patch_height - 1) / patch_height;
  const int patch_capacity = patch_width * patch_height;
  std::vector<TaskSpec> tasks;

  auto pixel_at = [&](int tile, int local) -> std::optional<Eigen::Vector2i> {
    const int tx = tile % cols, ty = tile / cols;
    const int px = tx * patch_width + local % patch_width;
    const int py = ty * patch_height + local / patch_width;
    if (px >= width || py >= height) return std::nullopt;
    return Eigen::Vector2i{px, py};
  };

  if (variant == KernelVariant::FineGrainedCombined) {
    const int subtasks = (patch_capacity + kFinePixelsPerTask - 1) / kFinePixelsPerTask;
    tasks.reserve(static_cast<std::size_t>(cols) * rows * subtasks);
    for (int tile = 0; tile < cols * rows; ++tile) {
      for (int s = 0; s < subtasks; ++s) {
        TaskSpec task;
        task.task_id = tile * subtasks + s;
        task.tile_id = tile;
        for (int w = 0; w < kWarpsPerTask; ++w) {
          const int local = s * kFinePixelsPerTask + w;
          if (local >= patch_capacity) continue;
          if (auto p = pixel_at(tile, local)) task.warp_pixels[w].push_back(*p);
        }
        tasks.push_back(std::move(task));
      }
    }
  } else {
    tasks.reserve(static_cast<std::size_t>(cols) * rows);
    for (int tile = 0; tile < cols * rows; ++tile) {
      TaskSpec task;
      task.task_id = tile;
      task.tile_id = tile;
      for (int local = 0; local < patch_capacity; ++local) {
        // Warp w owns local slots [32w, 32w+32), wrapping for patches larger
        // than one block.
        const int w = (local / kWarpLanes) % kWarpsPerTask;
        if (auto p = pixel_at(tile, local)) task.warp_pixels[w].push_back(*p);
      }
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

WorkTrace trace_from_work(KernelVariant variant, const std::vector<TileWork>& tiles) {
  WorkTrace trace;
  trace.variant = variant;
  const bool pw = pixelwise(variant);
  const bool fine = variant == KernelVariant::FineGrainedCombined;

  auto groups_of = [](std::int32_t consumed) -> std::int64_t {
    return (static_cast<std::int64_t>(consumed) + kWarpLanes - 1) / kWarpLanes;
  };

  std::int32_t task_id = 0;
  for (std::size_t tile = 0; tile < tiles.size(); ++tile) {
    const TileWork& work = tiles[tile];
    const int capacity = static_cast<int>(work.consumed.size());
    const std::int64_t chunks = chunk_count(work.list_len);

    if (fine) {
      const int subtasks = (capacity + kFinePixelsPerTask - 1) / kFinePixelsPerTask;
      for (int s = 0; s < subtasks; ++s) {
        TaskTrace t;
        t.task_id = task_id++;
        t.tile_id = static_cast<std::int32_t>(tile);
        t.shared_chunks = chunks;
        for (int w = 0; w < kWarpsPerTask; ++w) {
          const int local = s * kFinePixelsPerTask + w;
          if (local >= capacity || work.consumed[local] < 0) continue;
          const std::int64_t g = groups_of(work.consumed[local]);
          t.warps[w].compute_steps = g;
          t.warps[w].prefix_groups = g;
          t.warps[w].reduce_ops = 1;
          t.warps[w].writeback_ops = 1;
        }
        trace.tasks.push_back(std::move(t));
      }
    } else {
      TaskTrace t;
      t.task_id = task_id++;
      t.tile_id = static_cast<std::int32_t>(tile);
      t.shared_chunks = chunks;
      for (int local = 0; local < capacity; ++local) {
        if (work.consumed[local] < 0) continue;
        const int w = (local / kWarpLanes) % kWarpsPerTask;
        if (pw) {
          t.warps[w].compute_steps =
              std::max<std::int64_t>(t.warps[w].compute_steps, work.consumed[local]);
          t.warps[w].writeback_ops = 1;
        } else {
          const std::int64_t g = groups_of(work.consumed[local]);
          t.warps[w].compute_steps += g;
          t.warps[w].prefix_groups += g;
          t.warps[w].reduce_ops += 1;
          t.warps[w].writeback_ops += 1;
        }
      }
      trace.tasks.push_back(std::move(t));
    }
  }
  return trace;
}

KernelRun run_kernel(KernelVariant variant, const TileBinning& binning,
                     const std::vector<Gaussian2D>& gaussians, int width, int height,
                     int patch_width, int patch_height, const Eigen::Vector3f& background) {
  const int cols = (width + patch_width - 1) / patch_width;
  const int rows = (height + patch_height - 1) / patch_height;
  if (cols != binning.tile_cols || rows != binning.tile_rows)
    throw std::invalid_argument("run_kernel: binning grid does not match image dims");

  KernelRun run;
  run.output = pixelwise(variant)
                   ? render_reference(binning, gaussians, width, height, patch_width,
                                      patch_height, background)
                   : render_gaussianwise(binning, gaussians, width, height, patch_width,
                                         patch_height, background);

  const int patch_capacity = patch_width * patch_height;
  std::vector<TileWork> tiles(binning.tile_count());
  for (int t = 0; t < binning.tile_count(); ++t) {
    TileWork& work = tiles[t];
    work.list_len = binning.tile_size(t);
    work.consumed.assign(patch_capacity, -1);
    const int tx = t % cols, ty = t / cols;
    for (int local = 0; local < patch_capacity; ++local) {
      const int px = tx * patch_width + local % patch_width;
      const int py = ty * patch_height + local / patch_width;
      if (px >= width || py >= height) continue;
      const std::size_t p = static_cast<std::size_t>(py) * width + px;
      const std::int32_t term = run.output.term[p];
      work.consumed[local] = term > 0 ? term : work.list_len;
    }
  }
  run.trace = trace_from_work(variant, tiles);
  return run;
}

std::string trace_csv(const WorkTrace& trace, const std::string& config_comment) {
  std::ostringstream out;
  out << "# " << config_comment << "\n";
  out << "task_id,tile_id,warp_id,compute_steps,chunks,prefix_groups,reduce_ops,writeback_ops\n";
  for (const TaskTrace& t : trace.tasks)
    for (int w = 0; w < kWarpsPerTask; ++w)
      out << t.task_id << ',' << t.tile_id << ',' << w << ',' << t.warps[w].compute_steps << ','
          << t.shared_chunks << ',' << t.warps[w].prefix_groups << ',' << t.warps[w].reduce_ops
          << ',' << t.warps[w].writeback_ops << "\n";
  return out.str();
}

}  // namespace splatsim
