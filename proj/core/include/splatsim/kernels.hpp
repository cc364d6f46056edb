#pragma once

#include "splatsim/blend.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splatsim {

enum class KernelVariant {
  Naive,
  DynamicBlocks,
  GaussianWise,
  FineGrainedCombined,
  SharedMemOpt,
};

inline constexpr std::array<KernelVariant, 5> kAllVariants = {
    KernelVariant::Naive, KernelVariant::DynamicBlocks, KernelVariant::GaussianWise,
    KernelVariant::FineGrainedCombined, KernelVariant::SharedMemOpt};

std::string_view variant_name(KernelVariant v);
std::optional<KernelVariant> variant_from_name(std::string_view name);

// Blocks are 128 threads = 4 warps of 32 lanes. Coarse variants give each
// block one whole tile; the fine-grained variant splits a tile into 32
// four-pixel tasks with warp w pinned to pixel w.
inline constexpr int kBlockThreads = 128;
inline constexpr int kWarpsPerTask = 4;
inline constexpr int kWarpLanes = 32;
inline constexpr int kFinePixelsPerTask = 4;
inline constexpr int kFineTasksPerTile = kBlockThreads / kFinePixelsPerTask;

// One schedulable block task: which tile it serves and which image pixels
// each warp handles.
struct TaskSpec {
  std::int32_t task_id = 0;
  std::int32_t tile_id = 0;
  std::array<std::vector<Eigen::Vector2i>, kWarpsPerTask> warp_pixels;

  std::size_t pixel_count() const {
    std::size_t n = 0;
    for (const auto& w : warp_pixels) n += w.size();
    return n;
  }
};

std::vector<TaskSpec> make_task_specs(KernelVariant variant, int width, int height,
                                      int patch_width, int patch_height);

// Work counters emitted per warp; pure functions of the binning and variant,
// no cost constants baked in.
struct WarpCounts {
  std::int64_t compute_steps = 0;
  std::int64_t prefix_groups = 0;
  std::int32_t reduce_ops = 0;
  std::int32_t writeback_ops = 0;
};

struct TaskTrace {
  std::int32_t task_id = 0;
  std::int32_t tile_id = 0;
  std::int64_t shared_chunks = 0;  // cooperative 128-wide load rounds
  std::array<WarpCounts, kWarpsPerTask> warps;
};

struct WorkTrace {
  KernelVariant variant = KernelVariant::Naive;
  std::vector<TaskTrace> tasks;
};

// Per-tile work summary: list length plus, for each local pixel slot of the
// patch, the number of list steps that pixel consumes (termination index, or
// the full length when it never stops; -1 marks slots outside the image).
struct TileWork {
  std::int32_t list_len = 0;
  std::vector<std::int32_t> consumed;
};

// Lockstep step count of a pixel-wise warp: lanes run until the slowest one
// finishes, so the cost is the max consumed steps over the 32 lanes.
std::int64_t warp_steps_pixelwise(const std::vector<std::optional<std::int64_t>>& term_indices,
                                  std::int64_t list_len);

// 32-wide gaussian groups consumed by one pixel: the warp halts after the
// group containing the termination index.
std::int64_t warp_steps_gaussianwise(std::optional<std::int64_t> term_index,
                                     std::int64_t list_len);

WorkTrace trace_from_work(KernelVariant variant, const std::vector<TileWork>& tiles);

// Renders with the given variant's execution model and reports its work
// trace. Pixel-wise variants reproduce the reference output bit for bit; the
// gaussian-wise variants reproduce every skip/stop decision exactly and the
// blended values to float accuracy.
struct KernelRun {
  RenderOutput output;
  WorkTrace trace;
};

KernelRun run_kernel(KernelVariant variant, const TileBinning& binning,
                     const std::vector<Gaussian2D>& gaussians, int width, int height,
                     int patch_width, int patch_height, const Eigen::Vector3f& background);

std::string trace_csv(const WorkTrace& trace, const std::string& config_comment);

}  // namespace splatsim
