#pragma once

#include "splatsim/kernels.hpp"
#include "splatsim/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace splatsim {

enum class SkewDistribution { Pareto, Lognormal, Uniform };

std::string_view distribution_name(SkewDistribution d);
std::optional<SkewDistribution> distribution_from_name(std::string_view name);

// Per-pixel termination model. A pixel's consumed fraction of its tile list
// is (1 - spread) * mean + spread * u^k with k = 1/mean - 1, so the expected
// fraction stays `mean` while `spread` moves the population from all-equal
// (0) to a heavy-tailed mix of early stops and full runs (1).
struct TermModel {
  double mean = 0.02;
  double spread = 1.0;
};

struct SkewParams {
  SkewDistribution distribution = SkewDistribution::Pareto;
  double shape = 1.1;
  double scale = 260.0;
  std::uint32_t max_cap = 100000;
  int tiles = 4080;
  std::uint64_t seed = 42;
  TermModel term;
};

struct TileLoad {
  std::uint32_t count = 0;
  std::uint32_t term_profile = 0;  // stream id for the per-pixel term draws
};

struct SyntheticLoads {
  SkewParams params;
  std::vector<TileLoad> tiles;
};

// Deterministic per-tile counts plus termination profiles; counts are capped
// at params.max_cap. Same params give bit-identical output.
SyntheticLoads gen_tile_loads(const SkewParams& params);

// Consumed steps for the 128 pixel slots of one tile, derived from its term
// profile. Pure function of (params, profile, count).
std::vector<std::int32_t> tile_pixel_steps(const SkewParams& params, std::uint32_t term_profile,
                                           std::uint32_t count);

// Expands loads into the per-tile work summaries the tracer consumes.
std::vector<TileWork> loads_to_work(const SyntheticLoads& loads);

TileHistogram loads_histogram(const SyntheticLoads& loads);

std::string loads_csv(const SyntheticLoads& loads);
SyntheticLoads parse_loads_csv(const std::string& text);
SyntheticLoads load_loads(const std::filesystem::path& path);
void save_loads(const SyntheticLoads& loads, const std::filesystem::path& path);

// Random scene with most Gaussians packed into a few clusters, so the tile
// binning comes out heavily skewed.
struct ClusterSceneParams {
  int n_gaussians = 2000;
  int n_clusters = 4;
  std::uint64_t seed = 42;
  double cluster_sigma = 0.035;   // world units per unit depth
  double background_fraction = 0.12;  // spread uniformly over the frame
};

std::vector<Gaussian3D> gen_clustered_scene(const ClusterSceneParams& params, const Camera& cam);

// Training-time evolution: one fixed population of tile draws whose cap,
// termination mean and spread drift monotonically from `start` to `end`.
// Shrinking the cap only ever lowers counts, so p99 is non-increasing by
// construction.
struct TrajectoryParams {
  int total_iters = 7000;
  SkewParams start;
  std::uint32_t cap_end = 500;
  TermModel term_end = {0.5, 0.0};
};

SkewParams trajectory_params_at(const TrajectoryParams& tp, int iter);
SyntheticLoads trajectory_loads(const TrajectoryParams& tp, int iter);

}  // namespace splatsim
