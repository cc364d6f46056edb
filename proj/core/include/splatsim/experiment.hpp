#pragma once

#include "splatsim/adaptive.hpp"
#include "splatsim/machine.hpp"
#include "splatsim/workload.hpp"

#include <map>
#include <string>
#include <vector>

namespace splatsim {

// Canonical skew fixture: heavy-tailed tile loads over a full 960x540 / 16x8
// tile grid, with strongly divergent per-pixel termination. Regenerating with
// these params reproduces the frozen digest checked in the tests.
SkewParams skew_fixture_params();

// Canonical uniform fixture for the balanced regime.
SkewParams uniform_fixture_params(std::uint32_t per_tile = 2000);

// Default training trajectory: the skew fixture relaxing toward uniform.
TrajectoryParams default_trajectory();

struct VariantMetrics {
  std::vector<SimMetrics> rows;  // one per requested variant, in request order

  const SimMetrics& of(KernelVariant v) const;
};

VariantMetrics simulate_variants(const std::vector<KernelVariant>& variants,
                                 const std::vector<TileWork>& work, const MachineConfig& machine,
                                 const CostModel& cost);

// Strict makespan ordering Naive > DynamicBlocks > GaussianWise >
// FineGrainedCombined.
bool table_ordering_holds(const VariantMetrics& metrics);

// Cartesian +-pct grid over all cost constants (levels: 1-pct, 1, 1+pct per
// constant). Each point records the four makespans and whether the ordering
// survived.
struct SweepPoint {
  CostModel cost;
  double makespan_naive = 0.0;
  double makespan_dynamic = 0.0;
  double makespan_gaussianwise = 0.0;
  double makespan_fine = 0.0;
  bool ordering_ok = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t breaks = 0;
};

SweepResult run_sweep(const std::vector<TileWork>& work, const MachineConfig& machine,
                      const CostModel& base_cost, double pct, int levels_per_constant = 3);

std::string sweep_csv(const SweepResult& sweep, const std::string& config_comment);

}  // namespace splatsim
