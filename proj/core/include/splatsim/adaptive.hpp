#pragma once

#include "splatsim/machine.hpp"
#include "splatsim/workload.hpp"

#include <optional>
#include <string>
#include <vector>

namespace splatsim {

// Selection policy: start on the combined load-balancing kernel, benchmark it
// against the shared-memory-optimized baseline every check_interval
// iterations, and switch to the baseline permanently at the first loss.
struct SelectionState {
  KernelVariant current = KernelVariant::FineGrainedCombined;
  bool switched = false;
  int check_interval = 1000;

  struct Checkpoint {
    int iter = 0;
    double t_balanced = 0.0;
    double t_baseline = 0.0;
  };
  std::vector<Checkpoint> history;
};

struct IterationRecord {
  int iter = 0;
  KernelVariant variant = KernelVariant::FineGrainedCombined;
  double cycles = 0.0;
  bool is_checkpoint = false;
  double t_balanced = 0.0;  // meaningful on checkpoint rows only
  double t_baseline = 0.0;
};

struct TrainingSimReport {
  std::vector<IterationRecord> iterations;
  std::optional<int> inflection_iter;
  double adaptive_cycles = 0.0;       // chosen-variant cycles + benchmark overhead
  double benchmark_overhead = 0.0;    // both-kernel runs at checkpoints
  double always_balanced_cycles = 0.0;
  double always_baseline_cycles = 0.0;
};

struct SpeedupSummary {
  std::optional<double> pre_inflection;   // baseline / chosen, before the switch
  std::optional<double> post_inflection;  // absent when no inflection
  double overall = 1.0;
};

// Runs both kernels on the current loads and flips the switch if the
// balanced kernel lost. Caller must not invoke after the switch.
SelectionState checkpoint(SelectionState state, int iter, const SyntheticLoads& loads,
                          const MachineConfig& machine, const CostModel& cost);

TrainingSimReport run_training_sim(const TrajectoryParams& tp, int check_interval,
                                   const MachineConfig& machine, const CostModel& cost);

// Phase speedups versus the always-baseline policy, computed on chosen-variant
// cycles (checkpoint benchmark overhead is reported separately in the
// aggregates).
SpeedupSummary speedup_summary(const TrainingSimReport& report);

std::string report_csv(const TrainingSimReport& report, const std::string& config_comment);

}  // namespace splatsim
