#pragma once

#include "splatsim/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace splatsim {

// SIMT machine abstraction: a pool of block slots. Defaults model one A100:
// 108 SMs x 16 resident blocks of 4 warps.
struct MachineConfig {
  int num_sms = 108;
  int block_slots_per_sm = 16;
  int warps_per_block = 4;
  int warp_size = 32;

  int total_slots() const { return num_sms * block_slots_per_sm; }
};

// Cycle constants charged against trace counters.
struct CostModel {
  double compute_step = 1.0;
  double shared_chunk_load = 32.0;
  double shared_chunk_load_opt = 8.0;  // per-chunk cost when features/depths are staged too
  double prefix_group_overhead = 5.0;
  double warp_reduce = 5.0;
  double pool_fetch = 20.0;
  double writeback = 4.0;
  double global_feature_read = 0.5;  // per compute step unless SharedMemOpt
};

enum class Dispatch { Static, Dynamic };

// Static launch for Naive/GaussianWise/SharedMemOpt, persistent task pool for
// DynamicBlocks/FineGrainedCombined.
Dispatch dispatch_for(KernelVariant v);

struct TaskDuration {
  double block_cycles = 0.0;
  std::array<double, kWarpsPerTask> warp_busy = {0, 0, 0, 0};

  double warp_busy_total() const {
    return warp_busy[0] + warp_busy[1] + warp_busy[2] + warp_busy[3];
  }
};

// Per-warp busy = steps*(compute + feature term) + prefix + reduce + writeback;
// block = max warp + chunk loads + pool fetch under dynamic dispatch.
TaskDuration task_duration(const TaskTrace& task, KernelVariant variant, const CostModel& cost,
                           Dispatch dispatch);

struct ScheduledTask {
  std::int32_t task_id = 0;
  double start = 0.0;
  double end = 0.0;
  std::int32_t sm = 0;
  std::int32_t slot = 0;
};

struct SimTimeline {
  std::vector<ScheduledTask> tasks;  // in task order
  double makespan = 0.0;
  std::vector<double> sm_busy;  // per SM
  double warp_busy_total = 0.0;
};

// Round-robin launch: task i runs on slot (i mod slots), each slot serial in
// index order.
SimTimeline schedule_static(const std::vector<TaskDuration>& durations,
                            const MachineConfig& machine);

// Greedy pool: slots take tasks 0..slots-1, then each finishing slot fetches
// the next task in index order (ties broken by lowest slot id).
SimTimeline schedule_dynamic(const std::vector<TaskDuration>& durations,
                             const MachineConfig& machine);

struct SimMetrics {
  KernelVariant variant = KernelVariant::Naive;
  Dispatch dispatch = Dispatch::Static;
  std::size_t tasks = 0;
  double makespan = 0.0;
  double achieved_occupancy = 0.0;  // warp busy cycles / (warp slots * makespan)
  double idle_fraction = 1.0;
  double waves = 0.0;  // tasks / total block slots
};

SimMetrics simulate(KernelVariant variant, const WorkTrace& trace, const MachineConfig& machine,
                    const CostModel& cost);

// Same result with the full timeline retained (for dumps and tests).
struct SimRun {
  SimMetrics metrics;
  SimTimeline timeline;
};
SimRun simulate_full(KernelVariant variant, const WorkTrace& trace, const MachineConfig& machine,
                     const CostModel& cost);

std::string metrics_csv_header();
std::string metrics_csv_row(const SimMetrics& m);
std::string timeline_csv(const SimTimeline& timeline, const std::string& config_comment);

}  // namespace splatsim
