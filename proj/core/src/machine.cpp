#include "splatsim/machine.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace splatsim {

Dispatch dispatch_for(KernelVariant v) {
  switch (v) {
    case KernelVariant::DynamicBlocks:
    case KernelVariant::FineGrainedCombined:
      return Dispatch::Dynamic;
    default:
      return Dispatch::Static;
  }
}

TaskDuration task_duration(const TaskTrace& task, KernelVariant variant, const CostModel& cost,
                           Dispatch dispatch) {
  const double feature = variant == KernelVariant::SharedMemOpt ? 0.0 : cost.global_feature_read;
  const double chunk =
      variant == KernelVariant::SharedMemOpt ? cost.shared_chunk_load_opt : cost.shared_chunk_load;

  TaskDuration d;
  double warp_max = 0.0;
  for (int w = 0; w < kWarpsPerTask; ++w) {
    const WarpCounts& c = task.warps[w];
    const double busy = static_cast<double>(c.compute_steps) * (cost.compute_step + feature) +
                        static_cast<double>(c.prefix_groups) * cost.prefix_group_overhead +
                        static_cast<double>(c.reduce_ops) * cost.warp_reduce +
                        static_cast<double>(c.writeback_ops) * cost.writeback;
    d.warp_busy[w] = busy;
    warp_max = std::max(warp_max, busy);
  }
  d.block_cycles = warp_max + static_cast<double>(task.shared_chunks) * chunk +
                   (dispatch == Dispatch::Dynamic ? cost.pool_fetch : 0.0);
  return d;
}

namespace {

SimTimeline finalize(std::vector<ScheduledTask> tasks, const MachineConfig& machine) {
  SimTimeline tl;
  tl.sm_busy.assign(machine.num_sms, 0.0);
  tl.tasks = std::move(tasks);
  for (const ScheduledTask& t : tl.tasks) {
    tl.makespan = std::max(tl.makespan, t.end);
    tl.sm_busy[t.sm] += t.end - t.start;
  }
  return tl;
}

}  // namespace

SimTimeline schedule_static(const std::vector<TaskDuration>& durations,
                            const MachineConfig& machine) {
  const int slots = machine.total_slots();
  std::vector<double> slot_time(slots, 0.0);
  std::vector<ScheduledTask> tasks(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const int slot = static_cast<int>(i % slots);
    ScheduledTask& t = tasks[i];
    t.task_id = static_cast<std::int32_t>(i);
    t.slot = slot;
    t.sm = slot / machine.block_slots_per_sm;
    t.start = slot_time[slot];
    t.end = t.start + durations[i].block_cycles;
    slot_time[slot] = t.end;
  }
  SimTimeline tl = finalize(std::move(tasks), machine);
  for (const TaskDuration& d : durations) tl.warp_busy_total += d.warp_busy_total();
  return tl;
}

SimTimeline schedule_dynamic(const std::vector<TaskDuration>& durations,
                             const MachineConfig& machine) {
  const int slots = machine.total_slots();
  const std::size_t n = durations.size();
  std::vector<ScheduledTask> tasks(n);

  // Min-heap on (finish time, slot id).
  using Event = std::pair<double, int>;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;

  auto place = [&](std::size_t i, int slot, double start) {
    ScheduledTask& t = tasks[i];
    t.task_id = static_cast<std::int32_t>(i);
    t.slot = slot;
    t.sm = slot / machine.block_slots_per_sm;
    t.start = start;
    t.end = start + durations[i].block_cycles;
    heap.push({t.end, slot});
  };

  const std::size_t initial = std::min<std::size_t>(n, slots);
  for (std::size_t i = 0; i < initial; ++i) place(i, static_cast<int>(i), 0.0);
  for (std::size_t next = initial; next < n; ++next) {
    const auto [time, slot] = heap.top();
    heap.pop();
    place(next, slot, time);
  }

  SimTimeline tl = finalize(std::move(tasks), machine);
  for (const TaskDuration& d : durations) tl.warp_busy_total += d.warp_busy_total();
  return tl;
}

namespace {

SimMetrics metrics_from(KernelVariant variant, Dispatch dispatch, std::size_t tasks,
                        double makespan, double warp_busy_total, const MachineConfig& machine) {
  SimMetrics m;
  m.variant = variant;
  m.dispatch = dispatch;
  m.tasks = tasks;
  m.makespan = makespan;
  const double warp_slots =
      static_cast<double>(machine.total_slots()) * machine.warps_per_block;
  m.achieved_occupancy = makespan > 0.0 ? warp_busy_total / (warp_slots * makespan) : 0.0;
  m.idle_fraction = 1.0 - m.achieved_occupancy;
  m.waves = machine.total_slots() > 0
                ? static_cast<double>(tasks) / machine.total_slots()
                : 0.0;
  return m;
}

}  // namespace

SimMetrics simulate(KernelVariant variant, const WorkTrace& trace, const MachineConfig& machine,
                    const CostModel& cost) {
  const Dispatch dispatch = dispatch_for(variant);
  const int slots = machine.total_slots();
  const std::size_t n = trace.tasks.size();

  // Metrics need only per-slot running times, not the full timeline.
  double warp_busy_total = 0.0;
  double makespan = 0.0;
  if (dispatch == Dispatch::Static) {
    std::vector<double> slot_time(slots, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const TaskDuration d = task_duration(trace.tasks[i], variant, cost, dispatch);
      warp_busy_total += d.warp_busy_total();
      double& t = slot_time[i % slots];
      t += d.block_cycles;
      makespan = std::max(makespan, t);
    }
  } else {
    using Event = std::pair<double, int>;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;
    const std::size_t initial = std::min<std::size_t>(n, slots);
    auto duration_of = [&](std::size_t i) {
      const TaskDuration d = task_duration(trace.tasks[i], variant, cost, dispatch);
      warp_busy_total += d.warp_busy_total();
      return d.block_cycles;
    };
    for (std::size_t i = 0; i < initial; ++i) heap.push({duration_of(i), static_cast<int>(i)});
    for (std::size_t next = initial; next < n; ++next) {
      const auto [time, slot] = heap.top();
      heap.pop();
      makespan = std::max(makespan, time);
      heap.push({time + duration_of(next), slot});
    }
    while (!heap.empty()) {
      makespan = std::max(makespan, heap.top().first);
      heap.pop();
    }
  }
  return metrics_from(variant, dispatch, n, makespan, warp_busy_total, machine);
}

SimRun simulate_full(KernelVariant variant, const WorkTrace& trace, const MachineConfig& machine,
                     const CostModel& cost) {
  const Dispatch dispatch = dispatch_for(variant);
  std::vector<TaskDuration> durations(trace.tasks.size());
  for (std::size_t i = 0; i < trace.tasks.size(); ++i)
    durations[i] = task_duration(trace.tasks[i], variant, cost, dispatch);

  SimRun run;
  run.timeline = dispatch == Dispatch::Static ? schedule_static(durations, machine)
                                              : schedule_dynamic(durations, machine);
  run.metrics = metrics_from(variant, dispatch, trace.tasks.size(), run.timeline.makespan,
                             run.timeline.warp_busy_total, machine);
  return run;
}

std::string metrics_csv_header() {
  return "variant,dispatch,makespan_cycles,occupancy,idle_fraction,waves,tasks";
}

std::string metrics_csv_row(const SimMetrics& m) {
  std::ostringstream out;
  out.precision(17);
  out << variant_name(m.variant) << ','
      << (m.dispatch == Dispatch::Static ? "static" : "dynamic") << ',' << m.makespan << ','
      << m.achieved_occupancy << ',' << m.idle_fraction << ',' << m.waves << ',' << m.tasks;
  return out.str();
}

std::string timeline_csv(const SimTimeline& timeline, const std::string& config_comment) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << config_comment << "\n";
  out << "task_id,start,end,sm,slot\n";
  for (const ScheduledTask& t : timeline.tasks)
    out << t.task_id << ',' << t.start << ',' << t.end << ',' << t.sm << ',' << t.slot << "\n";
  return out.str();
}

}  // namespace splatsim
