#include "splatsim/adaptive.hpp"

#include <sstream>
#include <stdexcept>

namespace splatsim {
namespace {

double makespan_of(KernelVariant variant, const std::vector<TileWork>& work,
                   const MachineConfig& machine, const CostModel& cost) {
  return simulate(variant, trace_from_work(variant, work), machine, cost).makespan;
}

}  // namespace

SelectionState checkpoint(SelectionState state, int iter, const SyntheticLoads& loads,
                          const MachineConfig& machine, const CostModel& cost) {
  if (state.switched) throw std::logic_error("checkpoint: selection already switched");
  if (iter % state.check_interval != 0)
    throw std::invalid_argument("checkpoint: iter is not a multiple of the interval");
  const std::vector<TileWork> work = loads_to_work(loads);
  SelectionState::Checkpoint cp;
  cp.iter = iter;
  cp.t_balanced = makespan_of(KernelVariant::FineGrainedCombined, work, machine, cost);
  cp.t_baseline = makespan_of(KernelVariant::SharedMemOpt, work, machine, cost);
  if (cp.t_balanced > cp.t_baseline) {
    state.switched = true;
    state.current = KernelVariant::SharedMemOpt;
  }
  state.history.push_back(cp);
  return state;
}

TrainingSimReport run_training_sim(const TrajectoryParams& tp, int check_interval,
                                   const MachineConfig& machine, const CostModel& cost) {
  if (check_interval <= 0) throw std::invalid_argument("run_training_sim: bad check interval");
  TrainingSimReport report;
  report.iterations.reserve(tp.total_iters);

  SelectionState state;
  state.check_interval = check_interval;

  for (int iter = 0; iter < tp.total_iters; ++iter) {
    const SyntheticLoads loads = trajectory_loads(tp, iter);
    const std::vector<TileWork> work = loads_to_work(loads);

    const double t_balanced = makespan_of(KernelVariant::FineGrainedCombined, work, machine, cost);
    const double t_baseline = makespan_of(KernelVariant::SharedMemOpt, work, machine, cost);
    report.always_balanced_cycles += t_balanced;
    report.always_baseline_cycles += t_baseline;

    IterationRecord rec;
    rec.iter = iter;

    // Benchmark both kernels every interval until the first loss; the extra
    // runs are charged to the adaptive aggregate.
    if (!state.switched && iter % check_interval == 0) {
      rec.is_checkpoint = true;
      rec.t_balanced = t_balanced;
      rec.t_baseline = t_baseline;
      report.benchmark_overhead += t_balanced + t_baseline;
      state.history.push_back({iter, t_balanced, t_baseline});
      if (t_balanced > t_baseline) {
        state.switched = true;
        state.current = KernelVariant::SharedMemOpt;
        report.inflection_iter = iter;
      }
    }

    rec.variant = state.current;
    rec.cycles = state.current == KernelVariant::FineGrainedCombined ? t_balanced : t_baseline;
    report.adaptive_cycles += rec.cycles;
    report.iterations.push_back(rec);
  }
  report.adaptive_cycles += report.benchmark_overhead;
  return report;
}

SpeedupSummary speedup_summary(const TrainingSimReport& report) {
  SpeedupSummary s;
  double all_chosen = 0.0;
  double post_chosen = 0.0;
  for (const IterationRecord& rec : report.iterations) {
    all_chosen += rec.cycles;
    if (report.inflection_iter && rec.iter >= *report.inflection_iter) post_chosen += rec.cycles;
  }
  const double all_base = report.always_baseline_cycles;
  if (report.inflection_iter) {
    // Post-switch the chosen kernel is the baseline, so the post-phase
    // baseline cycles equal the chosen ones.
    const double post_base = post_chosen;
    const double pre_base = all_base - post_base;
    const double pre_chosen = all_chosen - post_chosen;
    if (pre_chosen > 0.0) s.pre_inflection = pre_base / pre_chosen;
    if (post_chosen > 0.0) s.post_inflection = post_base / post_chosen;
  } else if (all_chosen > 0.0) {
    s.pre_inflection = all_base / all_chosen;
  }
  s.overall = all_chosen > 0.0 ? all_base / all_chosen : 1.0;
  return s;
}

std::string report_csv(const TrainingSimReport& report, const std::string& config_comment) {
  std::ostringstream out;
  out.precision(17);
  out << "# " << config_comment << "\n";
  out << "iter,variant,cycles,is_checkpoint,t_balanced,t_baseline\n";
  for (const IterationRecord& rec : report.iterations) {
    out << rec.iter << ',' << variant_name(rec.variant) << ',' << rec.cycles << ','
        << (rec.is_checkpoint ? 1 : 0) << ',';
    if (rec.is_checkpoint)
      out << rec.t_balanced << ',' << rec.t_baseline;
    else
      out << ',';
    out << "\n";
  }
  const SpeedupSummary s = speedup_summary(report);
  out << "# summary inflection_iter="
      << (report.inflection_iter ? std::to_string(*report.inflection_iter) : std::string("none"))
      << " adaptive_cycles=" << report.adaptive_cycles
      << " benchmark_overhead=" << report.benchmark_overhead
      << " always_balanced=" << report.always_balanced_cycles
      << " always_baseline=" << report.always_baseline_cycles << " speedup_pre="
      << (s.pre_inflection ? std::to_string(*s.pre_inflection) : std::string("none"))
      << " speedup_post="
      << (s.post_inflection ? std::to_string(*s.post_inflection) : std::string("none"))
      << " speedup_overall=" << s.overall << "\n";
  return out.str();
}

}  // namespace splatsim
