#pragma once

#include <string>
#include <vector>

#include "lachesis/schedule.hpp"

namespace lachesis {

// Completion time of the workload: the latest finish over all non-duplicate
// placements. Throws IncompleteSchedule when a task is unplaced.
double makespan(const TaskGraph& graph, const ScheduleRecord& schedule);

// Sequential time on the fastest executor divided by the makespan.
double speedup(const TaskGraph& graph, const Cluster& cluster,
               const ScheduleRecord& schedule);

// Per-job schedule length ratio: the job's span (arrival to its last finish)
// over its critical-path lower bound on the fastest executor.
std::vector<double> per_job_slr(const TaskGraph& graph, const Cluster& cluster,
                                const ScheduleRecord& schedule);

// Mean of per_job_slr.
double slr(const TaskGraph& graph, const Cluster& cluster,
           const ScheduleRecord& schedule);

struct LatencyStats {
    double p50{};
    double p98{};
    double max{};
};

// Nearest-rank percentiles. Throws EmptySamples.
LatencyStats latency_stats(std::vector<double> samples);

// Structural checks over a finished schedule: every task placed, per-executor
// exclusivity, start-after-arrival, finish = start + w/v, and precedence
// (parent data ready at or before every placement's start, duplicates
// included). Returns human-readable violations, empty when valid.
std::vector<std::string> validate_schedule(const TaskGraph& graph,
                                           const Cluster& cluster,
                                           const ScheduleRecord& schedule);

struct MetricsReport {
    double makespan{};
    double speedup{};
    double slr{};
    std::vector<double> job_slr;
    std::size_t n_tasks{};
    std::size_t n_duplicates{};
};

MetricsReport compute_report(const TaskGraph& graph, const Cluster& cluster,
                             const ScheduleRecord& schedule);

} // namespace lachesis
