#include "lachesis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lachesis {

double makespan(const TaskGraph& graph, const ScheduleRecord& schedule) {
    double latest = 0.0;
    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        if (!schedule.placed(t)) {
            throw IncompleteSchedule("task " + std::to_string(t) + " is unplaced");
        }
        latest = std::max(latest, schedule.primary(t).aft);
    }
    return latest;
}

double speedup(const TaskGraph& graph, const Cluster& cluster,
               const ScheduleRecord& schedule) {
    double sequential = 0.0;
    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        sequential += graph.work(t);
    }
    sequential /= cluster.max_speed();
    return sequential / makespan(graph, schedule);
}

std::vector<double> per_job_slr(const TaskGraph& graph, const Cluster& cluster,
                                const ScheduleRecord& schedule) {
    const double fastest = cluster.max_speed();
    std::vector<double> result;
    result.reserve(graph.job_count());
    for (std::size_t s = 0; s < graph.job_count(); ++s) {
        const Job& job = graph.job(s);
        double last = 0.0;
        for (std::size_t u = 0; u < job.size(); ++u) {
            const TaskIndex t = graph.global_index(s, u);
            if (!schedule.placed(t)) {
                throw IncompleteSchedule("job " + std::to_string(job.id()) +
                                         " has unplaced tasks");
            }
            last = std::max(last, schedule.primary(t).aft);
        }
        const double span = last - job.arrival_time();
        result.push_back(span / critical_path_lower_bound(job, fastest));
    }
    return result;
}

double slr(const TaskGraph& graph, const Cluster& cluster,
           const ScheduleRecord& schedule) {
    const std::vector<double> per_job = per_job_slr(graph, cluster, schedule);
    double sum = 0.0;
    for (double v : per_job) sum += v;
    return sum / static_cast<double>(per_job.size());
}

LatencyStats latency_stats(std::vector<double> samples) {
    if (samples.empty()) {
        throw EmptySamples("latency percentiles need at least one sample");
    }
    std::sort(samples.begin(), samples.end());
    auto nearest_rank = [&](double pct) {
        const std::size_t n = samples.size();
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(pct / 100.0 * static_cast<double>(n)));
        if (rank == 0) rank = 1;
        return samples[rank - 1];
    };
    return {nearest_rank(50.0), nearest_rank(98.0), samples.back()};
}

std::vector<std::string> validate_schedule(const TaskGraph& graph,
                                           const Cluster& cluster,
                                           const ScheduleRecord& schedule) {
    std::vector<std::string> violations;
    auto complain = [&](std::string msg) { violations.push_back(std::move(msg)); };

    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        if (!schedule.placed(t)) {
            complain("task " + std::to_string(t) + " unplaced");
            continue;
        }
        bool has_primary = false;
        for (const Placement& p : schedule.placements(t)) {
            if (!p.is_duplicate) has_primary = true;
            if (p.ast < graph.arrival(t)) {
                complain("task " + std::to_string(t) + " starts before its job arrives");
            }
            const double expected = p.ast + graph.work(t) / cluster.speed(p.executor);
            if (std::abs(p.aft - expected) > 1e-9 * std::max(1.0, expected)) {
                complain("task " + std::to_string(t) + " finish != start + w/v");
            }
            // Every input must be ready at this copy's start, wherever it runs.
            for (TaskIndex parent : graph.parents(t)) {
                const double data = graph.edge_data(parent, t);
                double ready = std::numeric_limits<double>::infinity();
                for (const Placement& r : schedule.placements(parent)) {
                    ready = std::min(ready, r.aft + transfer_time(cluster.comm, r.executor,
                                                                  p.executor, data));
                }
                if (ready > p.ast) {
                    complain("task " + std::to_string(t) +
                             " starts before parent data is ready");
                }
            }
        }
        if (!has_primary) {
            complain("task " + std::to_string(t) + " has only duplicate placements");
        }
    }

    for (ExecutorId e = 0; e < cluster.size(); ++e) {
        const auto& intervals = schedule.timeline().intervals(e);
        for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
            if (intervals[i].finish > intervals[i + 1].start) {
                complain("executor " + std::to_string(e) + " intervals overlap");
            }
        }
    }
    return violations;
}

MetricsReport compute_report(const TaskGraph& graph, const Cluster& cluster,
                             const ScheduleRecord& schedule) {
    MetricsReport report;
    report.makespan = makespan(graph, schedule);
    report.speedup = speedup(graph, cluster, schedule);
    report.job_slr = per_job_slr(graph, cluster, schedule);
    double sum = 0.0;
    for (double v : report.job_slr) sum += v;
    report.slr = sum / static_cast<double>(report.job_slr.size());
    report.n_tasks = graph.task_count();
    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        for (const Placement& p : schedule.placements(t)) {
            if (p.is_duplicate) ++report.n_duplicates;
        }
    }
    return report;
}

} // namespace lachesis
