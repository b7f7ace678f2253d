#pragma once

#include <unordered_map>
#include <vector>

#include "lachesis/dag.hpp"
#include "lachesis/types.hpp"

namespace lachesis {

// Flattened view over all jobs of a workload. Tasks get dense global indices
// (job slot order, then local node order); per-node ranks and the static
// communication features are precomputed here once, at workload arrival.
class TaskGraph {
public:
    TaskGraph(std::vector<Job> jobs, double mean_speed, double mean_bandwidth);

    std::size_t task_count() const { return work_.size(); }
    std::size_t job_count() const { return jobs_.size(); }

    const std::vector<Job>& jobs() const { return jobs_; }
    const Job& job(std::size_t slot) const { return jobs_[slot]; }

    TaskIndex global_index(std::size_t job_slot, std::size_t local) const {
        return offsets_[job_slot] + local;
    }
    std::size_t job_slot_of(TaskIndex t) const { return job_slot_[t]; }
    std::size_t local_of(TaskIndex t) const { return local_[t]; }

    double work(TaskIndex t) const { return work_[t]; }
    double arrival(TaskIndex t) const { return jobs_[job_slot_[t]].arrival_time(); }
    JobId job_id_of(TaskIndex t) const { return jobs_[job_slot_[t]].id(); }
    NodeId node_id_of(TaskIndex t) const {
        return jobs_[job_slot_[t]].node(local_[t]).id;
    }

    const std::vector<TaskIndex>& parents(TaskIndex t) const { return parents_[t]; }
    const std::vector<TaskIndex>& children(TaskIndex t) const { return children_[t]; }

    double edge_data(TaskIndex parent, TaskIndex child) const;

    double rank_up(TaskIndex t) const { return rank_up_[t]; }
    double rank_down(TaskIndex t) const { return rank_down_[t]; }

    // w / mean cluster speed
    double mean_exec_time(TaskIndex t) const { return work_[t] / mean_speed_; }
    // mean over parents of e / mean bandwidth (0 for entries)
    double avg_incoming_time(TaskIndex t) const { return avg_in_[t]; }
    // mean over children of e / mean bandwidth (0 for exits)
    double avg_outgoing_time(TaskIndex t) const { return avg_out_[t]; }

    double mean_speed() const { return mean_speed_; }
    double mean_bandwidth() const { return mean_bandwidth_; }

private:
    std::vector<Job> jobs_;
    double mean_speed_{};
    double mean_bandwidth_{};
    std::vector<TaskIndex> offsets_;
    std::vector<std::size_t> job_slot_;
    std::vector<std::size_t> local_;
    std::vector<double> work_;
    std::vector<std::vector<TaskIndex>> parents_;
    std::vector<std::vector<TaskIndex>> children_;
    std::unordered_map<std::uint64_t, double> edge_data_;
    std::vector<double> rank_up_;
    std::vector<double> rank_down_;
    std::vector<double> avg_in_;
    std::vector<double> avg_out_;
};

} // namespace lachesis
