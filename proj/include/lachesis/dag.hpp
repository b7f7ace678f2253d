#pragma once

#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lachesis/types.hpp"

namespace lachesis {

struct TaskNode {
    NodeId id{};
    JobId job_id{};
    double computation_size{}; // work units
    TaskStatus status = TaskStatus::Unassigned;

    friend bool operator==(const TaskNode& a, const TaskNode& b) {
        return a.id == b.id && a.job_id == b.job_id &&
               a.computation_size == b.computation_size;
    }
};

struct Edge {
    NodeId src{};
    NodeId dst{};
    double data_size{}; // data units

    friend bool operator==(const Edge& a, const Edge& b) {
        return a.src == b.src && a.dst == b.dst && a.data_size == b.data_size;
    }
};

// A single DAG job. Immutable after build(); adjacency is stored as dense
// local indices in node insertion order.
class Job {
public:
    Job() = default;

    // Validates and constructs. Throws DuplicateNodeId, DanglingEdge,
    // CycleDetected or InvalidJob.
    static Job build(JobId id, std::vector<TaskNode> nodes, std::vector<Edge> edges,
                     double arrival_time);

    JobId id() const { return id_; }
    double arrival_time() const { return arrival_time_; }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<TaskNode>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::size_t index_of(NodeId id) const;
    const TaskNode& node(std::size_t local) const { return nodes_[local]; }

    const std::vector<std::size_t>& parents(std::size_t local) const { return parents_[local]; }
    const std::vector<std::size_t>& children(std::size_t local) const { return children_[local]; }

    // Data size on edge local_src -> local_dst; throws NotAParent when absent.
    double edge_data(std::size_t local_src, std::size_t local_dst) const;

    // Parents before children; deterministic (ready nodes taken in ascending
    // local index).
    const std::vector<std::size_t>& topo_order() const { return topo_order_; }

    bool is_entry(std::size_t local) const { return parents_[local].empty(); }
    bool is_exit(std::size_t local) const { return children_[local].empty(); }

    friend bool operator==(const Job& a, const Job& b) {
        return a.id_ == b.id_ && a.arrival_time_ == b.arrival_time_ &&
               a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    JobId id_{};
    double arrival_time_{};
    std::vector<TaskNode> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::unordered_map<std::uint64_t, double> edge_data_; // (src_local << 32 | dst_local)
    std::vector<std::size_t> topo_order_;
};

Job build_job(JobId id, std::vector<TaskNode> nodes, std::vector<Edge> edges,
              double arrival_time);

struct RankTable {
    std::vector<double> rank_up;   // by local node index
    std::vector<double> rank_down; // by local node index
};

// Path length from each node to an exit node, using mean executor speed and
// mean bandwidth: rank_up(n) = w_n / v_mean + max over children c of
// (e_nc / bw_mean + rank_up(c)).
std::vector<double> compute_rank_up(const Job& job, double mean_speed, double mean_bandwidth);

// Path length from the entry nodes to each node: rank_down(n) = max over
// parents p of (rank_down(p) + w_p / v_mean + e_pn / bw_mean), 0 for entries.
std::vector<double> compute_rank_down(const Job& job, double mean_speed, double mean_bandwidth);

RankTable compute_ranks(const Job& job, double mean_speed, double mean_bandwidth);

// The entry->exit path with maximal total work, as local indices. Ties are
// broken toward the lexicographically smallest node-id sequence.
std::vector<std::size_t> critical_path(const Job& job);

// Sum of work along the heaviest path divided by the fastest executor speed.
// No schedule of this job can finish faster.
double critical_path_lower_bound(const Job& job, double fastest_speed);

} // namespace lachesis
