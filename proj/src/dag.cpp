#include "lachesis/dag.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace lachesis {

namespace {

std::uint64_t edge_key(std::size_t src, std::size_t dst) {
    return (static_cast<std::uint64_t>(src) << 32) | static_cast<std::uint64_t>(dst);
}

} // namespace

Job Job::build(JobId id, std::vector<TaskNode> nodes, std::vector<Edge> edges,
               double arrival_time) {
    if (nodes.empty()) {
        throw InvalidJob("job " + std::to_string(id) + " has no nodes");
    }
    if (arrival_time < 0.0) {
        throw InvalidJob("job " + std::to_string(id) + " has negative arrival time");
    }

    Job job;
    job.id_ = id;
    job.arrival_time_ = arrival_time;
    job.nodes_ = std::move(nodes);
    job.edges_ = std::move(edges);

    job.index_.reserve(job.nodes_.size());
    for (std::size_t i = 0; i < job.nodes_.size(); ++i) {
        TaskNode& n = job.nodes_[i];
        n.job_id = id;
        if (n.computation_size <= 0.0) {
            throw InvalidJob("node " + std::to_string(n.id) + " has non-positive work");
        }
        if (!job.index_.emplace(n.id, i).second) {
            throw DuplicateNodeId("duplicate node id " + std::to_string(n.id) +
                                  " in job " + std::to_string(id));
        }
    }

    const std::size_t n = job.nodes_.size();
    job.parents_.assign(n, {});
    job.children_.assign(n, {});
    job.edge_data_.reserve(job.edges_.size());
    for (const Edge& e : job.edges_) {
        auto src_it = job.index_.find(e.src);
        auto dst_it = job.index_.find(e.dst);
        if (src_it == job.index_.end() || dst_it == job.index_.end()) {
            throw DanglingEdge("edge " + std::to_string(e.src) + "->" +
                               std::to_string(e.dst) + " references unknown node");
        }
        if (e.src == e.dst) {
            throw CycleDetected("self edge on node " + std::to_string(e.src));
        }
        if (e.data_size < 0.0) {
            throw InvalidJob("edge " + std::to_string(e.src) + "->" +
                             std::to_string(e.dst) + " has negative data size");
        }
        const std::size_t s = src_it->second;
        const std::size_t d = dst_it->second;
        if (!job.edge_data_.emplace(edge_key(s, d), e.data_size).second) {
            throw InvalidJob("duplicate edge " + std::to_string(e.src) + "->" +
                             std::to_string(e.dst));
        }
        job.children_[s].push_back(d);
        job.parents_[d].push_back(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(job.parents_[i].begin(), job.parents_[i].end());
        std::sort(job.children_[i].begin(), job.children_[i].end());
    }

    // Kahn's algorithm, taking ready nodes in ascending local index.
    std::vector<std::size_t> indeg(n);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = job.parents_[i].size();
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    job.topo_order_.reserve(n);
    while (!ready.empty()) {
        const std::size_t u = ready.top();
        ready.pop();
        job.topo_order_.push_back(u);
        for (std::size_t c : job.children_[u]) {
            if (--indeg[c] == 0) ready.push(c);
        }
    }
    if (job.topo_order_.size() != n) {
        throw CycleDetected("job " + std::to_string(id) + " contains a dependency cycle");
    }
    return job;
}

std::size_t Job::index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw DanglingEdge("unknown node id " + std::to_string(id));
    }
    return it->second;
}

double Job::edge_data(std::size_t local_src, std::size_t local_dst) const {
    auto it = edge_data_.find(edge_key(local_src, local_dst));
    if (it == edge_data_.end()) {
        throw NotAParent("no edge between the given nodes");
    }
    return it->second;
}

Job build_job(JobId id, std::vector<TaskNode> nodes, std::vector<Edge> edges,
              double arrival_time) {
    return Job::build(id, std::move(nodes), std::move(edges), arrival_time);
}

std::vector<double> compute_rank_up(const Job& job, double mean_speed,
                                    double mean_bandwidth) {
    std::vector<double> rank(job.size(), 0.0);
    const auto& order = job.topo_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t u = *it;
        double tail = 0.0;
        for (std::size_t c : job.children(u)) {
            tail = std::max(tail, job.edge_data(u, c) / mean_bandwidth + rank[c]);
        }
        rank[u] = job.node(u).computation_size / mean_speed + tail;
    }
    return rank;
}

std::vector<double> compute_rank_down(const Job& job, double mean_speed,
                                      double mean_bandwidth) {
    std::vector<double> rank(job.size(), 0.0);
    for (std::size_t u : job.topo_order()) {
        double best = 0.0;
        for (std::size_t p : job.parents(u)) {
            best = std::max(best, rank[p] + job.node(p).computation_size / mean_speed +
                                      job.edge_data(p, u) / mean_bandwidth);
        }
        rank[u] = best;
    }
    return rank;
}

RankTable compute_ranks(const Job& job, double mean_speed, double mean_bandwidth) {
    return RankTable{compute_rank_up(job, mean_speed, mean_bandwidth),
                     compute_rank_down(job, mean_speed, mean_bandwidth)};
}

std::vector<std::size_t> critical_path(const Job& job) {
    const std::size_t n = job.size();
    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> next(n, kNoTask);
    const auto& order = job.topo_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t u = *it;
        double tail = 0.0;
        std::size_t pick = kNoTask;
        for (std::size_t c : job.children(u)) {
            const bool better = best[c] > tail;
            const bool tie_smaller_id =
                best[c] == tail && pick != kNoTask && job.node(c).id < job.node(pick).id;
            if (pick == kNoTask || better || tie_smaller_id) {
                tail = best[c];
                pick = c;
            }
        }
        best[u] = job.node(u).computation_size + tail;
        next[u] = job.children(u).empty() ? kNoTask : pick;
    }

    std::size_t start = kNoTask;
    for (std::size_t u = 0; u < n; ++u) {
        if (!job.is_entry(u)) continue;
        if (start == kNoTask || best[u] > best[start] ||
            (best[u] == best[start] && job.node(u).id < job.node(start).id)) {
            start = u;
        }
    }

    std::vector<std::size_t> path;
    for (std::size_t u = start; u != kNoTask; u = next[u]) path.push_back(u);
    return path;
}

double critical_path_lower_bound(const Job& job, double fastest_speed) {
    double total = 0.0;
    for (std::size_t u : critical_path(job)) {
        total += job.node(u).computation_size;
    }
    return total / fastest_speed;
}

} // namespace lachesis
