#include "lachesis/task_graph.hpp"

namespace lachesis {

namespace {

std::uint64_t pair_key(TaskIndex a, TaskIndex b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

} // namespace

TaskGraph::TaskGraph(std::vector<Job> jobs, double mean_speed, double mean_bandwidth)
    : jobs_(std::move(jobs)), mean_speed_(mean_speed), mean_bandwidth_(mean_bandwidth) {
    if (mean_speed_ <= 0.0 || mean_bandwidth_ <= 0.0) {
        throw InvalidSpec("mean speed and bandwidth must be positive");
    }

    std::size_t total = 0;
    offsets_.reserve(jobs_.size());
    for (const Job& j : jobs_) {
        offsets_.push_back(total);
        total += j.size();
    }

    job_slot_.resize(total);
    local_.resize(total);
    work_.resize(total);
    parents_.resize(total);
    children_.resize(total);
    rank_up_.resize(total);
    rank_down_.resize(total);
    avg_in_.assign(total, 0.0);
    avg_out_.assign(total, 0.0);

    for (std::size_t s = 0; s < jobs_.size(); ++s) {
        const Job& job = jobs_[s];
        const RankTable ranks = compute_ranks(job, mean_speed_, mean_bandwidth_);
        for (std::size_t u = 0; u < job.size(); ++u) {
            const TaskIndex g = offsets_[s] + u;
            job_slot_[g] = s;
            local_[g] = u;
            work_[g] = job.node(u).computation_size;
            rank_up_[g] = ranks.rank_up[u];
            rank_down_[g] = ranks.rank_down[u];

            for (std::size_t p : job.parents(u)) {
                parents_[g].push_back(offsets_[s] + p);
                avg_in_[g] += job.edge_data(p, u) / mean_bandwidth_;
            }
            for (std::size_t c : job.children(u)) {
                children_[g].push_back(offsets_[s] + c);
                const double data = job.edge_data(u, c);
                avg_out_[g] += data / mean_bandwidth_;
                edge_data_.emplace(pair_key(g, offsets_[s] + c), data);
            }
            if (!parents_[g].empty()) avg_in_[g] /= static_cast<double>(parents_[g].size());
            if (!children_[g].empty())
                avg_out_[g] /= static_cast<double>(children_[g].size());
        }
    }
}

double TaskGraph::edge_data(TaskIndex parent, TaskIndex child) const {
    auto it = edge_data_.find(pair_key(parent, child));
    if (it == edge_data_.end()) {
        throw NotAParent("tasks are not connected by an edge");
    }
    return it->second;
}

} // namespace lachesis
