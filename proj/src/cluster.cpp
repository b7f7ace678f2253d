#include "lachesis/cluster.hpp"

#include <algorithm>
#include <string>

#include "lachesis/random.hpp"

namespace lachesis {

CommMatrix::CommMatrix(std::size_t n_executors, double uniform_bandwidth)
    : n_(n_executors), uniform_(uniform_bandwidth),
      bw_(n_executors * n_executors, uniform_bandwidth) {}

void CommMatrix::check(ExecutorId e) const {
    if (e >= n_) {
        throw UnknownExecutor("executor " + std::to_string(e) + " out of range");
    }
}

double CommMatrix::bandwidth(ExecutorId src, ExecutorId dst) const {
    check(src);
    check(dst);
    return bw_[src * n_ + dst];
}

void CommMatrix::set_bandwidth(ExecutorId src, ExecutorId dst, double bw) {
    check(src);
    check(dst);
    bw_[src * n_ + dst] = bw;
}

double CommMatrix::mean_bandwidth() const {
    if (n_ < 2) return uniform_;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j) sum += bw_[i * n_ + j];
    return sum / static_cast<double>(n_ * (n_ - 1));
}

double Cluster::speed(ExecutorId e) const {
    if (e >= executors.size()) {
        throw UnknownExecutor("executor " + std::to_string(e) + " out of range");
    }
    return executors[e].speed;
}

double Cluster::mean_speed() const {
    double sum = 0.0;
    for (const Executor& e : executors) sum += e.speed;
    return sum / static_cast<double>(executors.size());
}

double Cluster::max_speed() const {
    double best = 0.0;
    for (const Executor& e : executors) best = std::max(best, e.speed);
    return best;
}

double transfer_time(const CommMatrix& comm, ExecutorId src, ExecutorId dst,
                     double data_size) {
    if (src == dst) {
        // still validates the id
        comm.bandwidth(src, src);
        return 0.0;
    }
    return data_size / comm.bandwidth(src, dst);
}

const std::vector<double>& default_speed_table() {
    static const std::vector<double> table = {2.1, 2.3, 2.5, 2.7, 2.9, 3.1, 3.3, 3.6};
    return table;
}

Cluster make_cluster(const ClusterConfig& config) {
    if (config.n_executors == 0) {
        throw InvalidSpec("cluster needs at least one executor");
    }
    if (config.uniform_bandwidth <= 0.0) {
        throw InvalidSpec("uniform bandwidth must be positive");
    }
    const std::vector<double>& table =
        config.speed_table.empty() ? default_speed_table() : config.speed_table;
    for (double v : table) {
        if (v <= 0.0) throw InvalidSpec("speed table entries must be positive");
    }

    Rng rng(config.seed);
    Cluster cluster{{}, CommMatrix(config.n_executors, config.uniform_bandwidth)};
    cluster.executors.reserve(config.n_executors);
    for (std::size_t i = 0; i < config.n_executors; ++i) {
        cluster.executors.push_back(
            {static_cast<ExecutorId>(i), table[rng.index(table.size())]});
    }
    return cluster;
}

void Timeline::check(ExecutorId e) const {
    if (e >= slots_.size()) {
        throw UnknownExecutor("executor " + std::to_string(e) + " out of range");
    }
}

double Timeline::earliest_free_at_or_after(ExecutorId e, double t) const {
    check(e);
    const auto& iv = slots_[e];
    return iv.empty() ? t : std::max(t, iv.back().finish);
}

void Timeline::reserve(ExecutorId e, double start, double finish, JobId job,
                       NodeId node, bool is_duplicate) {
    check(e);
    if (finish <= start) {
        throw OverlapRejected("empty or inverted interval");
    }
    if (start < earliest_free_at_or_after(e, 0.0)) {
        throw OverlapRejected("interval overlaps executor " + std::to_string(e) +
                              " occupancy");
    }
    slots_[e].push_back({start, finish, job, node, is_duplicate});
}

const std::vector<OccupiedInterval>& Timeline::intervals(ExecutorId e) const {
    check(e);
    return slots_[e];
}

} // namespace lachesis
