#pragma once

#include <cstdint>
#include <vector>

#include "lachesis/types.hpp"

namespace lachesis {

struct Executor {
    ExecutorId id{};
    double speed{}; // work-units per second
};

// Pairwise transfer speeds. Intra-executor transfers take zero time and the
// diagonal is never read.
class CommMatrix {
public:
    CommMatrix(std::size_t n_executors, double uniform_bandwidth);

    double bandwidth(ExecutorId src, ExecutorId dst) const;
    void set_bandwidth(ExecutorId src, ExecutorId dst, double bw);

    std::size_t executor_count() const { return n_; }

    // Mean off-diagonal bandwidth; for a single-executor cluster this falls
    // back to the construction value so rank features stay well defined.
    double mean_bandwidth() const;

private:
    void check(ExecutorId e) const;

    std::size_t n_{};
    double uniform_{};
    std::vector<double> bw_; // n*n row-major
};

struct Cluster {
    std::vector<Executor> executors;
    CommMatrix comm;

    std::size_t size() const { return executors.size(); }
    double speed(ExecutorId e) const;
    double mean_speed() const;
    double max_speed() const;
};

// Zero when src == dst, otherwise data_size / bandwidth(src, dst).
double transfer_time(const CommMatrix& comm, ExecutorId src, ExecutorId dst,
                     double data_size);

struct ClusterConfig {
    std::size_t n_executors = 1;
    std::vector<double> speed_table; // empty -> default_speed_table()
    double uniform_bandwidth = 25.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ClusterConfig&, const ClusterConfig&) = default;
};

// CPU frequency grid covering 2.1 through 3.6.
const std::vector<double>& default_speed_table();

// Draws each executor speed uniformly from the table; deterministic in seed.
Cluster make_cluster(const ClusterConfig& config);

// One executor's schedule as a list of occupied intervals. Append-only: a new
// task always starts at or after the last finish on that executor, so there is
// no gap search and no insertion.
struct OccupiedInterval {
    double start{};
    double finish{};
    JobId job{};
    NodeId node{};
    bool is_duplicate = false;
};

class Timeline {
public:
    Timeline() = default;
    explicit Timeline(std::size_t n_executors) : slots_(n_executors) {}

    std::size_t executor_count() const { return slots_.size(); }

    // max(t, finish of the last occupied interval on e).
    double earliest_free_at_or_after(ExecutorId e, double t) const;

    // Appends [start, finish). Throws OverlapRejected when start precedes the
    // executor's current free time.
    void reserve(ExecutorId e, double start, double finish, JobId job, NodeId node,
                 bool is_duplicate);

    const std::vector<OccupiedInterval>& intervals(ExecutorId e) const;

private:
    void check(ExecutorId e) const;

    std::vector<std::vector<OccupiedInterval>> slots_;
};

} // namespace lachesis
