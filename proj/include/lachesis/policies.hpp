#pragma once

#include <memory>
#include <string>

#include "lachesis/simulator.hpp"

namespace lachesis {

// Earliest-arrived job first; ties toward the lowest rank_down, then the
// lowest node id.
class FifoSelector : public NodeSelector {
public:
    const char* name() const override { return "fifo"; }
    Selection select(const SimState& state, Rng& rng) override;
};

// Job with the least remaining mean execution time first; within the job,
// higher rank_up first.
class SjfSelector : public NodeSelector {
public:
    const char* name() const override { return "sjf"; }
    Selection select(const SimState& state, Rng& rng) override;
};

// Highest response ratio t_wait / (t_wait + t_exec) first.
class HrrnSelector : public NodeSelector {
public:
    const char* name() const override { return "hrrn"; }
    Selection select(const SimState& state, Rng& rng) override;
};

// Highest rank_up in the frontier first.
class RankUpSelector : public NodeSelector {
public:
    const char* name() const override { return "rankup"; }
    Selection select(const SimState& state, Rng& rng) override;
};

// Static priority list over the whole batch by descending rank_up; combined
// with the plain EFT allocator this is the classic heterogeneous
// earliest-finish-time algorithm. Batch only.
class StaticRankListSelector : public NodeSelector {
public:
    const char* name() const override { return "heft"; }
    void reset(const SimState& state) override;
    Selection select(const SimState& state, Rng& rng) override;
    bool batch_only() const override { return true; }

private:
    std::vector<TaskIndex> order_;
    std::size_t cursor_ = 0;
};

// Full static-list schedule for a batch workload: descending rank_up order,
// plain EFT allocation, no duplication.
RunResult heft_schedule(const TaskGraph& graph, const Cluster& cluster);

// One of: fifo, sjf, hrrn, rankup, heft. Throws InvalidSpec on unknown names.
std::unique_ptr<NodeSelector> make_baseline(const std::string& name);

} // namespace lachesis
