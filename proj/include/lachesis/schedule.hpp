#pragma once

#include <vector>

#include "lachesis/cluster.hpp"
#include "lachesis/task_graph.hpp"
#include "lachesis/types.hpp"

namespace lachesis {

struct Placement {
    ExecutorId executor{};
    double ast{};
    double aft{};
    bool is_duplicate = false;
};

// Assignment history for one run. Every placed task has at least one
// placement; duplicates are recorded alongside the original so later readers
// may fetch data from whichever copy is ready first.
class ScheduleRecord {
public:
    ScheduleRecord() = default;
    ScheduleRecord(std::size_t n_tasks, std::size_t n_executors)
        : placements_(n_tasks), timeline_(n_executors) {}

    bool placed(TaskIndex t) const { return !placements_[t].empty(); }

    const std::vector<Placement>& placements(TaskIndex t) const { return placements_[t]; }

    // The non-duplicate placement.
    const Placement& primary(TaskIndex t) const;

    void add_placement(TaskIndex t, const Placement& p) { placements_[t].push_back(p); }

    std::size_t task_count() const { return placements_.size(); }

    Timeline& timeline() { return timeline_; }
    const Timeline& timeline() const { return timeline_; }

private:
    std::vector<std::vector<Placement>> placements_;
    Timeline timeline_;
};

} // namespace lachesis
