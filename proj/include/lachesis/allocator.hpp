#pragma once

#include <optional>

#include "lachesis/schedule.hpp"

namespace lachesis {

// How the duplication candidate value is evaluated. Recompute prices the
// duplicated parent's re-execution and the executor's occupancy; Literal
// reproduces the bare data-readiness maximum. Committed intervals are always
// built from the feasible (recompute) times, so Literal only changes how
// candidates are ranked.
enum class CpeftMode { Literal, Recompute };

// Earliest time `child`'s input from `parent` is available on dst: the best
// finish-plus-transfer over every recorded copy of the parent.
double data_ready_time(const TaskGraph& graph, const Cluster& cluster,
                       const ScheduleRecord& schedule, TaskIndex parent,
                       TaskIndex child, ExecutorId dst);

// max(every parent's data-ready time, executor free time, job arrival).
double earliest_start_time(const TaskGraph& graph, const Cluster& cluster,
                           const ScheduleRecord& schedule, TaskIndex node,
                           ExecutorId dst);

double earliest_finish_time(const TaskGraph& graph, const Cluster& cluster,
                            const ScheduleRecord& schedule, TaskIndex node,
                            ExecutorId dst);

struct DuplicationPlan {
    TaskIndex parent = kNoTask;
    double dup_ast{};
    double dup_aft{};
};

struct CpeftEval {
    double finish{};   // mode-dependent candidate value
    double start{};    // finish - w/v
    // Feasible times used when this candidate is committed; equal to
    // finish/start in Recompute mode.
    double feasible_start{};
    double feasible_finish{};
    DuplicationPlan plan;
};

// Earliest finish of `node` on dst when `parent` is re-executed on dst right
// before it. Throws NotAParent / ParentUnplaced.
CpeftEval cpeft(const TaskGraph& graph, const Cluster& cluster,
                const ScheduleRecord& schedule, TaskIndex parent, TaskIndex node,
                ExecutorId dst, CpeftMode mode = CpeftMode::Recompute);

struct AllocationDecision {
    ExecutorId executor{};
    double ast{};
    double aft{};
    std::optional<DuplicationPlan> duplicated_parent;
    // min over executors of the plain (no duplication) earliest finish,
    // kept for dominance checks and reports.
    double best_plain_eft{};
};

// Scans every executor (and every parent x executor pair for duplication) and
// returns the decision with the minimum finish. Ties break toward the lowest
// executor id, then no-duplication, then the lowest parent id.
AllocationDecision deft_decide(const TaskGraph& graph, const Cluster& cluster,
                               const ScheduleRecord& schedule, TaskIndex node,
                               CpeftMode mode = CpeftMode::Recompute);

// Reserves the decision's intervals (duplicate first) and records placements.
void commit_decision(const TaskGraph& graph, ScheduleRecord& schedule, TaskIndex node,
                     const AllocationDecision& decision);

AllocationDecision deft_allocate(const TaskGraph& graph, const Cluster& cluster,
                                 ScheduleRecord& schedule, TaskIndex node,
                                 CpeftMode mode = CpeftMode::Recompute);

// Plain earliest-finish-time allocation, no duplication.
AllocationDecision eft_allocate(const TaskGraph& graph, const Cluster& cluster,
                                ScheduleRecord& schedule, TaskIndex node);

} // namespace lachesis
