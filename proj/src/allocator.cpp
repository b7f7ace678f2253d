#include "lachesis/allocator.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace lachesis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_placed(const ScheduleRecord& schedule, TaskIndex t, const char* what) {
    if (!schedule.placed(t)) {
        throw ParentUnplaced(std::string(what) + " " + std::to_string(t) +
                             " has no placement yet");
    }
}

} // namespace

double data_ready_time(const TaskGraph& graph, const Cluster& cluster,
                       const ScheduleRecord& schedule, TaskIndex parent,
                       TaskIndex child, ExecutorId dst) {
    require_placed(schedule, parent, "parent");
    const double data = graph.edge_data(parent, child);
    double best = kInf;
    for (const Placement& p : schedule.placements(parent)) {
        best = std::min(best, p.aft + transfer_time(cluster.comm, p.executor, dst, data));
    }
    return best;
}

double earliest_start_time(const TaskGraph& graph, const Cluster& cluster,
                           const ScheduleRecord& schedule, TaskIndex node,
                           ExecutorId dst) {
    double ready = graph.arrival(node);
    for (TaskIndex p : graph.parents(node)) {
        ready = std::max(ready, data_ready_time(graph, cluster, schedule, p, node, dst));
    }
    return std::max(ready, schedule.timeline().earliest_free_at_or_after(dst, 0.0));
}

double earliest_finish_time(const TaskGraph& graph, const Cluster& cluster,
                            const ScheduleRecord& schedule, TaskIndex node,
                            ExecutorId dst) {
    return earliest_start_time(graph, cluster, schedule, node, dst) +
           graph.work(node) / cluster.speed(dst);
}

CpeftEval cpeft(const TaskGraph& graph, const Cluster& cluster,
                const ScheduleRecord& schedule, TaskIndex parent, TaskIndex node,
                ExecutorId dst, CpeftMode mode) {
    const auto& parents = graph.parents(node);
    if (std::find(parents.begin(), parents.end(), parent) == parents.end()) {
        throw NotAParent("task " + std::to_string(parent) + " is not a parent of " +
                         std::to_string(node));
    }

    const double arrival = graph.arrival(node);
    const double exec_free = schedule.timeline().earliest_free_at_or_after(dst, 0.0);
    const double speed = cluster.speed(dst);

    // Re-execute the parent on dst: it needs its own inputs there first.
    double grand_ready = arrival;
    for (TaskIndex g : graph.parents(parent)) {
        grand_ready =
            std::max(grand_ready, data_ready_time(graph, cluster, schedule, g, parent, dst));
    }
    CpeftEval eval;
    eval.plan.parent = parent;
    eval.plan.dup_ast = std::max(exec_free, grand_ready);
    eval.plan.dup_aft = eval.plan.dup_ast + graph.work(parent) / speed;

    // The node may read the parent's output from the fresh copy or from any
    // earlier copy, whichever is ready first.
    const double parent_ready =
        std::min(eval.plan.dup_aft, data_ready_time(graph, cluster, schedule, parent, node, dst));

    double others_ready = 0.0;
    for (TaskIndex m : parents) {
        if (m == parent) continue;
        others_ready =
            std::max(others_ready, data_ready_time(graph, cluster, schedule, m, node, dst));
    }

    // The duplicate occupies dst immediately before the node.
    eval.feasible_start = std::max({parent_ready, others_ready, eval.plan.dup_aft, arrival});
    eval.feasible_finish = eval.feasible_start + graph.work(node) / speed;

    if (mode == CpeftMode::Recompute) {
        eval.start = eval.feasible_start;
        eval.finish = eval.feasible_finish;
    } else {
        const double all_ready =
            std::max(data_ready_time(graph, cluster, schedule, parent, node, dst), others_ready);
        eval.start = all_ready;
        eval.finish = all_ready + graph.work(node) / speed;
    }
    return eval;
}

AllocationDecision deft_decide(const TaskGraph& graph, const Cluster& cluster,
                               const ScheduleRecord& schedule, TaskIndex node,
                               CpeftMode mode) {
    const std::size_t n_exec = cluster.size();
    const auto& parents = graph.parents(node);

    AllocationDecision best{};
    double best_finish = kInf;
    bool best_dup = false;
    TaskIndex best_dup_parent = kNoTask;

    double best_plain = kInf;

    for (ExecutorId e = 0; e < n_exec; ++e) {
        const double start = earliest_start_time(graph, cluster, schedule, node, e);
        const double finish = start + graph.work(node) / cluster.speed(e);
        best_plain = std::min(best_plain, finish);
        if (finish < best_finish) {
            best_finish = finish;
            best = {e, start, finish, std::nullopt, 0.0};
            best_dup = false;
            best_dup_parent = kNoTask;
        }
    }

    for (ExecutorId e = 0; e < n_exec; ++e) {
        for (TaskIndex p : parents) {
            const CpeftEval eval = cpeft(graph, cluster, schedule, p, node, e, mode);
            // (finish, executor, no-dup first, parent id) ordering; the plain
            // EFT pass already covered all executors, so a duplication
            // candidate must strictly beat the incumbent on its key.
            const bool wins =
                eval.finish < best_finish ||
                (eval.finish == best_finish &&
                 (e < best.executor ||
                  (e == best.executor && best_dup && p < best_dup_parent)));
            if (wins) {
                best_finish = eval.finish;
                best = {e, eval.feasible_start, eval.feasible_finish, eval.plan, 0.0};
                best_dup = true;
                best_dup_parent = p;
            }
        }
    }

    best.best_plain_eft = best_plain;
    return best;
}

void commit_decision(const TaskGraph& graph, ScheduleRecord& schedule, TaskIndex node,
                     const AllocationDecision& decision) {
    Timeline& tl = schedule.timeline();
    if (decision.duplicated_parent) {
        const DuplicationPlan& plan = *decision.duplicated_parent;
        tl.reserve(decision.executor, plan.dup_ast, plan.dup_aft,
                   graph.job_id_of(plan.parent), graph.node_id_of(plan.parent), true);
        schedule.add_placement(plan.parent,
                               {decision.executor, plan.dup_ast, plan.dup_aft, true});
    }
    tl.reserve(decision.executor, decision.ast, decision.aft, graph.job_id_of(node),
               graph.node_id_of(node), false);
    schedule.add_placement(node, {decision.executor, decision.ast, decision.aft, false});
}

AllocationDecision deft_allocate(const TaskGraph& graph, const Cluster& cluster,
                                 ScheduleRecord& schedule, TaskIndex node,
                                 CpeftMode mode) {
    AllocationDecision decision = deft_decide(graph, cluster, schedule, node, mode);
    commit_decision(graph, schedule, node, decision);
    return decision;
}

AllocationDecision eft_allocate(const TaskGraph& graph, const Cluster& cluster,
                                ScheduleRecord& schedule, TaskIndex node) {
    AllocationDecision best{};
    double best_finish = kInf;
    for (ExecutorId e = 0; e < cluster.size(); ++e) {
        const double start = earliest_start_time(graph, cluster, schedule, node, e);
        const double finish = start + graph.work(node) / cluster.speed(e);
        if (finish < best_finish) {
            best_finish = finish;
            best = {e, start, finish, std::nullopt, 0.0};
        }
    }
    best.best_plain_eft = best_finish;
    commit_decision(graph, schedule, node, best);
    return best;
}

} // namespace lachesis
