#include "lachesis/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <string>

#include "lachesis/metrics.hpp"

namespace lachesis {

bool event_after(const SimEvent& lhs, const SimEvent& rhs) {
    if (lhs.time != rhs.time) return lhs.time > rhs.time;
    if (lhs.kind != rhs.kind) return lhs.kind > rhs.kind;
    if (lhs.a != rhs.a) return lhs.a > rhs.a;
    return lhs.b > rhs.b;
}

double step_reward(double t_k, double t_prev) { return -(t_k - t_prev); }

namespace {

bool parents_ready(const SimState& state, TaskIndex t, FrontierMode mode) {
    for (TaskIndex p : state.graph->parents(t)) {
        const TaskStatus s = state.status[p];
        if (mode == FrontierMode::Assigned) {
            if (s == TaskStatus::Unassigned) return false;
        } else {
            if (s != TaskStatus::Finished) return false;
        }
    }
    return true;
}

bool eligible(const SimState& state, TaskIndex t, FrontierMode mode) {
    return state.job_arrived[state.graph->job_slot_of(t)] &&
           state.status[t] == TaskStatus::Unassigned && parents_ready(state, t, mode);
}

void insert_frontier(SimState& state, TaskIndex t) {
    auto it = std::lower_bound(state.frontier.begin(), state.frontier.end(), t);
    if (it == state.frontier.end() || *it != t) {
        state.frontier.insert(it, t);
        state.entered_frontier[t] = state.clock;
    }
}

} // namespace

std::vector<TaskIndex> compute_frontier(const SimState& state, FrontierMode mode) {
    std::vector<TaskIndex> result;
    for (TaskIndex t = 0; t < state.graph->task_count(); ++t) {
        if (eligible(state, t, mode)) result.push_back(t);
    }
    return result;
}

RunResult run(const TaskGraph& graph, const Cluster& cluster, NodeSelector& policy,
              const SimConfig& config) {
    if (graph.job_count() == 0) {
        throw InvalidSpec("workload has no jobs");
    }
    if (config.mode == SimMode::Batch) {
        for (const Job& j : graph.jobs()) {
            if (j.arrival_time() != 0.0) {
                throw InvalidSpec("batch mode requires every arrival time to be 0");
            }
        }
    }
    if (policy.batch_only() && config.mode == SimMode::Continuous) {
        throw ContinuousModeUnsupported(std::string(policy.name()) +
                                        " only supports batch mode");
    }

    SimState state;
    state.graph = &graph;
    state.cluster = &cluster;
    state.schedule = ScheduleRecord(graph.task_count(), cluster.size());
    state.status.assign(graph.task_count(), TaskStatus::Unassigned);
    state.job_arrived.assign(graph.job_count(), 0);
    state.job_left.resize(graph.job_count());
    state.job_left_exec.assign(graph.job_count(), 0.0);
    state.entered_frontier.assign(graph.task_count(), -1.0);
    for (std::size_t s = 0; s < graph.job_count(); ++s) {
        state.job_left[s] = graph.job(s).size();
        for (std::size_t u = 0; u < graph.job(s).size(); ++u) {
            state.job_left_exec[s] += graph.mean_exec_time(graph.global_index(s, u));
        }
    }

    std::priority_queue<SimEvent, std::vector<SimEvent>, decltype(&event_after)> events(
        &event_after);
    for (std::size_t s = 0; s < graph.job_count(); ++s) {
        events.push({graph.job(s).arrival_time(), SimEvent::Kind::JobArrival, s, 0});
    }

    Rng rng(config.seed);
    RunResult result;
    result.trace.t_start = 0.0;
    result.trace.t_last = 0.0;

    policy.reset(state);

    std::size_t assigned = 0;
    bool truncated = false;
    double last_event_time = 0.0;

    while (!events.empty() && !truncated) {
        // Apply every event sharing this timestamp (arrivals before
        // completions), then open the scheduling loop once.
        state.clock = events.top().time;
        last_event_time = state.clock;
        while (!events.empty() && events.top().time == state.clock) {
            const SimEvent ev = events.top();
            events.pop();
            if (ev.kind == SimEvent::Kind::JobArrival) {
                const std::size_t slot = static_cast<std::size_t>(ev.a);
                state.job_arrived[slot] = 1;
                for (std::size_t u = 0; u < graph.job(slot).size(); ++u) {
                    const TaskIndex t = graph.global_index(slot, u);
                    if (eligible(state, t, config.frontier)) insert_frontier(state, t);
                }
            } else {
                const TaskIndex t = static_cast<TaskIndex>(ev.a);
                advance_status(state.status[t], TaskStatus::Finished);
                if (config.frontier == FrontierMode::Finished) {
                    for (TaskIndex c : graph.children(t)) {
                        if (eligible(state, c, config.frontier)) {
                            insert_frontier(state, c);
                        }
                    }
                }
            }
        }

        // Scheduling loop for this timestamp.
        while (!state.frontier.empty()) {
            if (state.decisions >= config.max_decisions) {
                truncated = true;
                break;
            }
            const auto wall_start = std::chrono::steady_clock::now();

            Selection sel = policy.select(state, rng);
            auto pos = std::lower_bound(state.frontier.begin(), state.frontier.end(),
                                        sel.task);
            if (sel.task == kNoTask || pos == state.frontier.end() || *pos != sel.task) {
                throw PolicyReturnedNonFrontierNode(
                    std::string(policy.name()) + " selected a non-executable task");
            }

            AllocationDecision decision =
                config.allocator == AllocatorKind::Deft
                    ? deft_allocate(graph, cluster, state.schedule, sel.task, config.cpeft)
                    : eft_allocate(graph, cluster, state.schedule, sel.task);

            if (config.measure_latency) {
                const auto wall_end = std::chrono::steady_clock::now();
                result.decision_latency_ms.push_back(
                    std::chrono::duration<double, std::milli>(wall_end - wall_start)
                        .count());
            }

            state.frontier.erase(pos);
            advance_status(state.status[sel.task], TaskStatus::Assigned);
            const std::size_t slot = graph.job_slot_of(sel.task);
            state.job_left[slot] -= 1;
            state.job_left_exec[slot] -= graph.mean_exec_time(sel.task);
            ++assigned;
            ++state.decisions;

            if (config.frontier == FrontierMode::Assigned) {
                for (TaskIndex c : graph.children(sel.task)) {
                    if (eligible(state, c, config.frontier)) insert_frontier(state, c);
                }
            }

            // A placement may sit earlier on the timeline than the decision
            // that created it (schedule construction, not execution); the
            // completion is observed no earlier than the decision itself.
            events.push({std::max(decision.aft, state.clock),
                         SimEvent::Kind::TaskCompletion, sel.task, decision.executor});

            const double reward = step_reward(state.clock, result.trace.t_last);
            result.trace.steps.push_back(
                {state.clock, reward, sel.task, sel.log_prob});
            result.trace.t_last = state.clock;
            if (config.record_snapshots && sel.snapshot) {
                result.trace.snapshots.push_back(std::move(*sel.snapshot));
            }
            result.decisions.push_back(decision);
        }
    }

    result.trace.truncated = truncated;
    result.complete = assigned == graph.task_count() && !truncated;
    if (result.complete) {
        // Drain any remaining completions so the final clock is the true
        // completion time of the workload.
        while (!events.empty()) {
            last_event_time = events.top().time;
            events.pop();
        }
        result.final_clock = last_event_time;
        if (config.validate) {
            const std::vector<std::string> violations =
                validate_schedule(graph, cluster, state.schedule);
            if (!violations.empty()) {
                throw SchedulerError("schedule validation failed: " + violations.front());
            }
        }
    }
    result.schedule = std::move(state.schedule);
    return result;
}

} // namespace lachesis
