#include "lachesis/policies.hpp"

#include <algorithm>
#include <tuple>

namespace lachesis {

namespace {

void require_nonempty(const SimState& state) {
    if (state.frontier.empty()) {
        throw EmptyFrontier("no executable task to select");
    }
}

// Picks the frontier task with the smallest key.
template <typename KeyFn>
TaskIndex argmin_frontier(const SimState& state, KeyFn key) {
    TaskIndex best = state.frontier.front();
    auto best_key = key(best);
    for (std::size_t i = 1; i < state.frontier.size(); ++i) {
        const TaskIndex t = state.frontier[i];
        auto k = key(t);
        if (k < best_key) {
            best = t;
            best_key = k;
        }
    }
    return best;
}

} // namespace

Selection FifoSelector::select(const SimState& state, Rng&) {
    require_nonempty(state);
    const TaskGraph& g = *state.graph;
    const TaskIndex pick = argmin_frontier(state, [&](TaskIndex t) {
        return std::make_tuple(g.arrival(t), g.rank_down(t), g.node_id_of(t),
                               g.job_id_of(t));
    });
    return {pick, 0.0, std::nullopt};
}

Selection SjfSelector::select(const SimState& state, Rng&) {
    require_nonempty(state);
    const TaskGraph& g = *state.graph;
    const TaskIndex pick = argmin_frontier(state, [&](TaskIndex t) {
        const std::size_t slot = g.job_slot_of(t);
        return std::make_tuple(state.job_left_exec[slot], g.job_id_of(t),
                               -g.rank_up(t), g.node_id_of(t));
    });
    return {pick, 0.0, std::nullopt};
}

Selection HrrnSelector::select(const SimState& state, Rng&) {
    require_nonempty(state);
    const TaskGraph& g = *state.graph;
    const TaskIndex pick = argmin_frontier(state, [&](TaskIndex t) {
        const double waited =
            state.clock - std::max(g.arrival(t), state.entered_frontier[t]);
        const double ratio = waited / (waited + g.mean_exec_time(t));
        return std::make_tuple(-ratio, g.node_id_of(t), g.job_id_of(t));
    });
    return {pick, 0.0, std::nullopt};
}

Selection RankUpSelector::select(const SimState& state, Rng&) {
    require_nonempty(state);
    const TaskGraph& g = *state.graph;
    const TaskIndex pick = argmin_frontier(state, [&](TaskIndex t) {
        return std::make_tuple(-g.rank_up(t), g.node_id_of(t), g.job_id_of(t));
    });
    return {pick, 0.0, std::nullopt};
}

void StaticRankListSelector::reset(const SimState& state) {
    const TaskGraph& g = *state.graph;
    order_.resize(g.task_count());
    for (TaskIndex t = 0; t < g.task_count(); ++t) order_[t] = t;
    std::sort(order_.begin(), order_.end(), [&](TaskIndex a, TaskIndex b) {
        return std::make_tuple(-g.rank_up(a), g.job_id_of(a), g.node_id_of(a)) <
               std::make_tuple(-g.rank_up(b), g.job_id_of(b), g.node_id_of(b));
    });
    cursor_ = 0;
}

Selection StaticRankListSelector::select(const SimState& state, Rng&) {
    require_nonempty(state);
    while (cursor_ < order_.size() &&
           state.status[order_[cursor_]] != TaskStatus::Unassigned) {
        ++cursor_;
    }
    if (cursor_ == order_.size()) {
        throw EmptyFrontier("priority list exhausted");
    }
    return {order_[cursor_++], 0.0, std::nullopt};
}

RunResult heft_schedule(const TaskGraph& graph, const Cluster& cluster) {
    StaticRankListSelector policy;
    SimConfig config;
    config.mode = SimMode::Batch;
    config.frontier = FrontierMode::Assigned;
    config.allocator = AllocatorKind::Eft;
    return run(graph, cluster, policy, config);
}

std::unique_ptr<NodeSelector> make_baseline(const std::string& name) {
    if (name == "fifo") return std::make_unique<FifoSelector>();
    if (name == "sjf") return std::make_unique<SjfSelector>();
    if (name == "hrrn") return std::make_unique<HrrnSelector>();
    if (name == "rankup") return std::make_unique<RankUpSelector>();
    if (name == "heft") return std::make_unique<StaticRankListSelector>();
    throw InvalidSpec("unknown policy: " + name);
}

} // namespace lachesis
