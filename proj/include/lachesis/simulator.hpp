#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lachesis/allocator.hpp"
#include "lachesis/random.hpp"
#include "lachesis/schedule.hpp"
#include "lachesis/snapshot.hpp"

namespace lachesis {

enum class SimMode { Batch, Continuous };

// When a task becomes selectable: once all parents are assigned (their finish
// times are already determined), or only once all parents have actually
// completed. The second choice spreads decisions over simulated time, which is
// what gives the per-step reward its signal.
enum class FrontierMode { Assigned, Finished };

enum class AllocatorKind { Deft, Eft };

struct SimConfig {
    SimMode mode = SimMode::Batch;
    FrontierMode frontier = FrontierMode::Assigned;
    AllocatorKind allocator = AllocatorKind::Deft;
    CpeftMode cpeft = CpeftMode::Recompute;
    std::uint64_t seed = 0;
    std::size_t max_decisions = std::numeric_limits<std::size_t>::max();
    bool record_snapshots = false;
    bool measure_latency = false;
    bool validate = true;
};

struct SimEvent {
    enum class Kind : std::uint8_t { JobArrival = 0, TaskCompletion = 1 };
    double time{};
    Kind kind{};
    std::uint64_t a{}; // job slot / task index
    std::uint64_t b{}; // executor for completions
};

bool event_after(const SimEvent& lhs, const SimEvent& rhs);

struct SimState {
    const TaskGraph* graph = nullptr;
    const Cluster* cluster = nullptr;
    ScheduleRecord schedule;
    std::vector<TaskStatus> status;
    std::vector<char> job_arrived;
    std::vector<std::size_t> job_left;      // unassigned tasks per job slot
    std::vector<double> job_left_exec;      // sum of w / mean speed over unassigned
    std::vector<TaskIndex> frontier;        // sorted ascending
    std::vector<double> entered_frontier;   // clock when the task became selectable
    double clock = 0.0;
    std::size_t decisions = 0;
};

// Recomputes the executable set from scratch (the run loop maintains it
// incrementally; this is the reference definition).
std::vector<TaskIndex> compute_frontier(const SimState& state, FrontierMode mode);

// r_k = -(t_k - t_prev)
double step_reward(double t_k, double t_prev);

struct Selection {
    TaskIndex task = kNoTask;
    double log_prob = 0.0;
    std::optional<GnnSnapshot> snapshot;
};

class NodeSelector {
public:
    virtual ~NodeSelector() = default;
    virtual const char* name() const = 0;
    virtual void reset(const SimState& state) { (void)state; }
    virtual Selection select(const SimState& state, Rng& rng) = 0;
    virtual bool batch_only() const { return false; }
};

struct DecisionStep {
    double t{};
    double reward{};
    TaskIndex task = kNoTask;
    double log_prob{};
};

struct EpisodeTrace {
    std::vector<DecisionStep> steps;
    std::vector<GnnSnapshot> snapshots; // parallel to steps when recorded
    double t_start = 0.0;
    double t_last = 0.0;
    bool truncated = false;

    double total_reward() const {
        double sum = 0.0;
        for (const DecisionStep& s : steps) sum += s.reward;
        return sum;
    }
};

struct RunResult {
    ScheduleRecord schedule;
    EpisodeTrace trace;
    std::vector<AllocationDecision> decisions; // one per trace step
    std::vector<double> decision_latency_ms;   // when measured
    bool complete = false;
    double final_clock = 0.0; // last event time once every task completed
};

// Drives the discrete-event loop: on every event (arrival or completion) the
// policy keeps picking frontier tasks and the allocator commits them, until
// the frontier empties or the decision budget runs out.
RunResult run(const TaskGraph& graph, const Cluster& cluster, NodeSelector& policy,
              const SimConfig& config);

} // namespace lachesis
