#include "doctest.h"

#include "lachesis/io.hpp"
#include "lachesis/metrics.hpp"
#include "lachesis/policies.hpp"
#include "lachesis/workload.hpp"

using namespace lachesis;

namespace {

TaskNode node(NodeId id, double w) { return {id, 0, w, TaskStatus::Unassigned}; }

Cluster equal_cluster(std::size_t n, double speed, double bw) {
    Cluster c{{}, CommMatrix(n, bw)};
    for (std::size_t i = 0; i < n; ++i) c.executors.push_back({static_cast<ExecutorId>(i), speed});
    return c;
}

} // namespace

TEST_CASE("step reward is the negative elapsed decision time") {
    CHECK(step_reward(10.0, 7.0) == -3.0);
    CHECK(step_reward(4.0, 4.0) == 0.0);
}

TEST_CASE("one job, one node, one executor") {
    const Cluster c = equal_cluster(1, 2.0, 1.0);
    TaskGraph g({Job::build(0, {node(0, 6)}, {}, 0.0)}, 2.0, 1.0);
    FifoSelector fifo;
    const RunResult r = run(g, c, fifo, SimConfig{});
    CHECK(r.complete);
    CHECK(makespan(g, r.schedule) == doctest::Approx(3.0));
    CHECK(r.final_clock == doctest::Approx(3.0));
}

TEST_CASE("two independent single-node jobs run in parallel") {
    const Cluster c = equal_cluster(2, 2.0, 1.0);
    TaskGraph g({Job::build(0, {node(0, 6)}, {}, 0.0),
                 Job::build(1, {node(0, 4)}, {}, 0.0)},
                2.0, 1.0);
    for (const char* name : {"fifo", "sjf", "hrrn", "rankup"}) {
        auto policy = make_baseline(name);
        const RunResult r = run(g, c, *policy, SimConfig{});
        CHECK(makespan(g, r.schedule) == doctest::Approx(3.0));
    }
}

TEST_CASE("replay determinism") {
    WorkloadSpec spec;
    spec.n_jobs = 5;
    spec.seed = 12;
    ClusterConfig cc;
    cc.n_executors = 4;
    cc.seed = 12;
    const Cluster c = make_cluster(cc);
    TaskGraph g(generate(spec), c.mean_speed(), c.comm.mean_bandwidth());
    FifoSelector fifo;
    const RunResult a = run(g, c, fifo, SimConfig{});
    const RunResult b = run(g, c, fifo, SimConfig{});
    CHECK(schedule_csv(g, a.schedule) == schedule_csv(g, b.schedule));
    CHECK(trace_csv(g, a.trace) == trace_csv(g, b.trace));
}

TEST_CASE("frontier definition") {
    TaskGraph g({Job::build(0, {node(0, 2), node(1, 2)}, {{0, 1, 1}}, 5.0)}, 1.0, 1.0);
    const Cluster c = equal_cluster(1, 1.0, 1.0);

    SimState state;
    state.graph = &g;
    state.cluster = &c;
    state.schedule = ScheduleRecord(2, 1);
    state.status.assign(2, TaskStatus::Unassigned);
    state.job_arrived.assign(1, 0);
    state.job_left = {2};
    state.job_left_exec = {4.0};
    state.entered_frontier.assign(2, -1.0);

    SUBCASE("before arrival the frontier is empty") {
        CHECK(compute_frontier(state, FrontierMode::Assigned).empty());
    }
    SUBCASE("only the entry is executable after arrival") {
        state.job_arrived[0] = 1;
        CHECK(compute_frontier(state, FrontierMode::Assigned) ==
              std::vector<TaskIndex>{0});
    }
    SUBCASE("assigned mode unlocks children at assignment, finished mode later") {
        state.job_arrived[0] = 1;
        state.status[0] = TaskStatus::Assigned;
        CHECK(compute_frontier(state, FrontierMode::Assigned) ==
              std::vector<TaskIndex>{1});
        CHECK(compute_frontier(state, FrontierMode::Finished).empty());
        state.status[0] = TaskStatus::Finished;
        CHECK(compute_frontier(state, FrontierMode::Finished) ==
              std::vector<TaskIndex>{1});
    }
}

TEST_CASE("continuous mode respects arrivals and batch mode rejects them") {
    TaskGraph g({Job::build(0, {node(0, 2)}, {}, 0.0),
                 Job::build(1, {node(0, 2)}, {}, 7.5)},
                1.0, 1.0);
    const Cluster c = equal_cluster(2, 1.0, 1.0);
    FifoSelector fifo;

    SimConfig config;
    config.mode = SimMode::Continuous;
    const RunResult r = run(g, c, fifo, config);
    CHECK(r.schedule.primary(1).ast >= 7.5);

    SimConfig batch;
    batch.mode = SimMode::Batch;
    CHECK_THROWS_AS(run(g, c, fifo, batch), InvalidSpec);
}

TEST_CASE("rewards telescope to the negative span of decision times") {
    WorkloadSpec spec;
    spec.n_jobs = 4;
    spec.seed = 3;
    spec.mode = SimMode::Continuous;
    ClusterConfig cc;
    cc.n_executors = 3;
    cc.seed = 3;
    const Cluster c = make_cluster(cc);
    TaskGraph g(generate(spec), c.mean_speed(), c.comm.mean_bandwidth());

    for (FrontierMode fm : {FrontierMode::Assigned, FrontierMode::Finished}) {
        SimConfig config;
        config.mode = SimMode::Continuous;
        config.frontier = fm;
        FifoSelector fifo;
        const RunResult r = run(g, c, fifo, config);
        REQUIRE(r.complete);
        CHECK(r.trace.total_reward() ==
              doctest::Approx(-(r.trace.t_last - r.trace.t_start)).epsilon(1e-12));
    }
}

TEST_CASE("decision budget truncates the episode") {
    WorkloadSpec spec;
    spec.n_jobs = 3;
    spec.seed = 1;
    const Cluster c = equal_cluster(2, 2.0, 5.0);
    TaskGraph g(generate(spec), 2.0, 5.0);
    FifoSelector fifo;
    SimConfig config;
    config.max_decisions = 4;
    config.validate = false;
    const RunResult r = run(g, c, fifo, config);
    CHECK(r.trace.truncated);
    CHECK_FALSE(r.complete);
    CHECK(r.trace.steps.size() == 4);
}

TEST_CASE("a policy returning a non-frontier task is rejected") {
    struct BadPolicy : NodeSelector {
        const char* name() const override { return "bad"; }
        Selection select(const SimState& state, Rng&) override {
            return {state.frontier.back() + 1000, 0.0, std::nullopt};
        }
    };
    TaskGraph g({Job::build(0, {node(0, 2)}, {}, 0.0)}, 1.0, 1.0);
    const Cluster c = equal_cluster(1, 1.0, 1.0);
    BadPolicy bad;
    CHECK_THROWS_AS(run(g, c, bad, SimConfig{}), PolicyReturnedNonFrontierNode);
}

TEST_CASE("batch makespan equals the final completion clock") {
    WorkloadSpec spec;
    spec.n_jobs = 6;
    spec.seed = 21;
    ClusterConfig cc;
    cc.n_executors = 3;
    cc.seed = 21;
    const Cluster c = make_cluster(cc);
    TaskGraph g(generate(spec), c.mean_speed(), c.comm.mean_bandwidth());
    auto policy = make_baseline("rankup");
    const RunResult r = run(g, c, *policy, SimConfig{});
    CHECK(makespan(g, r.schedule) == doctest::Approx(r.final_clock));
}

TEST_CASE("incremental frontier matches the reference definition") {
    struct Probe : NodeSelector {
        FrontierMode mode;
        explicit Probe(FrontierMode m) : mode(m) {}
        const char* name() const override { return "probe"; }
        Selection select(const SimState& state, Rng&) override {
            const auto reference = compute_frontier(state, mode);
            REQUIRE(state.frontier == reference);
            return {state.frontier.front(), 0.0, std::nullopt};
        }
    };
    WorkloadSpec spec;
    spec.n_jobs = 4;
    spec.seed = 9;
    spec.mode = SimMode::Continuous;
    ClusterConfig cc;
    cc.n_executors = 2;
    cc.seed = 9;
    const Cluster c = make_cluster(cc);
    TaskGraph g(generate(spec), c.mean_speed(), c.comm.mean_bandwidth());
    for (FrontierMode fm : {FrontierMode::Assigned, FrontierMode::Finished}) {
        Probe probe(fm);
        SimConfig config;
        config.mode = SimMode::Continuous;
        config.frontier = fm;
        const RunResult r = run(g, c, probe, config);
        CHECK(r.complete);
    }
}
