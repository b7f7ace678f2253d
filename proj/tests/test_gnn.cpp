#include "doctest.h"

#include <cmath>
#include <numeric>

#include "lachesis/gnn.hpp"
#include "lachesis/policies.hpp"
#include "lachesis/workload.hpp"

using namespace lachesis;

namespace {

TaskNode node(NodeId id, double w) { return {id, 0, w, TaskStatus::Unassigned}; }

Cluster equal_cluster(std::size_t n, double speed, double bw) {
    Cluster c{{}, CommMatrix(n, bw)};
    for (std::size_t i = 0; i < n; ++i)
        c.executors.push_back({static_cast<ExecutorId>(i), speed});
    return c;
}

SimState fresh_state(const TaskGraph& g, const Cluster& c) {
    SimState state;
    state.graph = &g;
    state.cluster = &c;
    state.schedule = ScheduleRecord(g.task_count(), c.size());
    state.status.assign(g.task_count(), TaskStatus::Unassigned);
    state.job_arrived.assign(g.job_count(), 1);
    state.job_left.resize(g.job_count());
    state.job_left_exec.assign(g.job_count(), 0.0);
    for (std::size_t s = 0; s < g.job_count(); ++s) {
        state.job_left[s] = g.job(s).size();
        for (std::size_t u = 0; u < g.job(s).size(); ++u) {
            state.job_left_exec[s] += g.mean_exec_time(g.global_index(s, u));
        }
    }
    state.entered_frontier.assign(g.task_count(), 0.0);
    state.frontier = compute_frontier(state, FrontierMode::Assigned);
    return state;
}

// A small random snapshot: `n_jobs` fan-out DAGs with random features.
GnnSnapshot random_snapshot(Rng& rng, std::size_t n_jobs) {
    GnnSnapshot snap;
    for (std::size_t j = 0; j < n_jobs; ++j) {
        JobSnapshot js;
        const std::size_t n = 3 + rng.index(4);
        js.attrs = {static_cast<double>(n), rng.uniform(5.0, 40.0)};
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, kNodeFeatureDim> x{};
            for (double& v : x) v = rng.uniform(-1.0, 3.0);
            js.node_features.push_back(x);
            js.node_task.push_back(j * 100 + i);
        }
        for (std::size_t i = 1; i < n; ++i) {
            const std::uint32_t parent = static_cast<std::uint32_t>(rng.index(i));
            js.edges.push_back({parent, static_cast<std::uint32_t>(i),
                                {rng.uniform(0.0, 9.0), rng.uniform(0.0, 3.0)}});
        }
        snap.jobs.push_back(std::move(js));
    }
    for (double& v : snap.exec_features) v = rng.uniform(0.0, 4.0);
    for (std::size_t j = 0; j < n_jobs; ++j) {
        snap.frontier.push_back({static_cast<std::uint32_t>(j), 0});
    }
    return snap;
}

std::vector<double*> all_params(GnnParams& p) {
    std::vector<double*> out;
    for (DenseNet* net : {&p.child_agg, &p.edge_agg, &p.job_net, &p.global_net,
                          &p.score_head, &p.critic}) {
        for (auto& m : net->w)
            for (double& v : m.a) out.push_back(&v);
        for (auto& b : net->b)
            for (double& v : b) out.push_back(&v);
    }
    return out;
}

std::vector<double> flatten(const GnnGrads& g) {
    std::vector<double> out;
    for (const NetGrads* ng :
         {&g.child_agg, &g.edge_agg, &g.job_net, &g.global_net, &g.score_head,
          &g.critic}) {
        for (const auto& m : ng->dw)
            for (double v : m.a) out.push_back(v);
        for (const auto& b : ng->db)
            for (double v : b) out.push_back(v);
    }
    return out;
}

} // namespace

TEST_CASE("snapshot captures only the unassigned remainder") {
    TaskGraph g({Job::build(0, {node(0, 2), node(1, 4), node(2, 6)},
                            {{0, 1, 3}, {0, 2, 5}}, 0.0),
                 Job::build(1, {node(0, 8)}, {}, 0.0)},
                2.0, 2.0);
    const Cluster c = equal_cluster(2, 2.0, 2.0);
    SimState state = fresh_state(g, c);

    GnnSnapshot snap = capture_snapshot(state);
    REQUIRE(snap.jobs.size() == 2);
    CHECK(snap.jobs[0].node_task.size() == 3);
    CHECK(snap.jobs[0].edges.size() == 2);
    CHECK(snap.jobs[0].attrs[0] == 3.0);
    CHECK(snap.frontier.size() == state.frontier.size());

    // assign the fork root: left counts drop, its edges vanish
    state.status[0] = TaskStatus::Assigned;
    state.job_left[0] -= 1;
    state.job_left_exec[0] -= g.mean_exec_time(0);
    state.frontier = compute_frontier(state, FrontierMode::Assigned);
    snap = capture_snapshot(state);
    CHECK(snap.jobs[0].node_task.size() == 2);
    CHECK(snap.jobs[0].edges.empty());
    CHECK(snap.jobs[0].attrs[0] == 2.0);
}

TEST_CASE("feature vector fields") {
    TaskGraph g({Job::build(0, {node(0, 4), node(1, 2)}, {{0, 1, 6}}, 0.0)}, 2.0, 3.0);
    const Cluster c = equal_cluster(1, 2.0, 3.0);
    SimState state = fresh_state(g, c);

    const auto x0 = extract_features(state, 0);
    CHECK(x0[0] == doctest::Approx(2.0));  // w / mean speed
    CHECK(x0[1] == 0.0);                   // entry: no incoming data
    CHECK(x0[2] == doctest::Approx(2.0));  // 6 / 3
    CHECK(x0[3] == doctest::Approx(compute_rank_up(g.job(0), 2.0, 3.0)[0]));
    CHECK(x0[5] == 2.0);                   // both tasks left

    const auto x1 = extract_features(state, 1);
    CHECK(x1[1] == doctest::Approx(2.0));
    CHECK(x1[2] == 0.0); // exit: no outgoing data
}

TEST_CASE("zero aggregators leave embeddings at the padded features") {
    Rng rng(2);
    GnnParams params = GnnParams::create(4);
    for (auto& m : params.child_agg.w)
        for (double& v : m.a) v = 0.0;
    for (auto& b : params.child_agg.b)
        for (double& v : b) v = 0.0;
    for (auto& m : params.edge_agg.w)
        for (double& v : m.a) v = 0.0;
    for (auto& b : params.edge_agg.b)
        for (double& v : b) v = 0.0;

    const GnnSnapshot snap = random_snapshot(rng, 2);
    const auto embeddings = embed_jobs(params, snap);
    for (std::size_t j = 0; j < snap.jobs.size(); ++j) {
        for (std::size_t i = 0; i < snap.jobs[j].node_task.size(); ++i) {
            Vec x_norm(kNodeFeatureDim);
            params.node_norm.normalize(snap.jobs[j].node_features[i].data(),
                                       x_norm.data(), kNodeFeatureDim);
            for (std::size_t k = 0; k < kNodeFeatureDim; ++k) {
                CHECK(embeddings[j][i][k] == x_norm[k]);
            }
            CHECK(embeddings[j][i][kEmbedDim - 1] == 0.0);
        }
    }
}

TEST_CASE("embeddings are exactly permutation equivariant") {
    Rng rng(6);
    GnnParams params = GnnParams::create(11);
    const GnnSnapshot snap = random_snapshot(rng, 1);
    const std::size_t n = snap.jobs[0].node_task.size();

    // relabel: reverse the local order
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());

    GnnSnapshot permuted = snap;
    auto& js = permuted.jobs[0];
    for (std::size_t i = 0; i < n; ++i) {
        js.node_features[perm[i]] = snap.jobs[0].node_features[i];
        js.node_task[perm[i]] = snap.jobs[0].node_task[i];
    }
    js.edges.clear();
    for (const SnapshotEdge& e : snap.jobs[0].edges) {
        js.edges.push_back({perm[e.src], perm[e.dst], e.features});
    }

    const auto a = embed_jobs(params, snap);
    const auto b = embed_jobs(params, permuted);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(a[0][i] == b[0][perm[i]]); // bitwise equal
    }
}

TEST_CASE("three sweeps propagate leaf information to the root of a chain") {
    GnnParams params = GnnParams::create(8);
    GnnSnapshot snap;
    JobSnapshot js;
    js.attrs = {4.0, 10.0};
    for (std::size_t i = 0; i < 4; ++i) {
        std::array<double, kNodeFeatureDim> x{};
        x[0] = 1.0 + static_cast<double>(i);
        js.node_features.push_back(x);
        js.node_task.push_back(i);
        if (i > 0) {
            js.edges.push_back({static_cast<std::uint32_t>(i - 1),
                                static_cast<std::uint32_t>(i),
                                {1.0, 0.5}});
        }
    }
    snap.jobs.push_back(js);
    snap.frontier.push_back({0, 0});

    const auto before = embed_jobs(params, snap);
    snap.jobs[0].node_features[3][0] += 0.25; // perturb the leaf
    const auto after = embed_jobs(params, snap);
    double diff = 0.0;
    for (std::size_t k = 0; k < kEmbedDim; ++k) {
        diff += std::abs(after[0][0][k] - before[0][0][k]);
    }
    CHECK(diff > 0.0);
}

TEST_CASE("summaries follow the documented pooling structure") {
    Rng rng(14);
    GnnParams params = GnnParams::create(3);
    GnnSnapshot snap = random_snapshot(rng, 1);
    snap.jobs.push_back(snap.jobs[0]); // duplicate an identical job
    snap.frontier = {{0, 0}, {1, 0}};

    const ActorEval eval = actor_forward(params, snap);

    // recompute by hand: pooled embeddings -> job net -> doubled -> global net
    const auto embeddings = embed_jobs(params, snap);
    Vec pool(kEmbedDim, 0.0);
    {
        std::vector<Vec> sorted = embeddings[0];
        std::sort(sorted.begin(), sorted.end());
        for (const Vec& e : sorted) {
            for (std::size_t k = 0; k < kEmbedDim; ++k) pool[k] += e[k];
        }
    }
    Vec attrs_norm(kJobAttrDim);
    params.job_norm.normalize(snap.jobs[0].attrs.data(), attrs_norm.data(), kJobAttrDim);
    Vec job_in = pool;
    job_in.insert(job_in.end(), attrs_norm.begin(), attrs_norm.end());
    const Vec summary = params.job_net.forward(job_in);
    Vec doubled(kSummaryDim);
    for (std::size_t k = 0; k < kSummaryDim; ++k) doubled[k] = summary[k] + summary[k];
    const Vec global = params.global_net.forward(doubled);
    for (std::size_t k = 0; k < kSummaryDim; ++k) {
        CHECK(eval.global_summary[k] == doctest::Approx(global[k]).epsilon(1e-12));
    }

    // identical candidates from identical jobs split the probability evenly
    CHECK(eval.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eval.probs[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax properties") {
    Rng rng(19);
    GnnParams params = GnnParams::create(5);
    const GnnSnapshot snap = random_snapshot(rng, 3);
    const ActorEval eval = actor_forward(params, snap);

    double sum = 0.0;
    for (double p : eval.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    SUBCASE("shifting every score leaves the distribution unchanged") {
        GnnParams shifted = params;
        shifted.score_head.b.back()[0] += 3.75; // shifts every candidate equally
        const ActorEval eval2 = actor_forward(shifted, snap);
        for (std::size_t f = 0; f < eval.probs.size(); ++f) {
            CHECK(eval2.probs[f] == doctest::Approx(eval.probs[f]).epsilon(1e-12));
        }
    }
    SUBCASE("singleton frontier has probability one and log-prob zero") {
        GnnSnapshot solo = snap;
        solo.frontier = {snap.frontier[0]};
        const ActorEval eval2 = actor_forward(params, solo);
        CHECK(eval2.probs[0] == 1.0);
        CHECK(eval2.log_prob(0) == 0.0);
    }
    SUBCASE("empty frontier throws") {
        GnnSnapshot empty = snap;
        empty.frontier.clear();
        CHECK_THROWS_AS(actor_forward(params, empty), EmptyFrontier);
    }
}

TEST_CASE("end-to-end log-prob gradient matches central differences") {
    Rng rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        GnnParams params = GnnParams::create(100 + trial);
        const GnnSnapshot snap = random_snapshot(rng, 2);
        const int action = static_cast<int>(rng.index(snap.frontier.size()));

        ActorEval eval = actor_forward(params, snap);
        GnnGrads grads = GnnGrads::zeros_like(params);
        actor_backward(params, snap, eval, action, 1.0, 0.0, grads);
        const std::vector<double> flat = flatten(grads);

        GnnParams probe = params;
        std::vector<double*> slots = all_params(probe);
        REQUIRE(slots.size() == flat.size());

        // sample parameters spread over every net
        const double eps = 1e-5;
        double worst = 0.0;
        for (std::size_t i = 0; i < slots.size(); i += 97) {
            const double saved = *slots[i];
            *slots[i] = saved + eps;
            const double up = actor_forward(probe, snap).log_prob(action);
            *slots[i] = saved - eps;
            const double down = actor_forward(probe, snap).log_prob(action);
            *slots[i] = saved;
            const double fd = (up - down) / (2.0 * eps);
            worst = std::max(worst, std::abs(fd - flat[i]) /
                                        std::max({std::abs(fd), std::abs(flat[i]), 1e-6}));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("actor cache cannot be consumed twice") {
    Rng rng(29);
    GnnParams params = GnnParams::create(7);
    const GnnSnapshot snap = random_snapshot(rng, 1);
    ActorEval eval = actor_forward(params, snap);
    GnnGrads grads = GnnGrads::zeros_like(params);
    actor_backward(params, snap, eval, 0, 1.0, 0.0, grads);
    CHECK_THROWS_AS(actor_backward(params, snap, eval, 0, 1.0, 0.0, grads),
                    TapeMismatch);
}

TEST_CASE("policy selection is deterministic and frontier-aligned") {
    WorkloadSpec spec;
    spec.n_jobs = 3;
    spec.seed = 41;
    ClusterConfig cc;
    cc.n_executors = 3;
    cc.seed = 41;
    const Cluster c = make_cluster(cc);
    TaskGraph g(generate(spec), c.mean_speed(), c.comm.mean_bandwidth());

    for (bool greedy : {true, false}) {
        GnnPolicy p1(GnnParams::create(55), greedy);
        GnnPolicy p2(GnnParams::create(55), greedy);
        SimConfig config;
        config.seed = 9;
        config.record_snapshots = true;
        const RunResult a = run(g, c, p1, config);
        const RunResult b = run(g, c, p2, config);
        REQUIRE(a.complete);
        REQUIRE(a.trace.steps.size() == b.trace.steps.size());
        for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
            CHECK(a.trace.steps[k].task == b.trace.steps[k].task);
            CHECK(a.trace.steps[k].log_prob == b.trace.steps[k].log_prob);
        }
        CHECK(a.trace.snapshots.size() == a.trace.steps.size());
    }
}
