#include "lachesis/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

namespace lachesis {

GnnParams GnnParams::create(std::uint64_t seed) {
    Rng rng(seed);
    GnnParams p;
    p.child_agg = DenseNet::create({kEmbedDim, 16, kEmbedDim}, rng);
    p.edge_agg = DenseNet::create({kEdgeFeatureDim, 16, kEmbedDim}, rng);
    p.job_net = DenseNet::create({kEmbedDim + kJobAttrDim, 16, kSummaryDim}, rng);
    p.global_net = DenseNet::create({kSummaryDim, 16, kSummaryDim}, rng);
    p.score_head = DenseNet::create({kScoreInputDim, 32, 16, 8, 1}, rng);
    p.critic = DenseNet::create({kCriticInputDim, 32, 16, 8, 1}, rng);
    return p;
}

void GnnParams::freeze_norms() {
    node_norm.freeze();
    edge_norm.freeze();
    exec_norm.freeze();
    job_norm.freeze();
}

void GnnParams::thaw_norms() {
    node_norm.thaw();
    edge_norm.thaw();
    exec_norm.thaw();
    job_norm.thaw();
}

GnnGrads GnnGrads::zeros_like(const GnnParams& params) {
    return {NetGrads::zeros_like(params.child_agg), NetGrads::zeros_like(params.edge_agg),
            NetGrads::zeros_like(params.job_net),   NetGrads::zeros_like(params.global_net),
            NetGrads::zeros_like(params.score_head), NetGrads::zeros_like(params.critic)};
}

void GnnGrads::accumulate(const GnnGrads& other, double scale) {
    child_agg.accumulate(other.child_agg, scale);
    edge_agg.accumulate(other.edge_agg, scale);
    job_net.accumulate(other.job_net, scale);
    global_net.accumulate(other.global_net, scale);
    score_head.accumulate(other.score_head, scale);
    critic.accumulate(other.critic, scale);
}

void GnnGrads::scale(double s) {
    child_agg.scale(s);
    edge_agg.scale(s);
    job_net.scale(s);
    global_net.scale(s);
    score_head.scale(s);
    critic.scale(s);
}

bool GnnGrads::finite() const {
    return child_agg.finite() && edge_agg.finite() && job_net.finite() &&
           global_net.finite() && score_head.finite() && critic.finite();
}

namespace {

double squared_norm(const NetGrads& g) {
    double s = 0.0;
    for (const Matrix& m : g.dw)
        for (double v : m.a) s += v * v;
    for (const Vec& b : g.db)
        for (double v : b) s += v * v;
    return s;
}

} // namespace

double GnnGrads::actor_norm() const {
    return std::sqrt(squared_norm(child_agg) + squared_norm(edge_agg) +
                     squared_norm(job_net) + squared_norm(global_net) +
                     squared_norm(score_head));
}

double GnnGrads::critic_norm() const { return std::sqrt(squared_norm(critic)); }

std::array<double, kNodeFeatureDim> extract_features(const SimState& state, TaskIndex t) {
    const TaskGraph& g = *state.graph;
    const std::size_t slot = g.job_slot_of(t);
    return {g.mean_exec_time(t),
            g.avg_incoming_time(t),
            g.avg_outgoing_time(t),
            g.rank_up(t),
            g.rank_down(t),
            static_cast<double>(state.job_left[slot]),
            state.job_left_exec[slot]};
}

std::array<double, kEdgeFeatureDim> edge_features(const TaskGraph& graph,
                                                  TaskIndex parent, TaskIndex child) {
    const double data = graph.edge_data(parent, child);
    return {data, data / graph.mean_bandwidth()};
}

std::array<double, kExecFeatureDim> executor_features(const SimState& state) {
    const Cluster& cluster = *state.cluster;
    const Timeline& tl = state.schedule.timeline();
    const double n = static_cast<double>(cluster.size());
    std::size_t idle = 0;
    double next_free = std::numeric_limits<double>::infinity();
    for (ExecutorId e = 0; e < cluster.size(); ++e) {
        const double free_at = tl.earliest_free_at_or_after(e, state.clock);
        if (free_at <= state.clock) ++idle;
        next_free = std::min(next_free, free_at);
    }
    return {n, cluster.mean_speed(), cluster.max_speed(),
            static_cast<double>(idle) / n, next_free - state.clock};
}

GnnSnapshot capture_snapshot(const SimState& state) {
    const TaskGraph& g = *state.graph;
    GnnSnapshot snap;
    std::vector<int> job_to_slot(g.job_count(), -1);
    std::unordered_map<TaskIndex, std::uint32_t> local_of;

    for (std::size_t s = 0; s < g.job_count(); ++s) {
        if (!state.job_arrived[s] || state.job_left[s] == 0) continue;
        JobSnapshot js;
        js.attrs = {static_cast<double>(state.job_left[s]), state.job_left_exec[s]};
        for (std::size_t u = 0; u < g.job(s).size(); ++u) {
            const TaskIndex t = g.global_index(s, u);
            if (state.status[t] != TaskStatus::Unassigned) continue;
            local_of[t] = static_cast<std::uint32_t>(js.node_task.size());
            js.node_task.push_back(t);
            js.node_features.push_back(extract_features(state, t));
        }
        for (const TaskIndex t : js.node_task) {
            for (const TaskIndex c : g.children(t)) {
                if (state.status[c] != TaskStatus::Unassigned) continue;
                js.edges.push_back({local_of[t], local_of[c], edge_features(g, t, c)});
            }
        }
        job_to_slot[s] = static_cast<int>(snap.jobs.size());
        snap.jobs.push_back(std::move(js));
    }

    snap.exec_features = executor_features(state);
    snap.frontier.reserve(state.frontier.size());
    for (const TaskIndex t : state.frontier) {
        const int js = job_to_slot[g.job_slot_of(t)];
        snap.frontier.push_back({static_cast<std::uint32_t>(js), local_of[t]});
    }
    return snap;
}

namespace {

// Summands sorted lexicographically before accumulation, so the result does
// not depend on the labeling/order the caller saw.
Vec canonical_sum(std::vector<const Vec*> parts, std::size_t dim) {
    std::sort(parts.begin(), parts.end(),
              [](const Vec* a, const Vec* b) { return *a < *b; });
    Vec out(dim, 0.0);
    for (const Vec* p : parts) {
        for (std::size_t i = 0; i < dim; ++i) out[i] += (*p)[i];
    }
    return out;
}

struct JobCache {
    std::size_t n{};
    std::vector<Vec> x_norm;
    std::vector<std::vector<std::uint32_t>> children;
    std::vector<std::uint32_t> rev_topo; // children before parents
    std::vector<Vec> edge_sum;
    std::vector<GradTape> h_tape;
    std::vector<Vec> h_out;
    // e[s][i]: embedding after sweep s; e[0] is the padded feature vector
    std::array<std::vector<Vec>, kGnnSweeps + 1> e;
    std::vector<std::array<GradTape, kGnnSweeps>> g_tape;
    GradTape job_tape;
    Vec summary;
};

JobCache embed_job(const GnnParams& params, const JobSnapshot& js) {
    JobCache jc;
    jc.n = js.node_task.size();

    jc.x_norm.resize(jc.n);
    for (std::size_t i = 0; i < jc.n; ++i) {
        jc.x_norm[i].resize(kNodeFeatureDim);
        params.node_norm.normalize(js.node_features[i].data(), jc.x_norm[i].data(),
                                   kNodeFeatureDim);
    }

    jc.children.assign(jc.n, {});
    std::vector<std::size_t> indeg(jc.n, 0);
    std::vector<std::vector<Vec>> edge_vecs(jc.n);
    for (const SnapshotEdge& e : js.edges) {
        jc.children[e.src].push_back(e.dst);
        ++indeg[e.dst];
        Vec f(kEdgeFeatureDim);
        params.edge_norm.normalize(e.features.data(), f.data(), kEdgeFeatureDim);
        edge_vecs[e.src].push_back(std::move(f));
    }

    jc.edge_sum.resize(jc.n);
    jc.h_tape.resize(jc.n);
    jc.h_out.resize(jc.n);
    for (std::size_t i = 0; i < jc.n; ++i) {
        std::vector<const Vec*> parts;
        parts.reserve(edge_vecs[i].size());
        for (const Vec& v : edge_vecs[i]) parts.push_back(&v);
        jc.edge_sum[i] = canonical_sum(std::move(parts), kEdgeFeatureDim);
        jc.h_out[i] = params.edge_agg.forward(jc.edge_sum[i], jc.h_tape[i]);
    }

    // topo (parents first), then reversed for the bottom-up sweeps
    std::vector<std::uint32_t> topo;
    topo.reserve(jc.n);
    {
        std::vector<std::size_t> d = indeg;
        std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> q;
        for (std::size_t i = 0; i < jc.n; ++i)
            if (d[i] == 0) q.push(static_cast<std::uint32_t>(i));
        while (!q.empty()) {
            const std::uint32_t u = q.top();
            q.pop();
            topo.push_back(u);
            for (std::uint32_t c : jc.children[u])
                if (--d[c] == 0) q.push(c);
        }
    }
    jc.rev_topo.assign(topo.rbegin(), topo.rend());

    jc.e[0].resize(jc.n);
    for (std::size_t i = 0; i < jc.n; ++i) {
        Vec pad(kEmbedDim, 0.0);
        std::copy(jc.x_norm[i].begin(), jc.x_norm[i].end(), pad.begin());
        jc.e[0][i] = std::move(pad);
    }

    jc.g_tape.resize(jc.n);
    for (std::size_t s = 1; s <= kGnnSweeps; ++s) {
        jc.e[s].resize(jc.n);
        for (const std::uint32_t i : jc.rev_topo) {
            std::vector<const Vec*> parts;
            parts.reserve(jc.children[i].size());
            for (std::uint32_t c : jc.children[i]) parts.push_back(&jc.e[s][c]);
            const Vec child_sum = canonical_sum(std::move(parts), kEmbedDim);
            Vec g_out = params.child_agg.forward(child_sum, jc.g_tape[i][s - 1]);
            for (std::size_t k = 0; k < kEmbedDim; ++k) {
                g_out[k] += jc.h_out[i][k] + jc.e[s - 1][i][k];
            }
            jc.e[s][i] = std::move(g_out);
        }
    }
    return jc;
}

} // namespace

struct ActorCache {
    std::vector<JobCache> jobs;
    GradTape global_tape;
    Vec exec_norm_v;
    std::vector<GradTape> head_tapes;
    bool consumed = false;
};

std::vector<std::vector<Vec>> embed_jobs(const GnnParams& params,
                                         const GnnSnapshot& snapshot) {
    std::vector<std::vector<Vec>> out;
    out.reserve(snapshot.jobs.size());
    for (const JobSnapshot& js : snapshot.jobs) {
        JobCache jc = embed_job(params, js);
        out.push_back(std::move(jc.e[kGnnSweeps]));
    }
    return out;
}

double ActorEval::log_prob(int action) const {
    if (action < 0 || static_cast<std::size_t>(action) >= probs.size()) {
        throw EmptyFrontier("action index out of range");
    }
    return std::log(probs[static_cast<std::size_t>(action)]);
}

ActorEval actor_forward(const GnnParams& params, const GnnSnapshot& snapshot) {
    if (snapshot.frontier.empty()) {
        throw EmptyFrontier("snapshot has no executable candidates");
    }
    ActorEval eval;
    eval.cache = std::make_shared<ActorCache>();
    ActorCache& cache = *eval.cache;

    cache.jobs.reserve(snapshot.jobs.size());
    for (const JobSnapshot& js : snapshot.jobs) {
        JobCache jc = embed_job(params, js);

        std::vector<const Vec*> parts;
        parts.reserve(jc.n);
        for (const Vec& v : jc.e[kGnnSweeps]) parts.push_back(&v);
        Vec pool = canonical_sum(std::move(parts), kEmbedDim);

        Vec attrs_norm(kJobAttrDim);
        params.job_norm.normalize(js.attrs.data(), attrs_norm.data(), kJobAttrDim);

        Vec job_in;
        job_in.reserve(kEmbedDim + kJobAttrDim);
        job_in.insert(job_in.end(), pool.begin(), pool.end());
        job_in.insert(job_in.end(), attrs_norm.begin(), attrs_norm.end());
        jc.summary = params.job_net.forward(job_in, jc.job_tape);

        cache.jobs.push_back(std::move(jc));
    }

    std::vector<const Vec*> summary_parts;
    summary_parts.reserve(cache.jobs.size());
    for (const JobCache& jc : cache.jobs) summary_parts.push_back(&jc.summary);
    const Vec global_pool = canonical_sum(std::move(summary_parts), kSummaryDim);
    eval.global_summary = params.global_net.forward(global_pool, cache.global_tape);

    cache.exec_norm_v.resize(kExecFeatureDim);
    params.exec_norm.normalize(snapshot.exec_features.data(), cache.exec_norm_v.data(),
                               kExecFeatureDim);

    const std::size_t f_count = snapshot.frontier.size();
    eval.scores.resize(f_count);
    cache.head_tapes.resize(f_count);
    Vec in(kScoreInputDim);
    for (std::size_t f = 0; f < f_count; ++f) {
        const FrontierRef ref = snapshot.frontier[f];
        const JobCache& jc = cache.jobs[ref.job];
        std::size_t o = 0;
        const Vec& emb = jc.e[kGnnSweeps][ref.local];
        std::copy(emb.begin(), emb.end(), in.begin() + o);
        o += kEmbedDim;
        std::copy(jc.summary.begin(), jc.summary.end(), in.begin() + o);
        o += kSummaryDim;
        std::copy(eval.global_summary.begin(), eval.global_summary.end(), in.begin() + o);
        o += kSummaryDim;
        std::copy(cache.exec_norm_v.begin(), cache.exec_norm_v.end(), in.begin() + o);
        o += kExecFeatureDim;
        std::copy(jc.x_norm[ref.local].begin(), jc.x_norm[ref.local].end(),
                  in.begin() + o);
        eval.scores[f] = params.score_head.forward(in, cache.head_tapes[f])[0];
    }

    // softmax with max subtraction
    double max_q = eval.scores[0];
    for (double q : eval.scores) max_q = std::max(max_q, q);
    eval.probs.resize(f_count);
    double z = 0.0;
    for (std::size_t f = 0; f < f_count; ++f) {
        eval.probs[f] = std::exp(eval.scores[f] - max_q);
        z += eval.probs[f];
    }
    if (!std::isfinite(z) || z <= 0.0) {
        throw NonFiniteGradient("policy scores are not finite");
    }
    eval.entropy = 0.0;
    for (std::size_t f = 0; f < f_count; ++f) {
        eval.probs[f] /= z;
        // p log p -> 0 as p -> 0; skip exact underflows
        if (eval.probs[f] > 0.0) {
            eval.entropy -= eval.probs[f] * std::log(eval.probs[f]);
        }
    }
    return eval;
}

void actor_backward(const GnnParams& params, const GnnSnapshot& snapshot,
                    ActorEval& eval, int action, double dlogp_weight,
                    double entropy_weight, GnnGrads& grads) {
    if (!eval.cache || eval.cache->consumed) {
        throw TapeMismatch("actor cache already consumed");
    }
    if (action < 0 || static_cast<std::size_t>(action) >= eval.probs.size()) {
        throw EmptyFrontier("action index out of range");
    }
    ActorCache& cache = *eval.cache;
    cache.consumed = true;

    const std::size_t f_count = snapshot.frontier.size();
    const std::size_t n_jobs = cache.jobs.size();

    std::vector<std::vector<Vec>> d_e3(n_jobs);
    for (std::size_t j = 0; j < n_jobs; ++j) {
        d_e3[j].assign(cache.jobs[j].n, Vec(kEmbedDim, 0.0));
    }
    std::vector<Vec> d_summary(n_jobs, Vec(kSummaryDim, 0.0));
    Vec d_global(kSummaryDim, 0.0);

    for (std::size_t f = 0; f < f_count; ++f) {
        const double p = eval.probs[f];
        double dq = dlogp_weight *
                    ((static_cast<int>(f) == action ? 1.0 : 0.0) - p);
        if (p > 0.0) {
            dq += entropy_weight * (-p * (std::log(p) + eval.entropy));
        }

        const Vec in_grad =
            backward(params.score_head, cache.head_tapes[f], {dq}, grads.score_head);
        const FrontierRef ref = snapshot.frontier[f];
        std::size_t o = 0;
        for (std::size_t k = 0; k < kEmbedDim; ++k) d_e3[ref.job][ref.local][k] += in_grad[o + k];
        o += kEmbedDim;
        for (std::size_t k = 0; k < kSummaryDim; ++k) d_summary[ref.job][k] += in_grad[o + k];
        o += kSummaryDim;
        for (std::size_t k = 0; k < kSummaryDim; ++k) d_global[k] += in_grad[o + k];
        // executor features and raw node features carry no parameters
    }

    const Vec d_global_pool =
        backward(params.global_net, cache.global_tape, d_global, grads.global_net);
    for (std::size_t j = 0; j < n_jobs; ++j) {
        for (std::size_t k = 0; k < kSummaryDim; ++k) d_summary[j][k] += d_global_pool[k];
    }

    for (std::size_t j = 0; j < n_jobs; ++j) {
        JobCache& jc = cache.jobs[j];
        const Vec d_job_in =
            backward(params.job_net, jc.job_tape, d_summary[j], grads.job_net);
        for (std::size_t i = 0; i < jc.n; ++i) {
            for (std::size_t k = 0; k < kEmbedDim; ++k) d_e3[j][i][k] += d_job_in[k];
        }

        // adjoints per sweep; sweep s consumed same-sweep child embeddings and
        // the sweep s-1 value of the node itself
        std::array<std::vector<Vec>, kGnnSweeps + 1> adj;
        for (std::size_t s = 0; s <= kGnnSweeps; ++s) {
            adj[s].assign(jc.n, Vec(kEmbedDim, 0.0));
        }
        adj[kGnnSweeps] = std::move(d_e3[j]);
        std::vector<Vec> h_adj(jc.n, Vec(kEmbedDim, 0.0));

        for (std::size_t s = kGnnSweeps; s >= 1; --s) {
            for (auto it = jc.rev_topo.rbegin(); it != jc.rev_topo.rend(); ++it) {
                const std::uint32_t i = *it;
                const Vec& a = adj[s][i];
                const Vec d_child_sum =
                    backward(params.child_agg, jc.g_tape[i][s - 1], a, grads.child_agg);
                for (std::uint32_t c : jc.children[i]) {
                    for (std::size_t k = 0; k < kEmbedDim; ++k) adj[s][c][k] += d_child_sum[k];
                }
                for (std::size_t k = 0; k < kEmbedDim; ++k) {
                    h_adj[i][k] += a[k];
                    adj[s - 1][i][k] += a[k];
                }
            }
        }
        for (std::size_t i = 0; i < jc.n; ++i) {
            backward(params.edge_agg, jc.h_tape[i], h_adj[i], grads.edge_agg);
        }
    }
}

Vec critic_input(const GnnParams& params, const Vec& global_summary,
                 const std::array<double, kExecFeatureDim>& exec_raw) {
    Vec in(kCriticInputDim);
    std::copy(global_summary.begin(), global_summary.end(), in.begin());
    params.exec_norm.normalize(exec_raw.data(), in.data() + kSummaryDim,
                               kExecFeatureDim);
    return in;
}

Selection GnnPolicy::select(const SimState& state, Rng& rng) {
    GnnSnapshot snap = capture_snapshot(state);
    ActorEval eval = actor_forward(params_, snap);

    int pick = 0;
    if (greedy_) {
        for (std::size_t f = 1; f < eval.probs.size(); ++f) {
            if (eval.probs[f] > eval.probs[static_cast<std::size_t>(pick)]) {
                pick = static_cast<int>(f);
            }
        }
    } else {
        const double u = rng.uniform01();
        double acc = 0.0;
        pick = -1;
        for (std::size_t f = 0; f < eval.probs.size(); ++f) {
            acc += eval.probs[f];
            if (u < acc) {
                pick = static_cast<int>(f);
                break;
            }
        }
        if (pick < 0) {
            // rounding pushed the cumulative sum below u; take the last
            // candidate that actually carries probability
            for (std::size_t f = eval.probs.size(); f-- > 0;) {
                if (eval.probs[f] > 0.0) {
                    pick = static_cast<int>(f);
                    break;
                }
            }
        }
    }

    snap.action = pick;
    Selection sel;
    sel.task = state.frontier[static_cast<std::size_t>(pick)];
    sel.log_prob = eval.log_prob(pick);
    sel.snapshot = std::move(snap);
    return sel;
}

} // namespace lachesis
