#pragma once

#include <array>
#include <memory>

#include "lachesis/neural.hpp"
#include "lachesis/simulator.hpp"
#include "lachesis/snapshot.hpp"

namespace lachesis {

inline constexpr std::size_t kEmbedDim = 8;
inline constexpr std::size_t kSummaryDim = 8;
inline constexpr std::size_t kGnnSweeps = 3;

// [embedding | job summary | global summary | executor features | raw features]
inline constexpr std::size_t kScoreInputDim =
    kEmbedDim + kSummaryDim + kSummaryDim + kExecFeatureDim + kNodeFeatureDim;
inline constexpr std::size_t kCriticInputDim = kSummaryDim + kExecFeatureDim;

struct GnnParams {
    DenseNet child_agg;  // aggregates summed child embeddings
    DenseNet edge_agg;   // aggregates summed outgoing edge features
    DenseNet job_net;    // per-job summary over pooled embeddings + job attrs
    DenseNet global_net; // global summary over pooled job summaries
    DenseNet score_head; // candidate score, hidden layers 32/16/8
    DenseNet critic;     // state value, hidden layers 32/16/8

    RunningNorm node_norm{kNodeFeatureDim};
    RunningNorm edge_norm{kEdgeFeatureDim};
    RunningNorm exec_norm{kExecFeatureDim};
    RunningNorm job_norm{kJobAttrDim};

    static GnnParams create(std::uint64_t seed);

    void freeze_norms();
    void thaw_norms();
};

struct GnnGrads {
    NetGrads child_agg, edge_agg, job_net, global_net, score_head, critic;

    static GnnGrads zeros_like(const GnnParams& params);
    void accumulate(const GnnGrads& other, double scale);
    void scale(double s);
    bool finite() const;
    double actor_norm() const;  // all nets except the critic
    double critic_norm() const;
};

// Raw (unnormalized) feature extraction.
std::array<double, kNodeFeatureDim> extract_features(const SimState& state, TaskIndex t);
std::array<double, kEdgeFeatureDim> edge_features(const TaskGraph& graph,
                                                  TaskIndex parent, TaskIndex child);
std::array<double, kExecFeatureDim> executor_features(const SimState& state);

// Captures the unassigned remainder of every arrived job plus the frontier,
// aligned with the state's frontier order.
GnnSnapshot capture_snapshot(const SimState& state);

struct ActorCache;

struct ActorEval {
    std::vector<double> scores; // per frontier entry
    std::vector<double> probs;  // softmax over the frontier
    double entropy{};
    Vec global_summary;
    std::shared_ptr<ActorCache> cache;

    double log_prob(int action) const;
};

// Full first-phase pass: embed every remaining job DAG (3 stacked bottom-up
// sweeps with shared aggregators), summarize per job and globally, score the
// frontier and softmax. Throws EmptyFrontier when the snapshot has no
// candidates.
ActorEval actor_forward(const GnnParams& params, const GnnSnapshot& snapshot);

// Accumulates d[dlogp_weight * log P(action) + entropy_weight * H] / d(params)
// into grads. Consumes the eval's cache.
void actor_backward(const GnnParams& params, const GnnSnapshot& snapshot,
                    ActorEval& eval, int action, double dlogp_weight,
                    double entropy_weight, GnnGrads& grads);

// [global summary | normalized executor features]
Vec critic_input(const GnnParams& params, const Vec& global_summary,
                 const std::array<double, kExecFeatureDim>& exec_raw);

// Embeddings only, exposed for property tests: result[job][local] is the
// final per-node embedding.
std::vector<std::vector<Vec>> embed_jobs(const GnnParams& params,
                                         const GnnSnapshot& snapshot);

class GnnPolicy : public NodeSelector {
public:
    explicit GnnPolicy(GnnParams params, bool greedy = true)
        : params_(std::move(params)), greedy_(greedy) {}

    const char* name() const override { return "lachesis"; }
    Selection select(const SimState& state, Rng& rng) override;

    GnnParams& params() { return params_; }
    const GnnParams& params() const { return params_; }
    void set_greedy(bool greedy) { greedy_ = greedy; }
    bool greedy() const { return greedy_; }

private:
    GnnParams params_;
    bool greedy_;
};

// Versioned structured-text checkpoint; round-trips exactly.
void save_checkpoint(const GnnParams& params, const std::string& path);
GnnParams load_checkpoint(const std::string& path);

} // namespace lachesis
