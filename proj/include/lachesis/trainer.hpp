#pragma once

#include <functional>

#include "lachesis/gnn.hpp"
#include "lachesis/workload.hpp"

namespace lachesis {

struct TrainerConfig {
    std::size_t iterations = 500;
    std::size_t rollouts = 4;
    double lr = 1e-3;
    double critic_lr = 1e-3;
    double discount = 1.0; // undiscounted matches the time-average objective
    double tau_mean0 = 50.0;
    double tau_step = 5.0;
    double entropy_coef = 0.01;
    double max_grad_norm = 10.0; // global-norm clip; 0 disables
    std::uint64_t seed = 0;
    FrontierMode frontier = FrontierMode::Finished;
    CpeftMode cpeft = CpeftMode::Recompute;
};

// Produces the environment for one iteration. Deterministic in
// (iteration, seed).
using EnvSampler =
    std::function<std::pair<TaskGraph, Cluster>(std::size_t iteration, std::uint64_t seed)>;

// Env sampler over the frozen toy suite with a small cluster whose seed
// rotates through `cluster_seeds`.
EnvSampler toy_env_sampler(std::size_t n_executors, double bandwidth,
                           std::vector<std::uint64_t> cluster_seeds);

// One sampled rollout truncated after tau decisions; snapshots recorded.
EpisodeTrace run_episode(const GnnParams& params, const TaskGraph& graph,
                         const Cluster& cluster, std::size_t tau,
                         const TrainerConfig& config, std::uint64_t episode_seed);

struct UpdateStats {
    double actor_loss{};
    double critic_loss{};
    double mean_return{};
    std::size_t steps{};
};

// Synchronous advantage actor-critic update over the collected traces:
// one-step bootstrap targets for the critic, policy-gradient ascent weighted
// by the advantage for the actor. Throws NonFiniteGradient.
UpdateStats update(GnnParams& params, const std::vector<EpisodeTrace>& traces,
                   const TrainerConfig& config);

struct IterationStats {
    std::size_t iteration{};
    double actor_loss{};
    double critic_loss{};
    double mean_return{};
    double tau_mean{};
};

struct TrainResult {
    GnnParams params;
    std::vector<IterationStats> curve;
};

// Full loop: per iteration sample an environment, sample the episode length,
// run parallel rollouts, apply one update, grow the episode-length mean.
TrainResult train(const TrainerConfig& config, const EnvSampler& env);

} // namespace lachesis
