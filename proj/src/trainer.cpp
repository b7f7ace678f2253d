#include "lachesis/trainer.hpp"

#include <cmath>
#include <thread>

namespace lachesis {

EnvSampler toy_env_sampler(std::size_t n_executors, double bandwidth,
                           std::vector<std::uint64_t> cluster_seeds) {
    return [n_executors, bandwidth,
            seeds = std::move(cluster_seeds)](std::size_t iteration, std::uint64_t) {
        ClusterConfig cc;
        cc.n_executors = n_executors;
        cc.uniform_bandwidth = bandwidth;
        cc.seed = seeds.empty() ? 0 : seeds[iteration % seeds.size()];
        Cluster cluster = make_cluster(cc);
        TaskGraph graph(toy_training_jobs(), cluster.mean_speed(),
                        cluster.comm.mean_bandwidth());
        return std::make_pair(std::move(graph), std::move(cluster));
    };
}

EpisodeTrace run_episode(const GnnParams& params, const TaskGraph& graph,
                         const Cluster& cluster, std::size_t tau,
                         const TrainerConfig& config, std::uint64_t episode_seed) {
    if (tau == 0) {
        throw InvalidSpec("episode length must be at least 1");
    }
    GnnPolicy policy(params, /*greedy=*/false);

    SimConfig sim;
    sim.mode = SimMode::Batch;
    for (const Job& j : graph.jobs()) {
        if (j.arrival_time() > 0.0) sim.mode = SimMode::Continuous;
    }
    sim.frontier = config.frontier;
    sim.allocator = AllocatorKind::Deft;
    sim.cpeft = config.cpeft;
    sim.seed = episode_seed;
    sim.max_decisions = tau;
    sim.record_snapshots = true;
    sim.validate = false;

    return run(graph, cluster, policy, sim).trace;
}

UpdateStats update(GnnParams& params, const std::vector<EpisodeTrace>& traces,
                   const TrainerConfig& config) {
    if (traces.empty()) {
        throw InvalidSpec("update needs at least one trace");
    }

    GnnGrads grads = GnnGrads::zeros_like(params);
    UpdateStats stats;

    std::size_t total_steps = 0;
    for (const EpisodeTrace& trace : traces) total_steps += trace.steps.size();
    if (total_steps == 0) {
        throw InvalidSpec("traces contain no decisions");
    }
    // Actor gradients accumulate over an episode's steps and average across
    // rollouts; the critic regresses with a per-step mean.
    const double inv_rollouts = 1.0 / static_cast<double>(traces.size());
    const double inv_n = 1.0 / static_cast<double>(total_steps);

    for (const EpisodeTrace& trace : traces) {
        if (trace.snapshots.size() != trace.steps.size()) {
            throw TapeMismatch("trace is missing decision snapshots");
        }
        const std::size_t n = trace.steps.size();

        std::vector<ActorEval> evals;
        evals.reserve(n);
        std::vector<GradTape> critic_tapes(n);
        std::vector<double> values(n);
        for (std::size_t k = 0; k < n; ++k) {
            evals.push_back(actor_forward(params, trace.snapshots[k]));
            const double replayed = evals[k].log_prob(trace.snapshots[k].action);
            if (std::abs(replayed - trace.steps[k].log_prob) > 1e-6) {
                throw TapeMismatch("replayed action probability diverged from rollout");
            }
            const Vec in = critic_input(params, evals[k].global_summary,
                                        trace.snapshots[k].exec_features);
            values[k] = params.critic.forward(in, critic_tapes[k])[0];
        }

        for (std::size_t k = 0; k < n; ++k) {
            const double next_value = k + 1 < n ? values[k + 1] : 0.0;
            const double target = trace.steps[k].reward + config.discount * next_value;
            const double advantage = target - values[k];

            actor_backward(params, trace.snapshots[k], evals[k],
                           trace.snapshots[k].action, advantage * inv_rollouts,
                           config.entropy_coef * inv_rollouts, grads);
            stats.actor_loss -= trace.steps[k].log_prob * advantage * inv_rollouts;

            const double err = values[k] - target;
            stats.critic_loss += err * err * inv_n;
            backward(params.critic, critic_tapes[k], {2.0 * err * inv_n}, grads.critic);
        }
        stats.mean_return += trace.total_reward() / static_cast<double>(traces.size());
    }
    stats.steps = total_steps;

    if (!grads.finite()) {
        throw NonFiniteGradient("non-finite gradient after " +
                                std::to_string(total_steps) + " steps");
    }

    double actor_lr = config.lr;
    double critic_lr = config.critic_lr;
    if (config.max_grad_norm > 0.0) {
        const double an = grads.actor_norm();
        if (an > config.max_grad_norm) actor_lr *= config.max_grad_norm / an;
        const double cn = grads.critic_norm();
        if (cn > config.max_grad_norm) critic_lr *= config.max_grad_norm / cn;
    }

    sgd_step(params.child_agg, grads.child_agg, actor_lr, +1.0);
    sgd_step(params.edge_agg, grads.edge_agg, actor_lr, +1.0);
    sgd_step(params.job_net, grads.job_net, actor_lr, +1.0);
    sgd_step(params.global_net, grads.global_net, actor_lr, +1.0);
    sgd_step(params.score_head, grads.score_head, actor_lr, +1.0);
    sgd_step(params.critic, grads.critic, critic_lr, -1.0);

    // Feature statistics advance only after the gradients are applied, so the
    // replayed forward passes above saw exactly what the rollouts saw.
    for (const EpisodeTrace& trace : traces) {
        for (const GnnSnapshot& snap : trace.snapshots) {
            for (const JobSnapshot& js : snap.jobs) {
                params.job_norm.observe(js.attrs.data(), kJobAttrDim);
                for (const auto& x : js.node_features) {
                    params.node_norm.observe(x.data(), kNodeFeatureDim);
                }
                for (const SnapshotEdge& e : js.edges) {
                    params.edge_norm.observe(e.features.data(), kEdgeFeatureDim);
                }
            }
            params.exec_norm.observe(snap.exec_features.data(), kExecFeatureDim);
        }
    }
    return stats;
}

TrainResult train(const TrainerConfig& config, const EnvSampler& env) {
    TrainResult result;
    result.params = GnnParams::create(config.seed);
    result.curve.reserve(config.iterations);

    double tau_mean = config.tau_mean0;
    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        const auto [graph, cluster] = env(iter, derive_seed(config.seed, 2 * iter + 1));

        Rng tau_rng(derive_seed(config.seed, 0x7a00 + iter));
        const std::size_t tau = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(tau_rng.exponential(tau_mean))));

        std::vector<EpisodeTrace> traces(config.rollouts);
        std::vector<std::exception_ptr> errors(config.rollouts);
        std::vector<std::thread> workers;
        workers.reserve(config.rollouts);
        for (std::size_t r = 0; r < config.rollouts; ++r) {
            workers.emplace_back([&, r] {
                try {
                    traces[r] = run_episode(result.params, graph, cluster, tau, config,
                                            derive_seed(config.seed, iter * 131 + r));
                } catch (...) {
                    errors[r] = std::current_exception();
                }
            });
        }
        for (std::thread& w : workers) w.join();
        for (const std::exception_ptr& err : errors) {
            if (err) std::rethrow_exception(err);
        }

        const UpdateStats stats = update(result.params, traces, config);
        result.curve.push_back(
            {iter, stats.actor_loss, stats.critic_loss, stats.mean_return, tau_mean});
        tau_mean += config.tau_step;
    }
    return result;
}

} // namespace lachesis
