#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lachesis/gnn.hpp"
#include "lachesis/io.hpp"
#include "lachesis/metrics.hpp"
#include "lachesis/policies.hpp"
#include "lachesis/trainer.hpp"
#include "lachesis/workload.hpp"

namespace fs = std::filesystem;
using namespace lachesis;

namespace {

SimMode parse_mode(const std::string& s) {
    if (s == "batch") return SimMode::Batch;
    if (s == "continuous") return SimMode::Continuous;
    throw CLI::ValidationError("--mode", "must be batch or continuous");
}

struct CommonRunFlags {
    std::string policy = "fifo";
    std::string mode = "batch";
    std::string cpeft = "recompute";
    std::string frontier = "assigned";
    bool greedy = false;
    std::string checkpoint;
};

void add_run_flags(CLI::App* cmd, CommonRunFlags& flags) {
    cmd->add_option("--policy", flags.policy, "fifo|sjf|hrrn|rankup|heft|lachesis")
        ->check(CLI::IsMember({"fifo", "sjf", "hrrn", "rankup", "heft", "lachesis"}));
    cmd->add_option("--mode", flags.mode, "batch|continuous")
        ->check(CLI::IsMember({"batch", "continuous"}));
    cmd->add_option("--cpeft", flags.cpeft, "duplication candidate pricing")
        ->check(CLI::IsMember({"literal", "recompute"}));
    cmd->add_option("--frontier", flags.frontier, "when tasks become selectable")
        ->check(CLI::IsMember({"assigned", "finished"}));
    cmd->add_flag("--greedy", flags.greedy, "argmax instead of sampling (lachesis)");
    cmd->add_option("--checkpoint", flags.checkpoint, "trained model for lachesis");
}

struct PolicyRun {
    MetricsReport report;
    std::vector<double> latencies_ms;
    std::string schedule;
    std::string trace;
};

PolicyRun run_policy(const std::string& policy_name, const CommonRunFlags& flags,
                     const TaskGraph& graph, const Cluster& cluster,
                     std::uint64_t run_seed) {
    SimConfig sim;
    sim.mode = parse_mode(flags.mode);
    sim.frontier =
        flags.frontier == "finished" ? FrontierMode::Finished : FrontierMode::Assigned;
    sim.cpeft = flags.cpeft == "literal" ? CpeftMode::Literal : CpeftMode::Recompute;
    sim.seed = run_seed;
    sim.measure_latency = true;

    std::unique_ptr<NodeSelector> policy;
    if (policy_name == "lachesis") {
        GnnParams params = flags.checkpoint.empty() ? GnnParams::create(run_seed)
                                                    : load_checkpoint(flags.checkpoint);
        params.freeze_norms();
        policy = std::make_unique<GnnPolicy>(std::move(params), flags.greedy);
    } else {
        policy = make_baseline(policy_name);
        if (policy_name == "heft") {
            sim.allocator = AllocatorKind::Eft;
            sim.frontier = FrontierMode::Assigned;
        }
    }

    RunResult result = run(graph, cluster, *policy, sim);
    PolicyRun out;
    out.report = compute_report(graph, cluster, result.schedule);
    out.latencies_ms = std::move(result.decision_latency_ms);
    out.schedule = schedule_csv(graph, result.schedule);
    out.trace = trace_csv(graph, result.trace);
    return out;
}

int cmd_generate(const WorkloadSpec& spec, const std::string& out) {
    save_workload(generate(spec), out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heterogeneous DAG scheduling toolkit"};
    app.require_subcommand(1);

    // generate
    WorkloadSpec gen_spec;
    std::string gen_mode = "batch";
    std::string gen_out = "workload.json";
    auto* gen = app.add_subcommand("generate", "write a synthetic workload file");
    gen->add_option("--shape", gen_spec.shape_id, "0 = mixed, 1..22 pins a shape")
        ->check(CLI::Range(0, kShapeCount));
    gen->add_option("--size", gen_spec.size_class, "size class: 2,5,10,50,80,100");
    gen->add_option("--jobs", gen_spec.n_jobs, "number of jobs");
    gen->add_option("--mode", gen_mode, "batch|continuous")
        ->check(CLI::IsMember({"batch", "continuous"}));
    gen->add_option("--seed", gen_spec.seed, "generator seed");
    gen->add_option("--arrival-mean", gen_spec.arrival_mean,
                    "mean inter-arrival gap (continuous)");
    gen->add_option("--out", gen_out, "output file")->required();

    // simulate
    CommonRunFlags sim_flags;
    std::string sim_workload, sim_cluster_file, sim_out = "out";
    WorkloadSpec sim_spec;
    std::size_t sim_executors = 4;
    double sim_bandwidth = 25.0;
    std::uint64_t sim_seed = 0;
    std::size_t sim_seeds = 1;
    auto* sim = app.add_subcommand("simulate", "schedule a workload and report metrics");
    add_run_flags(sim, sim_flags);
    sim->add_option("--workload", sim_workload, "workload file (else generated)");
    sim->add_option("--shape", sim_spec.shape_id)->check(CLI::Range(0, kShapeCount));
    sim->add_option("--size", sim_spec.size_class);
    sim->add_option("--jobs", sim_spec.n_jobs);
    sim->add_option("--cluster", sim_cluster_file, "cluster config file");
    sim->add_option("--executors", sim_executors, "executor count (no --cluster)");
    sim->add_option("--bandwidth", sim_bandwidth, "uniform bandwidth (no --cluster)");
    sim->add_option("--seed", sim_seed, "base seed");
    sim->add_option("--seeds", sim_seeds, "number of consecutive seeds to run");
    sim->add_option("--out", sim_out, "output directory")->required();

    // train
    TrainerConfig tr_config;
    std::string tr_workload, tr_out = "out";
    std::size_t tr_executors = 4;
    double tr_bandwidth = 25.0;
    std::string tr_frontier = "finished";
    std::string tr_cpeft = "recompute";
    auto* tr = app.add_subcommand("train", "actor-critic training loop");
    tr->add_option("--iterations", tr_config.iterations);
    tr->add_option("--rollouts", tr_config.rollouts);
    tr->add_option("--lr", tr_config.lr);
    tr->add_option("--critic-lr", tr_config.critic_lr);
    tr->add_option("--entropy", tr_config.entropy_coef);
    tr->add_option("--gamma", tr_config.discount);
    tr->add_option("--tau0", tr_config.tau_mean0, "initial mean episode length");
    tr->add_option("--tau-step", tr_config.tau_step, "episode length growth");
    tr->add_option("--seed", tr_config.seed);
    tr->add_option("--workload", tr_workload, "fixed workload file (else toy suite)");
    tr->add_option("--executors", tr_executors);
    tr->add_option("--bandwidth", tr_bandwidth);
    tr->add_option("--frontier", tr_frontier)
        ->check(CLI::IsMember({"assigned", "finished"}));
    tr->add_option("--cpeft", tr_cpeft)->check(CLI::IsMember({"literal", "recompute"}));
    tr->add_option("--out", tr_out, "output directory")->required();

    // compare
    CommonRunFlags cmp_flags;
    std::vector<std::string> cmp_policies;
    WorkloadSpec cmp_spec;
    std::string cmp_out = "out";
    std::size_t cmp_executors = 4;
    double cmp_bandwidth = 25.0;
    std::uint64_t cmp_seed = 0;
    std::size_t cmp_seeds = 3;
    auto* cmp = app.add_subcommand("compare", "run several policies on shared workloads");
    add_run_flags(cmp, cmp_flags);
    cmp->add_option("--policies", cmp_policies, "two or more policy names")
        ->required()
        ->delimiter(',');
    cmp->add_option("--shape", cmp_spec.shape_id)->check(CLI::Range(0, kShapeCount));
    cmp->add_option("--size", cmp_spec.size_class);
    cmp->add_option("--jobs", cmp_spec.n_jobs);
    cmp->add_option("--executors", cmp_executors);
    cmp->add_option("--bandwidth", cmp_bandwidth);
    cmp->add_option("--seed", cmp_seed, "base seed");
    cmp->add_option("--seeds", cmp_seeds, "number of consecutive seeds");
    cmp->add_option("--out", cmp_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            gen_spec.mode = parse_mode(gen_mode);
            return cmd_generate(gen_spec, gen_out);
        }

        if (*sim) {
            fs::create_directories(sim_out);
            sim_spec.mode = parse_mode(sim_flags.mode);
            std::string metrics_rows =
                "seed,policy,mode,n_jobs,makespan,speedup,slr,decisions,duplicates\n";
            std::string latency_rows = "seed,policy,p50_ms,p98_ms,max_ms,samples\n";
            std::vector<MetricsReport> reports;
            for (std::size_t i = 0; i < sim_seeds; ++i) {
                const std::uint64_t run_seed = sim_seed + i;
                std::vector<Job> jobs;
                if (!sim_workload.empty()) {
                    jobs = load_workload(sim_workload);
                } else {
                    WorkloadSpec spec = sim_spec;
                    spec.seed = run_seed;
                    jobs = generate(spec);
                }
                Cluster cluster = [&] {
                    if (!sim_cluster_file.empty()) {
                        return make_cluster(load_cluster_config(sim_cluster_file));
                    }
                    ClusterConfig cc;
                    cc.n_executors = sim_executors;
                    cc.uniform_bandwidth = sim_bandwidth;
                    cc.seed = run_seed;
                    return make_cluster(cc);
                }();
                TaskGraph graph(std::move(jobs), cluster.mean_speed(),
                                cluster.comm.mean_bandwidth());

                PolicyRun pr =
                    run_policy(sim_flags.policy, sim_flags, graph, cluster, run_seed);
                const std::string tag = std::to_string(run_seed);
                atomic_write_text(sim_out + "/schedule_" + tag + ".csv", pr.schedule);
                atomic_write_text(sim_out + "/trace_" + tag + ".csv", pr.trace);
                metrics_rows += tag + ',' + sim_flags.policy + ',' + sim_flags.mode +
                                ',' + std::to_string(graph.job_count()) + ',' +
                                fmt_double(pr.report.makespan) + ',' +
                                fmt_double(pr.report.speedup) + ',' +
                                fmt_double(pr.report.slr) + ',' +
                                std::to_string(pr.report.n_tasks) + ',' +
                                std::to_string(pr.report.n_duplicates) + '\n';
                const LatencyStats ls = latency_stats(pr.latencies_ms);
                latency_rows += tag + ',' + sim_flags.policy + ',' + fmt_double(ls.p50) +
                                ',' + fmt_double(ls.p98) + ',' + fmt_double(ls.max) +
                                ',' + std::to_string(pr.latencies_ms.size()) + '\n';
                reports.push_back(pr.report);
            }
            atomic_write_text(sim_out + "/metrics.csv", metrics_rows);
            atomic_write_text(sim_out + "/latency.csv", latency_rows);

            auto mean_of = [&](auto field) {
                double sum = 0.0;
                for (const MetricsReport& r : reports) sum += field(r);
                return sum / static_cast<double>(reports.size());
            };
            std::string summary = "{\n  \"policy\": \"" + sim_flags.policy +
                                  "\",\n  \"mode\": \"" + sim_flags.mode +
                                  "\",\n  \"runs\": " + std::to_string(reports.size()) +
                                  ",\n  \"mean_makespan\": " +
                                  fmt_double(mean_of([](const MetricsReport& r) {
                                      return r.makespan;
                                  })) +
                                  ",\n  \"mean_speedup\": " +
                                  fmt_double(mean_of([](const MetricsReport& r) {
                                      return r.speedup;
                                  })) +
                                  ",\n  \"mean_slr\": " +
                                  fmt_double(mean_of([](const MetricsReport& r) {
                                      return r.slr;
                                  })) +
                                  "\n}\n";
            atomic_write_text(sim_out + "/summary.json", summary);
            std::cout << "wrote " << sim_out << "/metrics.csv\n";
            return 0;
        }

        if (*tr) {
            fs::create_directories(tr_out);
            tr_config.frontier = tr_frontier == "assigned" ? FrontierMode::Assigned
                                                           : FrontierMode::Finished;
            tr_config.cpeft =
                tr_cpeft == "literal" ? CpeftMode::Literal : CpeftMode::Recompute;

            std::vector<std::uint64_t> cluster_seeds;
            for (std::uint64_t s = 0; s < 10; ++s) {
                cluster_seeds.push_back(derive_seed(tr_config.seed, 0xc1 + s));
            }
            EnvSampler env;
            if (tr_workload.empty()) {
                env = toy_env_sampler(tr_executors, tr_bandwidth, cluster_seeds);
            } else {
                const std::vector<Job> jobs = load_workload(tr_workload);
                env = [jobs, tr_executors, tr_bandwidth,
                       cluster_seeds](std::size_t iteration, std::uint64_t) {
                    ClusterConfig cc;
                    cc.n_executors = tr_executors;
                    cc.uniform_bandwidth = tr_bandwidth;
                    cc.seed = cluster_seeds[iteration % cluster_seeds.size()];
                    Cluster cluster = make_cluster(cc);
                    TaskGraph graph(jobs, cluster.mean_speed(),
                                    cluster.comm.mean_bandwidth());
                    return std::make_pair(std::move(graph), std::move(cluster));
                };
            }

            const TrainResult result = train(tr_config, env);
            save_checkpoint(result.params, tr_out + "/checkpoint.json");
            std::string curve = "iteration,actor_loss,critic_loss,mean_return,tau_mean\n";
            for (const IterationStats& row : result.curve) {
                curve += std::to_string(row.iteration) + ',' +
                         fmt_double(row.actor_loss) + ',' + fmt_double(row.critic_loss) +
                         ',' + fmt_double(row.mean_return) + ',' +
                         fmt_double(row.tau_mean) + '\n';
            }
            atomic_write_text(tr_out + "/curve.csv", curve);
            std::cout << "wrote " << tr_out << "/checkpoint.json\n";
            return 0;
        }

        if (*cmp) {
            if (cmp_policies.size() < 2) {
                std::cerr << "compare needs at least two policies\n";
                return 2;
            }
            if (cmp_flags.mode == "continuous") {
                for (const std::string& p : cmp_policies) {
                    if (p == "heft") {
                        std::cerr << "heft only supports batch mode\n";
                        return 2;
                    }
                }
            }
            fs::create_directories(cmp_out);
            cmp_spec.mode = parse_mode(cmp_flags.mode);
            std::string rows = "policy,n_jobs,seed,makespan,speedup,slr\n";
            std::string lat_rows = "policy,n_jobs,seed,p50_ms,p98_ms,max_ms\n";
            std::map<std::string, std::vector<MetricsReport>> by_policy;
            for (std::size_t i = 0; i < cmp_seeds; ++i) {
                const std::uint64_t run_seed = cmp_seed + i;
                WorkloadSpec spec = cmp_spec;
                spec.seed = run_seed;
                ClusterConfig cc;
                cc.n_executors = cmp_executors;
                cc.uniform_bandwidth = cmp_bandwidth;
                cc.seed = run_seed;
                const Cluster cluster = make_cluster(cc);
                const TaskGraph graph(generate(spec), cluster.mean_speed(),
                                      cluster.comm.mean_bandwidth());
                for (const std::string& policy : cmp_policies) {
                    PolicyRun pr = run_policy(policy, cmp_flags, graph, cluster, run_seed);
                    rows += policy + ',' + std::to_string(graph.job_count()) + ',' +
                            std::to_string(run_seed) + ',' +
                            fmt_double(pr.report.makespan) + ',' +
                            fmt_double(pr.report.speedup) + ',' +
                            fmt_double(pr.report.slr) + '\n';
                    const LatencyStats ls = latency_stats(pr.latencies_ms);
                    lat_rows += policy + ',' + std::to_string(graph.job_count()) + ',' +
                                std::to_string(run_seed) + ',' + fmt_double(ls.p50) +
                                ',' + fmt_double(ls.p98) + ',' + fmt_double(ls.max) +
                                '\n';
                    by_policy[policy].push_back(pr.report);
                }
            }
            std::string agg = "policy,n_jobs,seeds,mean_makespan,mean_speedup,mean_slr\n";
            for (const std::string& policy : cmp_policies) {
                const auto& rs = by_policy[policy];
                double ms = 0, sp = 0, sl = 0;
                for (const MetricsReport& r : rs) {
                    ms += r.makespan;
                    sp += r.speedup;
                    sl += r.slr;
                }
                const double n = static_cast<double>(rs.size());
                agg += policy + ',' + std::to_string(cmp_spec.n_jobs) + ',' +
                       std::to_string(rs.size()) + ',' + fmt_double(ms / n) + ',' +
                       fmt_double(sp / n) + ',' + fmt_double(sl / n) + '\n';
            }
            atomic_write_text(cmp_out + "/compare.csv", rows);
            atomic_write_text(cmp_out + "/compare_summary.csv", agg);
            atomic_write_text(cmp_out + "/compare_latency.csv", lat_rows);
            std::cout << "wrote " << cmp_out << "/compare.csv\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
