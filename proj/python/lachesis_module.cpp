#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lachesis/gnn.hpp"
#include "lachesis/io.hpp"
#include "lachesis/metrics.hpp"
#include "lachesis/policies.hpp"
#include "lachesis/trainer.hpp"
#include "lachesis/workload.hpp"

namespace py = pybind11;
using namespace lachesis;

namespace {

SimMode mode_from_string(const std::string& s) {
    if (s == "batch") return SimMode::Batch;
    if (s == "continuous") return SimMode::Continuous;
    throw InvalidSpec("mode must be 'batch' or 'continuous'");
}

std::vector<Job> py_generate(int shape_id, int size_class, std::size_t n_jobs,
                             const std::string& mode, std::uint64_t seed) {
    WorkloadSpec spec;
    spec.shape_id = shape_id;
    spec.size_class = size_class;
    spec.n_jobs = n_jobs;
    spec.mode = mode_from_string(mode);
    spec.seed = seed;
    return generate(spec);
}

Cluster py_make_cluster(std::size_t n_executors, double bandwidth, std::uint64_t seed,
                        const std::vector<double>& speed_table) {
    ClusterConfig cc;
    cc.n_executors = n_executors;
    cc.uniform_bandwidth = bandwidth;
    cc.seed = seed;
    cc.speed_table = speed_table;
    return make_cluster(cc);
}

py::dict py_simulate(const std::vector<Job>& jobs, const Cluster& cluster,
                     const std::string& policy_name, const std::string& mode,
                     const std::string& cpeft, const std::string& frontier, bool greedy,
                     std::uint64_t seed, const std::string& checkpoint) {
    TaskGraph graph(jobs, cluster.mean_speed(), cluster.comm.mean_bandwidth());

    SimConfig config;
    config.mode = mode_from_string(mode);
    config.cpeft = cpeft == "literal" ? CpeftMode::Literal : CpeftMode::Recompute;
    config.frontier =
        frontier == "finished" ? FrontierMode::Finished : FrontierMode::Assigned;
    config.seed = seed;

    std::unique_ptr<NodeSelector> policy;
    if (policy_name == "lachesis") {
        GnnParams params =
            checkpoint.empty() ? GnnParams::create(seed) : load_checkpoint(checkpoint);
        params.freeze_norms();
        policy = std::make_unique<GnnPolicy>(std::move(params), greedy);
    } else {
        policy = make_baseline(policy_name);
        if (policy_name == "heft") {
            config.allocator = AllocatorKind::Eft;
            config.frontier = FrontierMode::Assigned;
        }
    }

    const RunResult result = run(graph, cluster, *policy, config);
    const MetricsReport report = compute_report(graph, cluster, result.schedule);

    py::list placements;
    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        for (const Placement& p : result.schedule.placements(t)) {
            py::dict row;
            row["job"] = graph.job_id_of(t);
            row["node"] = graph.node_id_of(t);
            row["executor"] = p.executor;
            row["ast"] = p.ast;
            row["aft"] = p.aft;
            row["is_duplicate"] = p.is_duplicate;
            placements.append(std::move(row));
        }
    }

    py::dict out;
    out["makespan"] = report.makespan;
    out["speedup"] = report.speedup;
    out["slr"] = report.slr;
    out["job_slr"] = report.job_slr;
    out["n_duplicates"] = report.n_duplicates;
    out["placements"] = std::move(placements);
    return out;
}

py::dict py_train(std::size_t iterations, std::size_t rollouts, double lr,
                  std::uint64_t seed, std::size_t n_executors, double bandwidth,
                  const std::string& checkpoint_out) {
    TrainerConfig config;
    config.iterations = iterations;
    config.rollouts = rollouts;
    config.lr = lr;
    config.critic_lr = lr;
    config.seed = seed;

    std::vector<std::uint64_t> cluster_seeds;
    for (std::uint64_t s = 0; s < 10; ++s) {
        cluster_seeds.push_back(derive_seed(seed, 0xc1 + s));
    }
    const TrainResult result =
        train(config, toy_env_sampler(n_executors, bandwidth, cluster_seeds));
    if (!checkpoint_out.empty()) save_checkpoint(result.params, checkpoint_out);

    py::list returns;
    for (const IterationStats& row : result.curve) returns.append(row.mean_return);
    py::dict out;
    out["mean_returns"] = std::move(returns);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "heterogeneous DAG scheduling simulator and policies";
    m.attr("__version__") = "0.1.0";

    py::class_<TaskNode>(m, "TaskNode")
        .def(py::init([](NodeId id, double work) {
                 return TaskNode{id, 0, work, TaskStatus::Unassigned};
             }),
             py::arg("id"), py::arg("work"))
        .def_readonly("id", &TaskNode::id)
        .def_readonly("work", &TaskNode::computation_size);

    py::class_<Edge>(m, "Edge")
        .def(py::init([](NodeId src, NodeId dst, double data) {
                 return Edge{src, dst, data};
             }),
             py::arg("src"), py::arg("dst"), py::arg("data"))
        .def_readonly("src", &Edge::src)
        .def_readonly("dst", &Edge::dst)
        .def_readonly("data", &Edge::data_size);

    py::class_<Job>(m, "Job")
        .def_static(
            "build",
            [](JobId id, const std::vector<TaskNode>& nodes,
               const std::vector<Edge>& edges, double arrival) {
                return Job::build(id, nodes, edges, arrival);
            },
            py::arg("id"), py::arg("nodes"), py::arg("edges"),
            py::arg("arrival_time") = 0.0)
        .def_property_readonly("id", &Job::id)
        .def_property_readonly("arrival_time", &Job::arrival_time)
        .def("__len__", &Job::size)
        .def("__eq__", [](const Job& a, const Job& b) { return a == b; });

    py::class_<Cluster>(m, "Cluster")
        .def("__len__", &Cluster::size)
        .def_property_readonly("mean_speed", &Cluster::mean_speed)
        .def_property_readonly("max_speed", &Cluster::max_speed)
        .def("speed", &Cluster::speed);

    m.def("generate", &py_generate, py::arg("shape_id") = 0, py::arg("size_class") = 2,
          py::arg("n_jobs") = 1, py::arg("mode") = "batch", py::arg("seed") = 0,
          "Generate a seeded synthetic workload");
    m.def("save_workload", &save_workload, py::arg("jobs"), py::arg("path"));
    m.def("load_workload", &load_workload, py::arg("path"));
    m.def("make_cluster", &py_make_cluster, py::arg("n_executors"),
          py::arg("bandwidth") = 25.0, py::arg("seed") = 0,
          py::arg("speed_table") = std::vector<double>{});
    m.def("rank_up", &compute_rank_up, py::arg("job"), py::arg("mean_speed"),
          py::arg("mean_bandwidth"));
    m.def("rank_down", &compute_rank_down, py::arg("job"), py::arg("mean_speed"),
          py::arg("mean_bandwidth"));
    m.def("critical_path_lower_bound", &critical_path_lower_bound, py::arg("job"),
          py::arg("fastest_speed"));
    m.def("simulate", &py_simulate, py::arg("jobs"), py::arg("cluster"),
          py::arg("policy") = "fifo", py::arg("mode") = "batch",
          py::arg("cpeft") = "recompute", py::arg("frontier") = "assigned",
          py::arg("greedy") = true, py::arg("seed") = 0, py::arg("checkpoint") = "",
          "Schedule a workload and return metrics plus placements");
    m.def("train", &py_train, py::arg("iterations") = 10, py::arg("rollouts") = 2,
          py::arg("lr") = 1e-3, py::arg("seed") = 0, py::arg("n_executors") = 4,
          py::arg("bandwidth") = 25.0, py::arg("checkpoint_out") = "",
          "Short actor-critic training run on the toy suite");

    py::register_exception<SchedulerError>(m, "SchedulerError");
}
