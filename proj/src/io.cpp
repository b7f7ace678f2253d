#include "lachesis/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "lachesis/gnn.hpp"

namespace lachesis {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json parse_or_throw(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

double require_number(const json& j, const char* field, const std::string& ctx) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw ParseError(ctx + ": missing or non-numeric field '" + field + "'");
    }
    return j[field].get<double>();
}

} // namespace

std::string workload_to_json(const std::vector<Job>& jobs) {
    json root = json::array();
    for (const Job& job : jobs) {
        json nodes = json::array();
        for (const TaskNode& n : job.nodes()) {
            nodes.push_back({{"id", n.id}, {"work", n.computation_size}});
        }
        json edges = json::array();
        for (const Edge& e : job.edges()) {
            edges.push_back({{"src", e.src}, {"dst", e.dst}, {"data", e.data_size}});
        }
        root.push_back({{"id", job.id()},
                        {"arrival_time", job.arrival_time()},
                        {"nodes", std::move(nodes)},
                        {"edges", std::move(edges)}});
    }
    return root.dump(2) + "\n";
}

std::vector<Job> workload_from_json(const std::string& text) {
    const json root = parse_or_throw(text, "workload");
    if (!root.is_array()) {
        throw ParseError("workload: top level must be a list of jobs");
    }
    std::vector<Job> jobs;
    jobs.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& j = root[i];
        const std::string ctx = "workload job[" + std::to_string(i) + "]";
        const JobId id = static_cast<JobId>(require_number(j, "id", ctx));
        const double arrival = require_number(j, "arrival_time", ctx);
        if (!j.contains("nodes") || !j["nodes"].is_array()) {
            throw ParseError(ctx + ": missing 'nodes' list");
        }
        std::vector<TaskNode> nodes;
        for (const json& n : j["nodes"]) {
            nodes.push_back({static_cast<NodeId>(require_number(n, "id", ctx + " node")),
                             id, require_number(n, "work", ctx + " node"),
                             TaskStatus::Unassigned});
        }
        std::vector<Edge> edges;
        if (j.contains("edges")) {
            if (!j["edges"].is_array()) throw ParseError(ctx + ": 'edges' must be a list");
            for (const json& e : j["edges"]) {
                edges.push_back(
                    {static_cast<NodeId>(require_number(e, "src", ctx + " edge")),
                     static_cast<NodeId>(require_number(e, "dst", ctx + " edge")),
                     require_number(e, "data", ctx + " edge")});
            }
        }
        jobs.push_back(Job::build(id, std::move(nodes), std::move(edges), arrival));
    }
    return jobs;
}

void save_workload(const std::vector<Job>& jobs, const std::string& path) {
    atomic_write_text(path, workload_to_json(jobs));
}

std::vector<Job> load_workload(const std::string& path) {
    return workload_from_json(read_text(path));
}

std::string cluster_config_to_json(const ClusterConfig& config) {
    json j = {{"n_executors", config.n_executors},
              {"speed_table",
               config.speed_table.empty() ? default_speed_table() : config.speed_table},
              {"uniform_bandwidth", config.uniform_bandwidth},
              {"seed", config.seed}};
    return j.dump(2) + "\n";
}

ClusterConfig cluster_config_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "cluster config");
    ClusterConfig config;
    config.n_executors =
        static_cast<std::size_t>(require_number(j, "n_executors", "cluster config"));
    config.uniform_bandwidth = require_number(j, "uniform_bandwidth", "cluster config");
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("speed_table")) {
        if (!j["speed_table"].is_array()) {
            throw ParseError("cluster config: 'speed_table' must be a list");
        }
        config.speed_table = j["speed_table"].get<std::vector<double>>();
    }
    return config;
}

void save_cluster_config(const ClusterConfig& config, const std::string& path) {
    atomic_write_text(path, cluster_config_to_json(config));
}

ClusterConfig load_cluster_config(const std::string& path) {
    return cluster_config_from_json(read_text(path));
}

std::string schedule_csv(const TaskGraph& graph, const ScheduleRecord& schedule) {
    std::string out = "job,node,executor,ast,aft,is_duplicate\n";
    for (TaskIndex t = 0; t < graph.task_count(); ++t) {
        for (const Placement& p : schedule.placements(t)) {
            out += std::to_string(graph.job_id_of(t)) + ',' +
                   std::to_string(graph.node_id_of(t)) + ',' +
                   std::to_string(p.executor) + ',' + fmt_double(p.ast) + ',' +
                   fmt_double(p.aft) + ',' + (p.is_duplicate ? "1" : "0") + '\n';
        }
    }
    return out;
}

std::string trace_csv(const TaskGraph& graph, const EpisodeTrace& trace) {
    std::string out = "step,t,reward,job,node,log_prob\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const DecisionStep& s = trace.steps[k];
        out += std::to_string(k) + ',' + fmt_double(s.t) + ',' + fmt_double(s.reward) +
               ',' + std::to_string(graph.job_id_of(s.task)) + ',' +
               std::to_string(graph.node_id_of(s.task)) + ',' +
               fmt_double(s.log_prob) + '\n';
    }
    return out;
}

namespace {

json net_to_json(const DenseNet& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.w.size(); ++l) {
        layers.push_back({{"rows", net.w[l].rows},
                          {"cols", net.w[l].cols},
                          {"w", net.w[l].a},
                          {"b", net.b[l]}});
    }
    return {{"dims", net.dims}, {"leak", net.leak}, {"layers", std::move(layers)}};
}

DenseNet net_from_json(const json& j, const std::string& name) {
    DenseNet net;
    try {
        net.dims = j.at("dims").get<std::vector<std::size_t>>();
        net.leak = j.at("leak").get<double>();
        for (const json& layer : j.at("layers")) {
            Matrix m(layer.at("rows").get<std::size_t>(),
                     layer.at("cols").get<std::size_t>());
            m.a = layer.at("w").get<std::vector<double>>();
            if (m.a.size() != m.rows * m.cols) {
                throw ParseError("checkpoint: weight shape mismatch in " + name);
            }
            net.w.push_back(std::move(m));
            net.b.push_back(layer.at("b").get<Vec>());
        }
    } catch (const json::exception& e) {
        throw ParseError("checkpoint net '" + name + "': " + e.what());
    }
    return net;
}

json norm_to_json(const RunningNorm& n) {
    return {{"count", n.count()}, {"mean", n.mean()}, {"m2", n.m2()},
            {"frozen", n.frozen()}};
}

void norm_from_json(const json& j, RunningNorm& n, const std::string& name) {
    try {
        n.restore(j.at("count").get<std::uint64_t>(), j.at("mean").get<Vec>(),
                  j.at("m2").get<Vec>());
        if (j.value("frozen", false)) n.freeze();
    } catch (const json::exception& e) {
        throw ParseError("checkpoint norm '" + name + "': " + e.what());
    }
}

} // namespace

void save_checkpoint(const GnnParams& params, const std::string& path) {
    json j = {{"version", 1},
              {"nets",
               {{"child_agg", net_to_json(params.child_agg)},
                {"edge_agg", net_to_json(params.edge_agg)},
                {"job_net", net_to_json(params.job_net)},
                {"global_net", net_to_json(params.global_net)},
                {"score_head", net_to_json(params.score_head)},
                {"critic", net_to_json(params.critic)}}},
              {"norms",
               {{"node", norm_to_json(params.node_norm)},
                {"edge", norm_to_json(params.edge_norm)},
                {"exec", norm_to_json(params.exec_norm)},
                {"job", norm_to_json(params.job_norm)}}}};
    atomic_write_text(path, j.dump(2) + "\n");
}

GnnParams load_checkpoint(const std::string& path) {
    const json j = parse_or_throw(read_text(path), "checkpoint");
    if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw ParseError("checkpoint: unsupported version");
    }
    GnnParams params;
    const json& nets = j.at("nets");
    params.child_agg = net_from_json(nets.at("child_agg"), "child_agg");
    params.edge_agg = net_from_json(nets.at("edge_agg"), "edge_agg");
    params.job_net = net_from_json(nets.at("job_net"), "job_net");
    params.global_net = net_from_json(nets.at("global_net"), "global_net");
    params.score_head = net_from_json(nets.at("score_head"), "score_head");
    params.critic = net_from_json(nets.at("critic"), "critic");
    const json& norms = j.at("norms");
    norm_from_json(norms.at("node"), params.node_norm, "node");
    norm_from_json(norms.at("edge"), params.edge_norm, "edge");
    norm_from_json(norms.at("exec"), params.exec_norm, "exec");
    norm_from_json(norms.at("job"), params.job_norm, "job");
    return params;
}

} // namespace lachesis
