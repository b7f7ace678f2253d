#pragma once

#include <string>
#include <vector>

#include "lachesis/cluster.hpp"
#include "lachesis/dag.hpp"
#include "lachesis/metrics.hpp"
#include "lachesis/simulator.hpp"

namespace lachesis {

// Shortest round-trip decimal representation; used everywhere a double is
// written out so repeated runs emit byte-identical files.
std::string fmt_double(double v);

// Write to <path>.tmp then rename.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Workload files: a top-level list of jobs, each
// {id, arrival_time, nodes: [{id, work}], edges: [{src, dst, data}]}.
std::string workload_to_json(const std::vector<Job>& jobs);
std::vector<Job> workload_from_json(const std::string& text);
void save_workload(const std::vector<Job>& jobs, const std::string& path);
std::vector<Job> load_workload(const std::string& path);

// Cluster config: {n_executors, speed_table, uniform_bandwidth, seed}.
std::string cluster_config_to_json(const ClusterConfig& config);
ClusterConfig cluster_config_from_json(const std::string& text);
void save_cluster_config(const ClusterConfig& config, const std::string& path);
ClusterConfig load_cluster_config(const std::string& path);

// Per-placement rows: job,node,executor,ast,aft,is_duplicate.
std::string schedule_csv(const TaskGraph& graph, const ScheduleRecord& schedule);

// Per-decision rows: step,t,reward,job,node,log_prob.
std::string trace_csv(const TaskGraph& graph, const EpisodeTrace& trace);

} // namespace lachesis
