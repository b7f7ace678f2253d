#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lachesis/types.hpp"

namespace lachesis {

// remaining exec time, avg incoming data time, avg outgoing data time,
// rank_up, rank_down, job left-task count, job left exec-time sum
inline constexpr std::size_t kNodeFeatureDim = 7;
// edge data size, edge mean transfer time
inline constexpr std::size_t kEdgeFeatureDim = 2;
// executor count, mean speed, max speed, fraction idle, next free delta
inline constexpr std::size_t kExecFeatureDim = 5;
// left task count, left exec-time sum
inline constexpr std::size_t kJobAttrDim = 2;

struct SnapshotEdge {
    std::uint32_t src{};
    std::uint32_t dst{};
    std::array<double, kEdgeFeatureDim> features{};
};

// The unassigned remainder of one job: raw node features plus the edges
// among the remaining nodes, in a self-contained local numbering.
struct JobSnapshot {
    std::array<double, kJobAttrDim> attrs{};
    std::vector<std::array<double, kNodeFeatureDim>> node_features;
    std::vector<TaskIndex> node_task;
    std::vector<SnapshotEdge> edges;
};

struct FrontierRef {
    std::uint32_t job{};
    std::uint32_t local{};
};

// Everything the policy network saw when it made one decision. Replaying a
// snapshot through the same parameters reproduces scores, probabilities and
// gradients without touching the simulator again.
struct GnnSnapshot {
    std::vector<JobSnapshot> jobs;
    std::array<double, kExecFeatureDim> exec_features{};
    std::vector<FrontierRef> frontier;
    int action = -1;
};

} // namespace lachesis
