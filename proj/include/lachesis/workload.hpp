#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lachesis/dag.hpp"
#include "lachesis/simulator.hpp"

namespace lachesis {

inline constexpr int kShapeCount = 22;
inline constexpr std::array<int, 6> kSizeClasses = {2, 5, 10, 50, 80, 100};

struct WorkloadSpec {
    int shape_id = 0; // 0 draws per-job from the whole catalog, 1..22 pins one shape
    int size_class = 2;
    std::size_t n_jobs = 1;
    SimMode mode = SimMode::Batch;
    std::uint64_t seed = 0;
    double arrival_mean = 45.0; // continuous-mode mean inter-arrival gap

    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

// Seeded synthetic jobs drawn from a frozen catalog of 22 DAG shapes
// (chains, forks, joins, diamonds, trees, layered meshes; 5-40 nodes each).
// Work and data sizes scale linearly with size_class. Batch mode puts every
// arrival at 0; continuous mode starts at 0 and spaces arrivals
// exponentially. Throws InvalidSpec.
std::vector<Job> generate(const WorkloadSpec& spec);

// Node/edge skeleton of one catalog shape (work and data left at 1), used by
// shape-stability tests and documentation.
Job shape_template(int shape_id);

// The frozen 5-job suite used for small training runs and regressions.
std::vector<Job> toy_training_jobs();

} // namespace lachesis
