#include "lachesis/workload.hpp"

#include <algorithm>
#include <string>

#include "lachesis/random.hpp"

namespace lachesis {

namespace {

struct Skeleton {
    std::size_t n_nodes = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;

    NodeId add_node() { return static_cast<NodeId>(n_nodes++); }
    void link(NodeId a, NodeId b) { edges.emplace_back(a, b); }
};

enum class LayerWiring { Dense, Sparse };

// Layered DAG. Dense wiring connects consecutive layers completely; sparse
// wiring gives every node one deterministic parent and one child so the
// layers stay reachable without the quadratic edge count.
Skeleton layered(const std::vector<std::size_t>& widths, LayerWiring wiring) {
    Skeleton sk;
    std::vector<std::vector<NodeId>> layers;
    for (std::size_t w : widths) {
        std::vector<NodeId> layer;
        for (std::size_t i = 0; i < w; ++i) layer.push_back(sk.add_node());
        layers.push_back(std::move(layer));
    }
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        const auto& a = layers[l];
        const auto& b = layers[l + 1];
        if (wiring == LayerWiring::Dense) {
            for (NodeId u : a)
                for (NodeId v : b) sk.link(u, v);
        } else {
            std::vector<std::pair<NodeId, NodeId>> links;
            for (std::size_t j = 0; j < b.size(); ++j) {
                links.emplace_back(a[j % a.size()], b[j]);
                links.emplace_back(a[(j * 2 + 1) % a.size()], b[j]);
            }
            for (std::size_t j = 0; j < a.size(); ++j) {
                links.emplace_back(a[j], b[j % b.size()]);
            }
            std::sort(links.begin(), links.end());
            links.erase(std::unique(links.begin(), links.end()), links.end());
            for (auto [u, v] : links) sk.link(u, v);
        }
    }
    return sk;
}

Skeleton chain(std::size_t n) {
    Skeleton sk;
    NodeId prev = sk.add_node();
    for (std::size_t i = 1; i < n; ++i) {
        const NodeId cur = sk.add_node();
        sk.link(prev, cur);
        prev = cur;
    }
    return sk;
}

// Root at 0, every node has `arity` children, `depth` levels below the root.
Skeleton out_tree(std::size_t arity, std::size_t depth) {
    Skeleton sk;
    std::vector<NodeId> level{sk.add_node()};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<NodeId> next;
        for (NodeId parent : level) {
            for (std::size_t k = 0; k < arity; ++k) {
                const NodeId c = sk.add_node();
                sk.link(parent, c);
                next.push_back(c);
            }
        }
        level = std::move(next);
    }
    return sk;
}

Skeleton in_tree(std::size_t arity, std::size_t depth) {
    Skeleton out = out_tree(arity, depth);
    Skeleton sk;
    sk.n_nodes = out.n_nodes;
    for (auto [u, v] : out.edges) sk.link(v, u);
    return sk;
}

// src, `k` parallel chains of `len`, sink.
Skeleton parallel_chains(std::size_t k, std::size_t len) {
    Skeleton sk;
    const NodeId src = sk.add_node();
    std::vector<NodeId> tails;
    for (std::size_t c = 0; c < k; ++c) {
        NodeId prev = src;
        for (std::size_t i = 0; i < len; ++i) {
            const NodeId cur = sk.add_node();
            sk.link(prev, cur);
            prev = cur;
        }
        tails.push_back(prev);
    }
    const NodeId sink = sk.add_node();
    for (NodeId t : tails) sk.link(t, sink);
    return sk;
}

// Chain with one side task hanging off every second stage.
Skeleton chain_with_branches(std::size_t len) {
    Skeleton sk;
    NodeId prev = sk.add_node();
    for (std::size_t i = 1; i < len; ++i) {
        const NodeId cur = sk.add_node();
        sk.link(prev, cur);
        if (i % 2 == 0) {
            const NodeId side = sk.add_node();
            sk.link(prev, side);
            sk.link(side, cur);
        }
        prev = cur;
    }
    return sk;
}

Skeleton make_skeleton(int shape_id) {
    switch (shape_id) {
    case 1: return chain(8);
    case 2: return chain(16);
    case 3: return layered({1, 4, 1}, LayerWiring::Dense);
    case 4: return layered({1, 8, 1}, LayerWiring::Dense);
    case 5: return layered({1, 2, 2, 1}, LayerWiring::Dense);
    case 6: return out_tree(2, 3);
    case 7: return in_tree(2, 3);
    case 8: return layered({1, 8, 2, 1}, LayerWiring::Dense);
    case 9: return layered({3, 4, 4, 3}, LayerWiring::Sparse);
    case 10: return layered({2, 4, 4, 2}, LayerWiring::Dense);
    case 11: return layered({1, 12, 1}, LayerWiring::Dense);
    case 12: return parallel_chains(2, 5);
    case 13: return layered({1, 4, 1, 6, 1}, LayerWiring::Dense);
    case 14: return layered({1, 2, 4, 2, 1}, LayerWiring::Dense);
    case 15: return layered({3, 3, 3, 1, 2}, LayerWiring::Sparse);
    case 16: return chain_with_branches(11);
    case 17: return layered({1, 10, 10, 1}, LayerWiring::Sparse);
    case 18: return layered({2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, LayerWiring::Sparse);
    case 19: return layered({16, 4, 1}, LayerWiring::Dense);
    case 20: return layered({1, 3, 5, 3, 1}, LayerWiring::Dense);
    case 21: return layered({2, 4, 6, 4, 2}, LayerWiring::Sparse);
    case 22: return layered({1, 6, 8, 8, 6, 8, 2, 1}, LayerWiring::Sparse);
    default:
        throw InvalidSpec("shape_id must be in 1.." + std::to_string(kShapeCount));
    }
}

Job realize(JobId id, const Skeleton& sk, double scale, double arrival, Rng& rng) {
    std::vector<TaskNode> nodes;
    nodes.reserve(sk.n_nodes);
    for (std::size_t i = 0; i < sk.n_nodes; ++i) {
        nodes.push_back({static_cast<NodeId>(i), id, rng.uniform(5.0, 30.0) * scale,
                         TaskStatus::Unassigned});
    }
    std::vector<Edge> edges;
    edges.reserve(sk.edges.size());
    for (auto [u, v] : sk.edges) {
        edges.push_back({u, v, rng.uniform(1.0, 20.0) * scale});
    }
    return Job::build(id, std::move(nodes), std::move(edges), arrival);
}

} // namespace

Job shape_template(int shape_id) {
    const Skeleton sk = make_skeleton(shape_id);
    std::vector<TaskNode> nodes;
    for (std::size_t i = 0; i < sk.n_nodes; ++i) {
        nodes.push_back({static_cast<NodeId>(i), 0, 1.0, TaskStatus::Unassigned});
    }
    std::vector<Edge> edges;
    for (auto [u, v] : sk.edges) edges.push_back({u, v, 1.0});
    return Job::build(0, std::move(nodes), std::move(edges), 0.0);
}

std::vector<Job> generate(const WorkloadSpec& spec) {
    if (spec.n_jobs == 0) {
        throw InvalidSpec("workload needs at least one job");
    }
    if (spec.shape_id < 0 || spec.shape_id > kShapeCount) {
        throw InvalidSpec("shape_id must be 0 (mixed) or 1.." +
                          std::to_string(kShapeCount));
    }
    if (std::find(kSizeClasses.begin(), kSizeClasses.end(), spec.size_class) ==
        kSizeClasses.end()) {
        throw InvalidSpec("size_class must be one of 2, 5, 10, 50, 80, 100");
    }
    if (spec.mode == SimMode::Continuous && spec.arrival_mean <= 0.0) {
        throw InvalidSpec("continuous mode needs a positive arrival mean");
    }

    const double scale = static_cast<double>(spec.size_class) / 2.0;
    Rng rng(spec.seed);
    std::vector<Job> jobs;
    jobs.reserve(spec.n_jobs);
    double arrival = 0.0;
    for (std::size_t i = 0; i < spec.n_jobs; ++i) {
        if (spec.mode == SimMode::Continuous && i > 0) {
            arrival += rng.exponential(spec.arrival_mean);
        }
        const int shape = spec.shape_id == 0
                              ? 1 + static_cast<int>(rng.index(kShapeCount))
                              : spec.shape_id;
        jobs.push_back(realize(static_cast<JobId>(i), make_skeleton(shape), scale,
                               spec.mode == SimMode::Batch ? 0.0 : arrival, rng));
    }
    return jobs;
}

std::vector<Job> toy_training_jobs() {
    auto node = [](NodeId id, double w) {
        return TaskNode{id, 0, w, TaskStatus::Unassigned};
    };
    std::vector<Job> jobs;

    // Three shallow filler jobs ahead of a heavy chain in arrival order: the
    // makespan hinges on starting the chain early, which arrival order hides
    // but the rank features expose.
    jobs.push_back(Job::build(
        0, {node(0, 3), node(1, 4), node(2, 2), node(3, 5), node(4, 3)},
        {{0, 4, 2}, {1, 4, 1}, {2, 4, 2}, {3, 4, 1}}, 0.0));
    jobs.push_back(Job::build(
        1, {node(0, 4), node(1, 2), node(2, 5), node(3, 3)},
        {{0, 3, 1}, {1, 3, 2}, {2, 3, 1}}, 0.0));
    jobs.push_back(Job::build(
        2, {node(0, 2), node(1, 3), node(2, 4), node(3, 2)},
        {{0, 1, 2}, {0, 2, 1}, {1, 3, 1}, {2, 3, 2}}, 0.0));
    // the critical chain
    jobs.push_back(Job::build(
        3,
        {node(0, 10), node(1, 9), node(2, 11), node(3, 10), node(4, 9), node(5, 12)},
        {{0, 1, 3}, {1, 2, 2}, {2, 3, 3}, {3, 4, 2}, {4, 5, 3}}, 0.0));
    // one more shallow fan arriving after the chain
    jobs.push_back(Job::build(
        4, {node(0, 3), node(1, 2), node(2, 4), node(3, 3), node(4, 2)},
        {{0, 1, 1}, {0, 2, 2}, {0, 3, 1}, {0, 4, 2}}, 0.0));
    return jobs;
}

} // namespace lachesis
