#include "rifs/realization.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "rifs/error.hpp"

namespace rifs {

namespace {

constexpr std::uint64_t kStreamSalt = 0x3c6ef372fe94f82bull;

Rng node_stream(std::uint64_t node_seed) { return Rng(mix64(node_seed ^ kStreamSalt)); }

/// Reused per-thread buffers for one sibling group.
struct Scratch {
    std::vector<double> ratios;
    std::vector<double> diameters;
    std::vector<double> gaps;
    std::vector<Interval> intervals;
};

void check_diameters(const Interval& parent, std::span<const double> child_diameters) {
    for (double d : child_diameters) {
        if (!(d > 0.0) || !(d < parent.diameter)) {
            throw std::invalid_argument("child diameter must lie in (0, parent diameter)");
        }
    }
}

void place_into(const Interval& parent, std::span<const double> child_diameters, Variant variant, Placement policy,
                Rng& rng, std::span<Interval> out, std::vector<double>& gaps) {
    const double parent_right = parent.right();
    auto clamp_inside = [&](Interval& iv) {
        if (iv.left < parent.left) {
            iv.left = parent.left;
        }
        if (iv.left + iv.diameter > parent_right) {
            iv.left = std::max(parent.left, parent_right - iv.diameter);
        }
    };

    if (variant == Variant::Anchored) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = {parent.left, child_diameters[i]};
        }
        return;
    }

    if (policy == Placement::Free) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = child_diameters[i];
            out[i] = {parent.left + rng.uniform() * (parent.diameter - d), d};
            clamp_inside(out[i]);
        }
        return;
    }

    double used = 0.0;
    for (double d : child_diameters) {
        used += d;
    }
    if (used > parent.diameter * (1.0 + 1e-15)) {
        throw std::invalid_argument("children do not fit disjointly inside the parent");
    }
    const double slack = std::max(0.0, parent.diameter - used);
    // Uniform spacings: normalized exponentials give a flat Dirichlet split.
    gaps.resize(out.size() + 1);
    double gap_total = 0.0;
    for (auto& g : gaps) {
        g = -std::log(rng.uniform_open());
        gap_total += g;
    }
    double cursor = parent.left;
    for (std::size_t i = 0; i < out.size(); ++i) {
        cursor += slack * gaps[i] / gap_total;
        out[i] = {cursor, child_diameters[i]};
        clamp_inside(out[i]);
        cursor = out[i].right();
    }
}

void draw_ratios(const CascadeConfig& config, std::vector<double>& ratios, std::size_t node_id, Rng& rng) {
    for (int attempt = 0; attempt < config.placement_retry_cap; ++attempt) {
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            ratios[i] = config.contraction.sample_ratio(i, rng);
        }
        if (config.variant == Variant::Anchored || config.placement != Placement::DisjointPack ||
            fits_disjoint(ratios)) {
            return;
        }
    }
    throw PlacementInfeasible(node_id, "disjoint packing failed after " +
                                           std::to_string(config.placement_retry_cap) + " contraction draws");
}

/// Appends the children of `parent` to `out`; returns how many were drawn.
std::size_t spawn_children(const CascadeConfig& config, const Node& parent, std::size_t error_id,
                           std::size_t local_parent, std::vector<Node>& out, Scratch& scratch) {
    Rng rng = node_stream(parent.seed);
    const std::size_t count = config.offspring.sample(rng);
    if (count == 0) {
        return 0;
    }
    scratch.ratios.resize(count);
    draw_ratios(config, scratch.ratios, error_id, rng);
    scratch.diameters.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        scratch.diameters[i] = scratch.ratios[i] * parent.diameter;
    }
    scratch.intervals.resize(count);
    check_diameters(parent.interval(), scratch.diameters);
    place_into(parent.interval(), scratch.diameters, config.variant, config.placement, rng, scratch.intervals,
               scratch.gaps);

    const bool completes = parent.generation == config.subtree_height;
    for (std::size_t i = 0; i < count; ++i) {
        Node c;
        c.parent = local_parent;
        c.depth = completes ? parent.depth + 1 : parent.depth;
        c.generation = completes ? 1 : parent.generation + 1;
        c.left = scratch.intervals[i].left;
        c.diameter = scratch.diameters[i];
        c.ratio = scratch.ratios[i];
        c.sibling_rank = static_cast<std::uint32_t>(i);
        c.seed = child_seed(parent.seed, static_cast<std::uint32_t>(i));
        out.push_back(c);
    }
    return count;
}

/// Nodes produced by a contiguous run of frontier leaves. Within a leaf's
/// block, `parent` indexes the block or is kNoNode for the expanded leaf.
struct ChunkResult {
    std::vector<Node> nodes;
    std::vector<std::size_t> block_start; ///< one entry per leaf plus an end marker
    std::vector<std::uint32_t> root_children;
};

void expand_leaf(const CascadeConfig& config, const Node& leaf, ChunkResult& chunk, Scratch& scratch) {
    auto& nodes = chunk.nodes;
    const std::size_t base = nodes.size();
    chunk.root_children.push_back(
        static_cast<std::uint32_t>(spawn_children(config, leaf, leaf.id, kNoNode, nodes, scratch)));
    // Breadth-first, so each parent's children stay contiguous.
    for (std::size_t i = base; i < nodes.size(); ++i) {
        if (nodes[i].generation == config.subtree_height) {
            continue;
        }
        const std::size_t first = nodes.size();
        const Node parent = nodes[i];
        const std::size_t n = spawn_children(config, parent, leaf.id, i - base, nodes, scratch);
        if (n > 0) {
            nodes[i].first_child = first - base;
            nodes[i].child_count = static_cast<std::uint32_t>(n);
        }
    }
}

} // namespace

Realization::Realization(CascadeConfig config) : config_(std::move(config)) {
    Node root;
    root.id = 0;
    root.depth = 0;
    root.generation = config_.subtree_height;
    root.seed = derive_node_seed(config_.master_seed, {});
    nodes_.push_back(root);
    leaves_by_depth_.push_back({0});
}

std::span<const Node> Realization::children(const Node& n) const noexcept {
    if (n.child_count == 0) {
        return {};
    }
    return std::span<const Node>(nodes_).subspan(n.first_child, n.child_count);
}

std::vector<std::uint32_t> Realization::path(std::size_t id) const {
    std::vector<std::uint32_t> ranks;
    for (const Node* n = &nodes_.at(id); !n->is_root(); n = &nodes_[n->parent]) {
        ranks.push_back(n->sibling_rank);
    }
    std::reverse(ranks.begin(), ranks.end());
    return ranks;
}

bool fits_disjoint(std::span<const double> ratios) noexcept {
    double total = 0.0;
    for (double r : ratios) {
        total += r;
    }
    return total <= 1.0;
}

std::vector<Interval> place_children(const Interval& parent, std::span<const double> child_diameters, Variant variant,
                                     Placement policy, Rng& rng) {
    check_diameters(parent, child_diameters);
    std::vector<Interval> out(child_diameters.size());
    std::vector<double> gaps;
    place_into(parent, child_diameters, variant, policy, rng, out, gaps);
    return out;
}

void grow_step(Realization& realization, unsigned threads) {
    if (realization.extinct_) {
        throw std::logic_error("grow_step on an extinct realization");
    }
    const auto& config = realization.config_;
    const auto frontier = realization.leaves_by_depth_.back();

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, frontier.size() / 64));
    const std::size_t span = (frontier.size() + workers - 1) / workers;
    std::vector<ChunkResult> chunks(workers);
    std::vector<std::exception_ptr> failures(workers);

    auto work = [&](std::size_t w) {
        try {
            Scratch scratch;
            auto& chunk = chunks[w];
            const std::size_t begin = std::min(frontier.size(), w * span);
            const std::size_t end = std::min(frontier.size(), begin + span);
            for (std::size_t i = begin; i < end; ++i) {
                chunk.block_start.push_back(chunk.nodes.size());
                expand_leaf(config, realization.nodes_[frontier[i]], chunk, scratch);
            }
            chunk.block_start.push_back(chunk.nodes.size());
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    // Merge in frontier order; ids depend only on sibling order.
    auto& nodes = realization.nodes_;
    std::size_t total = 0;
    for (const auto& c : chunks) {
        total += c.nodes.size();
    }
    nodes.reserve(nodes.size() + total);
    std::vector<std::size_t> next_leaves;
    std::size_t leaf_index = 0;
    for (const auto& chunk : chunks) {
        for (std::size_t b = 0; b + 1 < chunk.block_start.size(); ++b, ++leaf_index) {
            const std::size_t base = nodes.size();
            const std::size_t from = chunk.block_start[b];
            const std::size_t to = chunk.block_start[b + 1];
            Node& leaf = nodes[frontier[leaf_index]];
            if (chunk.root_children[b] > 0) {
                leaf.first_child = base;
                leaf.child_count = chunk.root_children[b];
            }
            for (std::size_t j = from; j < to; ++j) {
                Node n = chunk.nodes[j];
                n.id = base + (j - from);
                n.parent = n.parent == kNoNode ? frontier[leaf_index] : base + n.parent;
                if (n.first_child != kNoNode) {
                    n.first_child += base;
                }
                if (n.generation == config.subtree_height) {
                    next_leaves.push_back(n.id);
                }
                nodes.push_back(n);
            }
        }
    }
    realization.extinct_ = next_leaves.empty();
    realization.leaves_by_depth_.push_back(std::move(next_leaves));
}

Realization grow(const CascadeConfig& config, unsigned threads) {
    validate(config);
    Realization realization(config);
    for (int k = 0; k < config.max_depth && !realization.extinct(); ++k) {
        grow_step(realization, threads);
    }
    return realization;
}

} // namespace rifs
