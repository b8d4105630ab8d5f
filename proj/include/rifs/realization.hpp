#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rifs/config.hpp"
#include "rifs/random.hpp"

namespace rifs {

/// Closed interval stored as (left, diameter); the diameter is always
/// computed multiplicatively, never as a difference of endpoints.
struct Interval {
    double left = 0.0;
    double diameter = 1.0;

    double right() const noexcept { return left + diameter; }
};

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

struct Node {
    std::size_t id = 0;
    std::size_t parent = kNoNode;
    /// Refinement step k at which the node was created.
    int depth = 0;
    /// Generation inside the embedded subtree, 1..subtree_height. Nodes with
    /// generation == subtree_height are the depth-k leaves.
    int generation = 0;
    double left = 0.0;
    double diameter = 1.0;
    /// Ratio r relative to the parent's diameter (1 for the root).
    double ratio = 1.0;
    std::uint32_t sibling_rank = 0;
    std::uint64_t seed = 0;
    std::size_t first_child = kNoNode;
    std::uint32_t child_count = 0;

    bool is_root() const noexcept { return parent == kNoNode; }
    bool is_leaf() const noexcept { return child_count == 0; }
    double right() const noexcept { return left + diameter; }
    Interval interval() const noexcept { return {left, diameter}; }
};

class Realization {
  public:
    explicit Realization(CascadeConfig config);

    const CascadeConfig& config() const noexcept { return config_; }
    std::span<const Node> nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t id) const { return nodes_.at(id); }
    std::span<const Node> children(const Node& n) const noexcept;

    /// Deepest refinement step grown so far.
    int depth() const noexcept { return static_cast<int>(leaves_by_depth_.size()) - 1; }
    /// Leaf ids at refinement step `depth`, in sibling-rank order.
    const std::vector<std::size_t>& leaves(int depth) const { return leaves_by_depth_.at(static_cast<std::size_t>(depth)); }
    /// True once some depth has no leaves.
    bool extinct() const noexcept { return extinct_; }

    /// Sibling ranks from the root to `id`.
    std::vector<std::uint32_t> path(std::size_t id) const;

  private:
    friend void grow_step(Realization&, unsigned);

    CascadeConfig config_;
    std::vector<Node> nodes_;
    std::vector<std::vector<std::size_t>> leaves_by_depth_;
    bool extinct_ = false;
};

/// True when children with these ratios can be packed disjointly.
bool fits_disjoint(std::span<const double> ratios) noexcept;

/// Positions children of the given diameters inside `parent`.
/// Anchored: every child starts at parent.left (overlap allowed). Free:
/// independent uniform translation. DisjointPack: pairwise disjoint, in
/// sibling order, with uniform random spacing; throws std::invalid_argument
/// if the diameters do not fit.
std::vector<Interval> place_children(const Interval& parent, std::span<const double> child_diameters, Variant variant,
                                     Placement policy, Rng& rng);

/// Replaces every current leaf by an embedded Galton-Watson subtree,
/// advancing the realization by one depth. Frontier expansion runs on
/// `threads` workers; the result does not depend on the thread count.
/// Throws PlacementInfeasible, or std::logic_error when already extinct.
void grow_step(Realization& realization, unsigned threads = 1);

/// Validates `config` and grows max_depth steps (stopping at extinction).
Realization grow(const CascadeConfig& config, unsigned threads = 1);

} // namespace rifs
