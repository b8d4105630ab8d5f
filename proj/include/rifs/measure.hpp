#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rifs/config.hpp"
#include "rifs/realization.hpp"

namespace rifs {

/// Order-independent-of-threads pairwise summation.
double pairwise_sum(std::span<const double> values) noexcept;

/// Unnormalized mass of every node, indexed by node id. Canonical/Explicit:
/// product of sibling weights along the path. RawProduct: product of ratios.
std::vector<double> node_masses(const Realization& realization, const WeightingMode& mode);

/// Sibling weights for one family of ratios.
std::vector<double> sibling_weights(std::span<const double> ratios, const WeightingMode& mode);

/// Per-depth leaf masses (depths 0..up_to_depth, default: all grown depths),
/// each row normalized to sum to 1. Throws ExtinctDepthError naming the first
/// empty depth in range.
std::vector<std::vector<double>> leaf_masses(const Realization& realization, const WeightingMode& mode,
                                             std::optional<int> up_to_depth = std::nullopt);

/// Depth-indexed leaf geometry and masses.
class ScaleMatrix {
  public:
    struct Row {
        std::vector<double> lefts;
        std::vector<double> diameters;
        /// Empty when no masses are attached.
        std::vector<double> masses;
    };

    ScaleMatrix() = default;
    explicit ScaleMatrix(std::vector<Row> rows);

    /// Number of extractable rows (depths 0..rows()-1).
    std::size_t rows() const noexcept { return rows_.size(); }
    bool has_masses() const noexcept;

    /// Throw ExtinctDepthError for depths past the last non-empty one.
    const Row& row(int depth) const;
    std::span<const double> diameters(int depth) const { return row(depth).diameters; }
    std::span<const double> masses(int depth) const { return row(depth).masses; }
    std::size_t leaf_count(int depth) const { return row(depth).diameters.size(); }

  private:
    std::vector<Row> rows_;
};

/// Rows for every non-empty depth of the realization.
ScaleMatrix scale_matrix(const Realization& realization, const WeightingMode& mode);

/// Per-depth histogram of mass over [0, 1]: each interval's mass is split
/// across bins in proportion to overlap length.
std::vector<std::vector<double>> mass_heatmap_bins(const ScaleMatrix& matrix, int bins);

} // namespace rifs
