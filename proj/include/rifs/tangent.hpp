#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rifs/config.hpp"
#include "rifs/measure.hpp"
#include "rifs/realization.hpp"
#include "rifs/stats.hpp"

namespace rifs {

/// Descendant measure below a leaf, affinely rescaled so the leaf maps to
/// [0, 1] and renormalized to unit mass.
struct TangentSample {
    std::size_t source_leaf = 0;
    int source_depth = 0;
    int sub_depth = 0;
    std::vector<Interval> intervals;
    std::vector<double> masses;
};

/// Rows 0..k of the rescaled descendant geometry below `leaf`. Diameters are
/// products of the ratios below the leaf. Throws ExtinctDepthError when the
/// leaf has no descendants k depths down.
ScaleMatrix tangent_scale_matrix(const Realization& realization, std::span<const double> node_masses,
                                 std::size_t leaf, int k);

TangentSample tangent_measure(const Realization& realization, std::span<const double> node_masses,
                              std::size_t leaf, int k);
TangentSample tangent_measure(const Realization& realization, const WeightingMode& mode, std::size_t leaf, int k);

/// Pooled distributions over an ensemble. Each sample contributes total
/// weight 1 to the log-mass and log-diameter distributions.
/// Concatenates rows depth by depth, each matrix carrying an equal share of
/// the mass. Depths beyond the shallowest input are dropped.
ScaleMatrix pool_scale_matrices(std::span<const ScaleMatrix> matrices);

struct EnsembleSummary {
    WeightedSample log_mass;
    WeightedSample log_diameter;
    WeightedSample leaf_count;
    std::size_t samples = 0;
};

/// Needs at least 30 samples (InsufficientDataError otherwise).
EnsembleSummary ensemble_statistics(std::span<const TangentSample> samples);

struct KsComparison {
    std::string statistic;
    double distance = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool reject = false;
};

/// Two-sample KS on log mass, log diameter and leaf count. Effective sample
/// sizes are the numbers of realizations, not pooled leaves.
std::vector<KsComparison> compare_ensembles(const EnsembleSummary& a, const EnsembleSummary& b, double alpha = 0.05);

enum class TangentVerdict { NotRejected, Rejected, Inconclusive };
std::string to_string(TangentVerdict v);

struct TangentTestOptions {
    int n = 6;
    int k = 6;
    int seeds = 100;
    double alpha = 0.05;
    /// Replaces the reference side's contraction law (power check).
    std::optional<ContractionLaw> control_contraction;
    unsigned threads = 1;
};

struct TangentTestReport {
    int n = 0;
    int k = 0;
    int seeds = 0;
    double alpha = 0.05;
    std::size_t anchored_samples = 0;
    std::size_t anchored_extinct = 0;
    std::size_t reference_samples = 0;
    std::size_t reference_extinct = 0;
    bool control = false;
    std::vector<KsComparison> comparisons;
    TangentVerdict verdict = TangentVerdict::Inconclusive;
    std::string note;
};

/// Grows `seeds` anchored realizations to depth n + k and takes one tangent
/// sample each below a uniformly chosen depth-n leaf; grows `seeds`
/// non-anchored realizations to depth k; compares the two ensembles.
/// Inconclusive when more than half of either side goes extinct.
TangentTestReport tangent_equivalence_test(const CascadeConfig& config, const TangentTestOptions& options);

} // namespace rifs
