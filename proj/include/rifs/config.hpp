#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rifs/laws.hpp"

namespace rifs {

enum class Variant { NonAnchored, Anchored };
enum class Placement { Free, DisjointPack };

/// Sibling weights W_i = R_i^beta / sum_j R_j^beta.
struct Canonical {
    double beta = 1.0;
};
/// Mass proportional to the product of ratios along the path, normalized per depth.
struct RawProduct {};
/// Fixed weights by sibling rank (classical-cascade oracle).
struct Explicit {
    std::vector<double> weights;
};

using WeightingMode = std::variant<Canonical, RawProduct, Explicit>;

struct CascadeConfig {
    OffspringLaw offspring = OffspringLaw::fixed(2);
    ContractionLaw contraction{TwoPoint{1.0 / 3.0, 2.0 / 3.0, 0.5}};
    Variant variant = Variant::NonAnchored;
    Placement placement = Placement::Free;
    WeightingMode weighting = Canonical{1.0};
    int subtree_height = 1;
    int max_depth = 10;
    std::uint64_t master_seed = 1;
    /// Reject (rather than warn about) degenerate offspring/contraction laws.
    bool strict = false;
    /// Contraction redraws allowed per node when DisjointPack does not fit.
    int placement_retry_cap = 64;
};

/// Throws ConfigError naming the first invalid field. Returns warnings for
/// violated non-degeneracy assumptions (errors instead when `strict`).
std::vector<std::string> validate(const CascadeConfig& config);

/// Flat `key = value` format, one entry per line, `#` comments.
CascadeConfig parse_config(std::istream& in);
CascadeConfig parse_config_file(const std::string& path);
void write_config(std::ostream& out, const CascadeConfig& config);
std::string config_to_string(const CascadeConfig& config);

ContractionLaw parse_contraction(const std::string& text);

/// The worked-example environment: N == 2, R in {1/3, 2/3} equiprobable,
/// canonical weights with beta = 1.
CascadeConfig worked_example_config(int max_depth, std::uint64_t seed);

/// Dyadic cascade: N == 2, R == 1/2, packed children.
CascadeConfig dyadic_config(int max_depth, std::uint64_t seed);

/// Uniform contraction and translation laws, used for the heatmap/spectrum figure.
CascadeConfig figure_config(int max_depth, std::uint64_t seed);

std::string to_string(Variant v);
std::string to_string(Placement p);
std::string describe(const WeightingMode& mode);

} // namespace rifs
