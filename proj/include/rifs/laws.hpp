#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "rifs/random.hpp"

namespace rifs {

/// Finite-support offspring distribution P(N = n) = probs[n].
class OffspringLaw {
  public:
    /// Throws ConfigError("offspring.probs", ...) unless probs is a valid
    /// probability vector (non-negative, sums to 1 within 1e-12).
    explicit OffspringLaw(std::vector<double> probs);

    /// Degenerate law N == n.
    static OffspringLaw fixed(std::size_t n);

    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t max_offspring() const noexcept { return probs_.size() - 1; }
    double mean() const noexcept;
    /// p_0 + p_1 < 1: positive probability of at least two children.
    bool is_nondegenerate() const noexcept;

    std::size_t sample(Rng& rng) const noexcept;

    /// Smallest fixed point of the generating function on [0, 1].
    double extinction_probability() const;

  private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

struct Constant {
    double r;
};

struct TwoPoint {
    double r1;
    double r2;
    double p; ///< P(R = r1)
};

struct Uniform {
    double lo;
    double hi;
};

/// Ratio r_i assigned to the i-th child in sibling order.
struct DeterministicRatios {
    std::vector<double> ratios;
};

using ContractionKind = std::variant<Constant, TwoPoint, Uniform, DeterministicRatios>;

/// Law of the contraction ratio r = R / s(v) in (0, 1).
class ContractionLaw {
  public:
    /// Throws ConfigError("contraction", ...) when the support leaves (0, 1).
    explicit ContractionLaw(ContractionKind kind);

    const ContractionKind& kind() const noexcept { return kind_; }

    /// Supported on at least two distinct values.
    bool is_nondegenerate() const noexcept;

    /// Finite support (Constant, TwoPoint, DeterministicRatios).
    bool is_finite_support() const noexcept;

    /// Ratio for the child at `rank`. Always in (0, 1).
    double sample_ratio(std::size_t rank, Rng& rng) const noexcept;

    /// Finite support as (value, probability) pairs for the child at `rank`.
    /// Throws NotEnumerableError for continuous laws.
    std::vector<std::pair<double, double>> support(std::size_t rank) const;

  private:
    ContractionKind kind_;
};

std::size_t sample_offspring(const OffspringLaw& law, Rng& rng) noexcept;

/// R = r * parent_scale with r drawn from `law`; 0 < R < parent_scale.
double sample_contraction(const ContractionLaw& law, double parent_scale, Rng& rng,
                          std::size_t rank = 0) noexcept;

std::string describe(const ContractionLaw& law);

} // namespace rifs
