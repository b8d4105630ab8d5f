#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rifs/laws.hpp"
#include "rifs/random.hpp"

namespace rifs {

/// One refinement step of the cascade: offspring law, contraction law and
/// the canonical weighting exponent.
struct OneStepEnvironment {
    OffspringLaw offspring = OffspringLaw::fixed(2);
    ContractionLaw contraction{TwoPoint{1.0 / 3.0, 2.0 / 3.0, 0.5}};
    double beta = 1.0;

    /// Both laws have finite support.
    bool enumerable() const noexcept { return contraction.is_finite_support(); }
    /// Number of (N, ratio tuple) outcomes with N >= 1.
    double outcome_count() const;
};

inline constexpr double kMaxEnumeratedOutcomes = 1e6;

/// S(q) = sum_i W_i^q, computed in log space.
double one_step_S(std::span<const double> weights, double q);

/// kappa(q) = 1/2 log(2 * 2^-q * ((1/3)^q + (2/3)^q)) for N == 2,
/// R in {1/3, 2/3} equiprobable, beta = 1.
double kappa_closed_form_worked_example(double q);

/// E[log S(q)] by exhaustive enumeration, conditioned on N >= 1. Throws
/// NotEnumerableError for continuous laws or more than 1e6 outcomes.
double kappa_exact(const OneStepEnvironment& env, double q);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean of log S(q) over independent one-step draws (N >= 1).
MonteCarloEstimate kappa_monte_carlo(const OneStepEnvironment& env, double q, std::size_t samples, Rng& rng);

/// kappa_exact when enumerable within the outcome cap, else Monte Carlo.
double kappa_reference(const OneStepEnvironment& env, double q, Rng& rng, std::size_t samples = 100'000);

struct PowerMeanReport {
    double s = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// s - lower and upper - s; both non-negative when the bounds hold.
    double margin_lower = 0.0;
    double margin_upper = 0.0;
    bool pass = false;
};

/// N^{1-q} <= S(q) <= 1 for q >= 1, 1 <= S(q) <= N^{1-q} for 0 <= q <= 1,
/// and S(q) >= N^{1-q} for q < 0.
PowerMeanReport power_mean_bounds_check(std::span<const double> weights, double q);

struct DomainEndpoints {
    double q_minus = 0.0;
    double q_plus = 0.0;
    double t_star = 0.0;
    /// Degenerate contraction law: tau is affine and f is a point.
    bool degenerate = false;
};

DomainEndpoints domain_endpoints(const ContractionLaw& law, double beta);

} // namespace rifs
