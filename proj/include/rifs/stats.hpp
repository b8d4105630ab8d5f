#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rifs {

/// Values with non-negative weights defining an empirical distribution.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;

    void add(double value, double weight = 1.0) {
        values.push_back(value);
        weights.push_back(weight);
    }
    std::size_t size() const noexcept { return values.size(); }
};

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

/// One-sample KS distance between `samples` and Uniform(lo, hi).
double ks_uniform_statistic(std::vector<double> samples, double lo, double hi);

/// Sup distance between the weighted empirical CDFs of `a` and `b`.
double ks_two_sample_statistic(const WeightedSample& a, const WeightedSample& b);

/// Asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)).
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

/// Asymptotic two-sample p-value for distance `d` with sample sizes n, m.
double ks_p_value(double d, std::size_t n, std::size_t m);

} // namespace rifs
