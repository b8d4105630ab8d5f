#include "rifs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rifs {

double kolmogorov_survival(double x) {
    // The alternating series is slow below 0.2, where Q(x) = 1 to double precision.
    if (x < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        if (term < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_uniform_statistic(std::vector<double> samples, double lo, double hi) {
    if (samples.empty() || !(hi > lo)) {
        throw std::invalid_argument("ks_uniform_statistic needs samples and lo < hi");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

namespace {

struct Ecdf {
    std::vector<double> values;
    std::vector<double> cumulative;
};

Ecdf build_ecdf(const WeightedSample& s) {
    if (s.values.size() != s.weights.size() || s.values.empty()) {
        throw std::invalid_argument("weighted sample is empty or inconsistent");
    }
    std::vector<std::size_t> order(s.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.values[a] < s.values[b]; });
    const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
    if (!(total > 0.0)) {
        throw std::invalid_argument("weighted sample has zero total weight");
    }
    Ecdf e;
    double acc = 0.0;
    for (auto i : order) {
        acc += s.weights[i];
        if (!e.values.empty() && e.values.back() == s.values[i]) {
            e.cumulative.back() = acc / total;
        } else {
            e.values.push_back(s.values[i]);
            e.cumulative.push_back(acc / total);
        }
    }
    e.cumulative.back() = 1.0;
    return e;
}

} // namespace

double ks_two_sample_statistic(const WeightedSample& a, const WeightedSample& b) {
    const auto ea = build_ecdf(a);
    const auto eb = build_ecdf(b);
    std::size_t i = 0;
    std::size_t j = 0;
    double fa = 0.0;
    double fb = 0.0;
    double d = 0.0;
    while (i < ea.values.size() || j < eb.values.size()) {
        const double x = std::min(i < ea.values.size() ? ea.values[i] : INFINITY,
                                  j < eb.values.size() ? eb.values[j] : INFINITY);
        while (i < ea.values.size() && ea.values[i] <= x) {
            fa = ea.cumulative[i++];
        }
        while (j < eb.values.size() && eb.values[j] <= x) {
            fb = eb.cumulative[j++];
        }
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("ks_critical_value needs positive sizes and alpha in (0, 1)");
    }
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

double ks_p_value(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
    const double root = std::sqrt(ne);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

} // namespace rifs
