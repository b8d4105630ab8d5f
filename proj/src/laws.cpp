#include "rifs/laws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rifs/error.hpp"
#include "rifs/format.hpp"

namespace rifs {

OffspringLaw::OffspringLaw(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw ConfigError("offspring.probs", "empty probability vector");
    }
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ConfigError("offspring.probs", "entries must be finite and non-negative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("offspring.probs", "probabilities sum to " + format_double(total) + ", expected 1");
    }
    while (probs_.size() > 1 && probs_.back() == 0.0) {
        probs_.pop_back();
    }
    cdf_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
    cdf_.back() = 1.0;
}

OffspringLaw OffspringLaw::fixed(std::size_t n) {
    std::vector<double> probs(n + 1, 0.0);
    probs[n] = 1.0;
    return OffspringLaw(std::move(probs));
}

double OffspringLaw::mean() const noexcept {
    double m = 0.0;
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        m += static_cast<double>(n) * probs_[n];
    }
    return m;
}

bool OffspringLaw::is_nondegenerate() const noexcept {
    double low = probs_[0] + (probs_.size() > 1 ? probs_[1] : 0.0);
    return low < 1.0 - 1e-12;
}

std::size_t OffspringLaw::sample(Rng& rng) const noexcept {
    if (probs_.size() == 1) {
        return 0;
    }
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto n = static_cast<std::size_t>(it - cdf_.begin());
    n = std::min(n, probs_.size() - 1);
    // Never land on a zero-probability atom through rounding in the cdf.
    while (probs_[n] == 0.0 && n + 1 < probs_.size()) {
        ++n;
    }
    return n;
}

double OffspringLaw::extinction_probability() const {
    // Iterating the generating function from 0 increases monotonically to
    // its smallest fixed point.
    auto generating = [this](double s) {
        double acc = 0.0;
        for (auto it = probs_.rbegin(); it != probs_.rend(); ++it) {
            acc = acc * s + *it;
        }
        return acc;
    };
    double s = 0.0;
    for (int iter = 0; iter < 1'000'000; ++iter) {
        double next = generating(s);
        if (std::abs(next - s) < 1e-15) {
            return next;
        }
        s = next;
    }
    return s;
}

ContractionLaw::ContractionLaw(ContractionKind kind) : kind_(std::move(kind)) {
    auto in_unit = [](double r) { return std::isfinite(r) && r > 0.0 && r < 1.0; };
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>) {
                if (!in_unit(k.r)) {
                    throw ConfigError("contraction", "constant ratio must lie in (0, 1)");
                }
            } else if constexpr (std::is_same_v<K, TwoPoint>) {
                if (!in_unit(k.r1) || !in_unit(k.r2)) {
                    throw ConfigError("contraction", "two-point values must lie in (0, 1)");
                }
                if (!(k.p >= 0.0 && k.p <= 1.0)) {
                    throw ConfigError("contraction", "two-point probability must lie in [0, 1]");
                }
            } else if constexpr (std::is_same_v<K, Uniform>) {
                if (!(k.lo >= 0.0 && k.lo < k.hi && k.hi <= 1.0)) {
                    throw ConfigError("contraction", "uniform bounds must satisfy 0 <= lo < hi <= 1");
                }
            } else {
                if (k.ratios.empty() || !std::all_of(k.ratios.begin(), k.ratios.end(), in_unit)) {
                    throw ConfigError("contraction", "ratios must be non-empty and lie in (0, 1)");
                }
            }
        },
        kind_);
}

bool ContractionLaw::is_nondegenerate() const noexcept {
    return std::visit(
        [](const auto& k) -> bool {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>) {
                return false;
            } else if constexpr (std::is_same_v<K, TwoPoint>) {
                return k.r1 != k.r2 && k.p > 0.0 && k.p < 1.0;
            } else if constexpr (std::is_same_v<K, Uniform>) {
                return k.lo < k.hi;
            } else {
                return std::adjacent_find(k.ratios.begin(), k.ratios.end(), std::not_equal_to<>{}) !=
                       k.ratios.end();
            }
        },
        kind_);
}

bool ContractionLaw::is_finite_support() const noexcept {
    return !std::holds_alternative<Uniform>(kind_);
}

double ContractionLaw::sample_ratio(std::size_t rank, Rng& rng) const noexcept {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>) {
                return k.r;
            } else if constexpr (std::is_same_v<K, TwoPoint>) {
                return rng.uniform() < k.p ? k.r1 : k.r2;
            } else if constexpr (std::is_same_v<K, Uniform>) {
                for (;;) {
                    double r = k.lo + (k.hi - k.lo) * rng.uniform_open();
                    if (r > 0.0 && r < 1.0 && r > k.lo && r < k.hi) {
                        return r;
                    }
                }
            } else {
                return k.ratios[std::min(rank, k.ratios.size() - 1)];
            }
        },
        kind_);
}

std::vector<std::pair<double, double>> ContractionLaw::support(std::size_t rank) const {
    return std::visit(
        [&](const auto& k) -> std::vector<std::pair<double, double>> {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>) {
                return {{k.r, 1.0}};
            } else if constexpr (std::is_same_v<K, TwoPoint>) {
                if (k.r1 == k.r2 || k.p == 1.0) {
                    return {{k.r1, 1.0}};
                }
                if (k.p == 0.0) {
                    return {{k.r2, 1.0}};
                }
                return {{k.r1, k.p}, {k.r2, 1.0 - k.p}};
            } else if constexpr (std::is_same_v<K, Uniform>) {
                throw NotEnumerableError("uniform contraction law has continuous support");
            } else {
                return {{k.ratios[std::min(rank, k.ratios.size() - 1)], 1.0}};
            }
        },
        kind_);
}

std::size_t sample_offspring(const OffspringLaw& law, Rng& rng) noexcept { return law.sample(rng); }

double sample_contraction(const ContractionLaw& law, double parent_scale, Rng& rng, std::size_t rank) noexcept {
    return law.sample_ratio(rank, rng) * parent_scale;
}

std::string describe(const ContractionLaw& law) {
    return std::visit(
        [](const auto& k) -> std::string {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>) {
                return "constant:" + format_double(k.r);
            } else if constexpr (std::is_same_v<K, TwoPoint>) {
                return "twopoint:" + format_double(k.r1) + "," + format_double(k.r2) + "," + format_double(k.p);
            } else if constexpr (std::is_same_v<K, Uniform>) {
                return "uniform:" + format_double(k.lo) + "," + format_double(k.hi);
            } else {
                std::string out = "ratios:";
                for (std::size_t i = 0; i < k.ratios.size(); ++i) {
                    out += (i ? "," : "") + format_double(k.ratios[i]);
                }
                return out;
            }
        },
        law.kind());
}

} // namespace rifs
