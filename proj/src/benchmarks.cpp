#include "rifs/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rifs/error.hpp"
#include "rifs/measure.hpp"
#include "rifs/spectrum.hpp"

namespace rifs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_s(std::span<const double> ratios, double beta, double q) {
    const auto w = sibling_weights(ratios, Canonical{beta});
    return log_partition_function(w, q);
}

std::vector<std::vector<std::pair<double, double>>> rank_supports(const ContractionLaw& law, std::size_t n) {
    std::vector<std::vector<std::pair<double, double>>> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(law.support(i));
    }
    return out;
}

} // namespace

double OneStepEnvironment::outcome_count() const {
    if (!enumerable()) {
        return kInf;
    }
    double total = 0.0;
    const auto& p = offspring.probs();
    for (std::size_t n = 1; n < p.size(); ++n) {
        if (p[n] == 0.0) {
            continue;
        }
        double outcomes = 1.0;
        for (const auto& s : rank_supports(contraction, n)) {
            outcomes *= static_cast<double>(s.size());
        }
        total += outcomes;
    }
    return total;
}

double one_step_S(std::span<const double> weights, double q) { return std::exp(log_partition_function(weights, q)); }

double kappa_closed_form_worked_example(double q) {
    return 0.5 * std::log(2.0 * std::pow(2.0, -q) * (std::pow(1.0 / 3.0, q) + std::pow(2.0 / 3.0, q)));
}

double kappa_exact(const OneStepEnvironment& env, double q) {
    if (!env.enumerable()) {
        throw NotEnumerableError("contraction law is continuous; use kappa_monte_carlo");
    }
    if (env.outcome_count() > kMaxEnumeratedOutcomes) {
        throw NotEnumerableError("more than 1e6 one-step outcomes; use kappa_monte_carlo");
    }
    const auto& p = env.offspring.probs();
    const double survive = 1.0 - p[0];
    if (!(survive > 0.0)) {
        throw std::invalid_argument("offspring law is concentrated on 0");
    }
    double kappa = 0.0;
    for (std::size_t n = 1; n < p.size(); ++n) {
        if (p[n] == 0.0) {
            continue;
        }
        const auto supports = rank_supports(env.contraction, n);
        // Odometer over the support of each sibling rank.
        std::vector<std::size_t> digit(n, 0);
        std::vector<double> ratios(n);
        double conditional = 0.0;
        for (;;) {
            double prob = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                ratios[i] = supports[i][digit[i]].first;
                prob *= supports[i][digit[i]].second;
            }
            conditional += prob * log_s(ratios, env.beta, q);
            std::size_t i = 0;
            while (i < n && ++digit[i] == supports[i].size()) {
                digit[i] = 0;
                ++i;
            }
            if (i == n) {
                break;
            }
        }
        kappa += p[n] / survive * conditional;
    }
    return kappa;
}

MonteCarloEstimate kappa_monte_carlo(const OneStepEnvironment& env, double q, std::size_t samples, Rng& rng) {
    if (samples < 100) {
        throw std::invalid_argument("kappa_monte_carlo needs at least 100 samples");
    }
    if (!(env.offspring.probs()[0] < 1.0)) {
        throw std::invalid_argument("offspring law is concentrated on 0");
    }
    std::vector<double> ratios;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        std::size_t n = 0;
        while (n == 0) {
            n = env.offspring.sample(rng);
        }
        ratios.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ratios[i] = env.contraction.sample_ratio(i, rng);
        }
        const double x = log_s(ratios, env.beta, q);
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
    }
    MonteCarloEstimate est;
    est.mean = mean;
    est.samples = samples;
    est.standard_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return est;
}

double kappa_reference(const OneStepEnvironment& env, double q, Rng& rng, std::size_t samples) {
    if (env.outcome_count() <= kMaxEnumeratedOutcomes) {
        return kappa_exact(env, q);
    }
    return kappa_monte_carlo(env, q, samples, rng).mean;
}

PowerMeanReport power_mean_bounds_check(std::span<const double> weights, double q) {
    PowerMeanReport r;
    const double n = static_cast<double>(weights.size());
    r.s = one_step_S(weights, q);
    const double saturated = std::pow(n, 1.0 - q);
    if (q >= 1.0) {
        r.lower = saturated;
        r.upper = 1.0;
    } else if (q >= 0.0) {
        r.lower = 1.0;
        r.upper = saturated;
    } else {
        r.lower = saturated;
        r.upper = kInf;
    }
    r.margin_lower = r.s - r.lower;
    r.margin_upper = r.upper - r.s;
    const double tol = 1e-12 * std::max(1.0, std::abs(r.s));
    r.pass = r.margin_lower >= -tol && r.margin_upper >= -tol;
    return r;
}

DomainEndpoints domain_endpoints(const ContractionLaw& law, double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("beta must be positive");
    }
    DomainEndpoints d;
    d.q_plus = kInf;
    d.degenerate = !law.is_nondegenerate();
    d.t_star = kInf;
    if (const auto* u = std::get_if<Uniform>(&law.kind()); u && u->lo == 0.0) {
        // E[R^{-beta t}] = hi^{-beta t} / (1 - beta t), finite iff t < 1/beta.
        d.t_star = 1.0 / beta;
    }
    d.q_minus = -d.t_star;
    return d;
}

} // namespace rifs
