#include "rifs/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rifs/error.hpp"

namespace rifs {

namespace {

struct Tracked {
    std::size_t id;
    double relative_diameter;
};

/// Leaves one refinement step below `level`, in sibling order.
std::vector<Tracked> next_level(const Realization& realization, const std::vector<Tracked>& level) {
    const int height = realization.config().subtree_height;
    std::vector<Tracked> out;
    std::vector<Tracked> stack;
    for (const auto& t : level) {
        const int target = realization.node(t.id).depth + 1;
        stack.push_back(t);
        while (!stack.empty()) {
            const Tracked cur = stack.back();
            stack.pop_back();
            const Node& n = realization.node(cur.id);
            if (n.depth == target && n.generation == height) {
                out.push_back(cur);
                continue;
            }
            const auto kids = realization.children(n);
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
                stack.push_back({it->id, cur.relative_diameter * it->ratio});
            }
        }
    }
    return out;
}

} // namespace

ScaleMatrix tangent_scale_matrix(const Realization& realization, std::span<const double> node_masses,
                                 std::size_t leaf, int k) {
    if (k < 0) {
        throw std::invalid_argument("sub-depth must be non-negative");
    }
    const Node& origin = realization.node(leaf);
    if (origin.generation != realization.config().subtree_height) {
        throw std::invalid_argument("node " + std::to_string(leaf) + " is not a depth leaf");
    }
    std::vector<ScaleMatrix::Row> rows;
    std::vector<Tracked> level{{leaf, 1.0}};
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            if (origin.depth + j > realization.depth()) {
                throw ExtinctDepthError(origin.depth + j);
            }
            level = next_level(realization, level);
        }
        if (level.empty()) {
            throw ExtinctDepthError(origin.depth + j);
        }
        ScaleMatrix::Row row;
        std::vector<double> raw;
        for (const auto& t : level) {
            const Node& n = realization.node(t.id);
            const double left = std::clamp((n.left - origin.left) / origin.diameter, 0.0, 1.0);
            row.lefts.push_back(left);
            row.diameters.push_back(t.relative_diameter);
            raw.push_back(node_masses[t.id]);
        }
        const double total = pairwise_sum(raw);
        for (auto& m : raw) {
            m /= total;
        }
        row.masses = std::move(raw);
        rows.push_back(std::move(row));
    }
    return ScaleMatrix(std::move(rows));
}

TangentSample tangent_measure(const Realization& realization, std::span<const double> node_masses, std::size_t leaf,
                              int k) {
    const auto matrix = tangent_scale_matrix(realization, node_masses, leaf, k);
    const auto& row = matrix.row(k);
    TangentSample sample;
    sample.source_leaf = leaf;
    sample.source_depth = realization.node(leaf).depth;
    sample.sub_depth = k;
    for (std::size_t i = 0; i < row.diameters.size(); ++i) {
        sample.intervals.push_back({row.lefts[i], row.diameters[i]});
    }
    sample.masses = row.masses;
    return sample;
}

TangentSample tangent_measure(const Realization& realization, const WeightingMode& mode, std::size_t leaf, int k) {
    return tangent_measure(realization, node_masses(realization, mode), leaf, k);
}

ScaleMatrix pool_scale_matrices(std::span<const ScaleMatrix> matrices) {
    if (matrices.empty()) {
        throw std::invalid_argument("nothing to pool");
    }
    std::size_t rows = matrices.front().rows();
    for (const auto& m : matrices) {
        if (!m.has_masses()) {
            throw std::invalid_argument("pooling needs leaf masses");
        }
        rows = std::min(rows, m.rows());
    }
    const double share = 1.0 / static_cast<double>(matrices.size());
    std::vector<ScaleMatrix::Row> pooled(rows);
    for (const auto& m : matrices) {
        for (std::size_t d = 0; d < rows; ++d) {
            const auto& src = m.row(static_cast<int>(d));
            auto& dst = pooled[d];
            dst.lefts.insert(dst.lefts.end(), src.lefts.begin(), src.lefts.end());
            dst.diameters.insert(dst.diameters.end(), src.diameters.begin(), src.diameters.end());
            for (double x : src.masses) {
                dst.masses.push_back(x * share);
            }
        }
    }
    return ScaleMatrix(std::move(pooled));
}

EnsembleSummary ensemble_statistics(std::span<const TangentSample> samples) {
    if (samples.size() < 30) {
        throw InsufficientDataError("ensemble statistics need at least 30 samples, got " +
                                    std::to_string(samples.size()));
    }
    EnsembleSummary s;
    s.samples = samples.size();
    for (const auto& t : samples) {
        const double w = 1.0 / static_cast<double>(t.masses.size());
        for (std::size_t i = 0; i < t.masses.size(); ++i) {
            s.log_mass.add(std::log(t.masses[i]), w);
            s.log_diameter.add(std::log(t.intervals[i].diameter), w);
        }
        s.leaf_count.add(static_cast<double>(t.masses.size()));
    }
    return s;
}

std::vector<KsComparison> compare_ensembles(const EnsembleSummary& a, const EnsembleSummary& b, double alpha) {
    std::vector<KsComparison> out;
    auto run = [&](const std::string& name, const WeightedSample& x, const WeightedSample& y) {
        KsComparison c;
        c.statistic = name;
        c.n1 = a.samples;
        c.n2 = b.samples;
        c.distance = ks_two_sample_statistic(x, y);
        c.critical_value = ks_critical_value(c.n1, c.n2, alpha);
        c.p_value = ks_p_value(c.distance, c.n1, c.n2);
        c.reject = c.distance > c.critical_value;
        out.push_back(c);
    };
    run("log_mass", a.log_mass, b.log_mass);
    run("log_diameter", a.log_diameter, b.log_diameter);
    run("leaf_count", a.leaf_count, b.leaf_count);
    return out;
}

std::string to_string(TangentVerdict v) {
    switch (v) {
    case TangentVerdict::NotRejected:
        return "not rejected";
    case TangentVerdict::Rejected:
        return "rejected";
    case TangentVerdict::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

namespace {

template <typename Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1))));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = static_cast<int>(w); i < count; i += static_cast<int>(workers)) {
                        fn(i);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
}

} // namespace

TangentTestReport tangent_equivalence_test(const CascadeConfig& config, const TangentTestOptions& options) {
    if (options.n < 0 || options.k < 0 || options.seeds < 1) {
        throw std::invalid_argument("tangent test needs n >= 0, k >= 0 and at least one seed");
    }
    validate(config);
    TangentTestReport report;
    report.n = options.n;
    report.k = options.k;
    report.seeds = options.seeds;
    report.alpha = options.alpha;
    report.control = options.control_contraction.has_value();

    const auto seeds = static_cast<std::size_t>(options.seeds);
    std::vector<std::optional<TangentSample>> anchored(seeds);
    std::vector<std::optional<TangentSample>> reference(seeds);

    auto grow_to = [&](CascadeConfig c, int depth) {
        if (depth == 0) {
            return Realization(std::move(c));
        }
        c.max_depth = depth;
        return grow(c);
    };

    parallel_for(options.seeds, options.threads, [&](int i) {
        const auto idx = static_cast<std::uint32_t>(i);
        CascadeConfig a = config;
        a.variant = Variant::Anchored;
        a.master_seed = derive_node_seed(config.master_seed, std::vector<std::uint32_t>{0, idx});
        const auto real = grow_to(a, options.n + options.k);
        if (real.depth() >= options.n && !real.leaves(options.n).empty()) {
            const auto& candidates = real.leaves(options.n);
            Rng pick(derive_node_seed(config.master_seed, std::vector<std::uint32_t>{2, idx}));
            const auto leaf = candidates[pick.below(candidates.size())];
            try {
                anchored[idx] = tangent_measure(real, a.weighting, leaf, options.k);
            } catch (const ExtinctDepthError&) {
            }
        }

        CascadeConfig b = config;
        b.variant = Variant::NonAnchored;
        if (options.control_contraction) {
            b.contraction = *options.control_contraction;
        }
        b.master_seed = derive_node_seed(config.master_seed, std::vector<std::uint32_t>{1, idx});
        const auto ref = grow_to(b, options.k);
        try {
            reference[idx] = tangent_measure(ref, b.weighting, 0, options.k);
        } catch (const ExtinctDepthError&) {
        }
    });

    std::vector<TangentSample> left;
    std::vector<TangentSample> right;
    for (std::size_t i = 0; i < seeds; ++i) {
        if (anchored[i]) {
            left.push_back(std::move(*anchored[i]));
        }
        if (reference[i]) {
            right.push_back(std::move(*reference[i]));
        }
    }
    report.anchored_samples = left.size();
    report.anchored_extinct = seeds - left.size();
    report.reference_samples = right.size();
    report.reference_extinct = seeds - right.size();

    if (2 * report.anchored_extinct > seeds || 2 * report.reference_extinct > seeds) {
        report.verdict = TangentVerdict::Inconclusive;
        report.note = "more than half of the realizations went extinct";
        return report;
    }
    if (left.size() < 30 || right.size() < 30) {
        report.verdict = TangentVerdict::Inconclusive;
        report.note = "fewer than 30 surviving samples per side";
        return report;
    }
    report.comparisons = compare_ensembles(ensemble_statistics(left), ensemble_statistics(right), options.alpha);
    const bool any_reject = std::any_of(report.comparisons.begin(), report.comparisons.end(),
                                        [](const KsComparison& c) { return c.reject; });
    report.verdict = any_reject ? TangentVerdict::Rejected : TangentVerdict::NotRejected;
    return report;
}

} // namespace rifs
