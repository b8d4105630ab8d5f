#include "rifs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rifs/error.hpp"

namespace rifs {

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc;
    }
    const auto half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> sibling_weights(std::span<const double> ratios, const WeightingMode& mode) {
    std::vector<double> w(ratios.size());
    if (const auto* c = std::get_if<Canonical>(&mode)) {
        double total = 0.0;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            w[i] = std::pow(ratios[i], c->beta);
            total += w[i];
        }
        for (auto& x : w) {
            x /= total;
        }
    } else if (const auto* e = std::get_if<Explicit>(&mode)) {
        if (ratios.size() > e->weights.size()) {
            throw ConfigError("weighting", "explicit weights do not cover " + std::to_string(ratios.size()) +
                                               " siblings");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            total += e->weights[i];
        }
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            w[i] = ratios.size() == e->weights.size() ? e->weights[i] : e->weights[i] / total;
        }
    } else {
        std::copy(ratios.begin(), ratios.end(), w.begin());
    }
    return w;
}

std::vector<double> node_masses(const Realization& realization, const WeightingMode& mode) {
    const auto nodes = realization.nodes();
    std::vector<double> mass(nodes.size(), 0.0);
    mass[0] = 1.0;
    std::vector<double> ratios;
    // Children always have larger ids than their parent.
    for (const Node& n : nodes) {
        if (n.child_count == 0) {
            continue;
        }
        const auto kids = realization.children(n);
        ratios.resize(kids.size());
        std::transform(kids.begin(), kids.end(), ratios.begin(), [](const Node& c) { return c.ratio; });
        const auto w = sibling_weights(ratios, mode);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            mass[kids[i].id] = mass[n.id] * w[i];
        }
    }
    return mass;
}

std::vector<std::vector<double>> leaf_masses(const Realization& realization, const WeightingMode& mode,
                                             std::optional<int> up_to_depth) {
    const int last = up_to_depth.value_or(realization.depth());
    if (last > realization.depth()) {
        throw ExtinctDepthError(realization.depth() + 1);
    }
    for (int d = 0; d <= last; ++d) {
        if (realization.leaves(d).empty()) {
            throw ExtinctDepthError(d);
        }
    }
    const auto mass = node_masses(realization, mode);
    std::vector<std::vector<double>> out;
    for (int d = 0; d <= last; ++d) {
        const auto& ids = realization.leaves(d);
        std::vector<double> row(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            row[i] = mass[ids[i]];
        }
        // Exact for conservative weights without extinction; otherwise this
        // renormalizes away mass lost to extinct lineages or RawProduct scaling.
        const double total = pairwise_sum(row);
        if (total != 1.0) {
            for (auto& m : row) {
                m /= total;
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

ScaleMatrix::ScaleMatrix(std::vector<Row> rows) : rows_(std::move(rows)) {
    for (const auto& r : rows_) {
        if (r.lefts.size() != r.diameters.size() || (!r.masses.empty() && r.masses.size() != r.diameters.size())) {
            throw std::invalid_argument("scale matrix row has inconsistent lengths");
        }
    }
}

bool ScaleMatrix::has_masses() const noexcept {
    return !rows_.empty() && std::all_of(rows_.begin(), rows_.end(), [](const Row& r) { return !r.masses.empty(); });
}

const ScaleMatrix::Row& ScaleMatrix::row(int depth) const {
    if (depth < 0 || static_cast<std::size_t>(depth) >= rows_.size()) {
        throw ExtinctDepthError(depth);
    }
    return rows_[static_cast<std::size_t>(depth)];
}

ScaleMatrix scale_matrix(const Realization& realization, const WeightingMode& mode) {
    int last = realization.depth();
    while (last >= 0 && realization.leaves(last).empty()) {
        --last;
    }
    const auto masses = leaf_masses(realization, mode, last);
    std::vector<ScaleMatrix::Row> rows;
    for (int d = 0; d <= last; ++d) {
        ScaleMatrix::Row r;
        for (auto id : realization.leaves(d)) {
            const Node& n = realization.node(id);
            r.lefts.push_back(n.left);
            r.diameters.push_back(n.diameter);
        }
        r.masses = masses[static_cast<std::size_t>(d)];
        rows.push_back(std::move(r));
    }
    return ScaleMatrix(std::move(rows));
}

std::vector<std::vector<double>> mass_heatmap_bins(const ScaleMatrix& matrix, int bins) {
    if (bins < 1) {
        throw std::invalid_argument("bins must be positive");
    }
    if (!matrix.has_masses()) {
        throw std::invalid_argument("heatmap needs leaf masses");
    }
    const double width = 1.0 / bins;
    std::vector<std::vector<double>> out;
    for (std::size_t d = 0; d < matrix.rows(); ++d) {
        const auto& row = matrix.row(static_cast<int>(d));
        std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
        for (std::size_t i = 0; i < row.diameters.size(); ++i) {
            const double lo = std::clamp(row.lefts[i], 0.0, 1.0);
            const double hi = std::clamp(row.lefts[i] + row.diameters[i], 0.0, 1.0);
            const int first = std::clamp(static_cast<int>(lo * bins), 0, bins - 1);
            const int last = std::clamp(static_cast<int>(hi * bins), 0, bins - 1);
            if (first == last || !(hi > lo)) {
                hist[static_cast<std::size_t>(first)] += row.masses[i];
                continue;
            }
            const double span = hi - lo;
            double assigned = 0.0;
            for (int b = first; b < last; ++b) {
                const double overlap = std::min(hi, (b + 1) * width) - std::max(lo, b * width);
                const double part = row.masses[i] * std::max(0.0, overlap) / span;
                hist[static_cast<std::size_t>(b)] += part;
                assigned += part;
            }
            // Remainder goes to the last bin so the interval's mass is kept whole.
            hist[static_cast<std::size_t>(last)] += row.masses[i] - assigned;
        }
        out.push_back(std::move(hist));
    }
    return out;
}

} // namespace rifs
