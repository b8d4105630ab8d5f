#include "rifs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rifs/error.hpp"

namespace rifs {

std::string to_string(MeshMode mode) {
    switch (mode) {
    case MeshMode::Max:
        return "max";
    case MeshMode::GeoMean:
        return "geomean";
    case MeshMode::Median:
        return "median";
    }
    return "?";
}

std::string to_string(Source source) { return source == Source::Mass ? "mass" : "diameter"; }

MeshMode parse_mesh_mode(const std::string& text) {
    if (text == "max") {
        return MeshMode::Max;
    }
    if (text == "geomean") {
        return MeshMode::GeoMean;
    }
    if (text == "median") {
        return MeshMode::Median;
    }
    throw std::invalid_argument("unknown mesh mode '" + text + "' (max, geomean, median)");
}

Source parse_source(const std::string& text) {
    if (text == "mass") {
        return Source::Mass;
    }
    if (text == "diameter") {
        return Source::Diameter;
    }
    throw std::invalid_argument("unknown source '" + text + "' (mass, diameter)");
}

QGrid QGrid::arithmetic(double q_min, double q_max, double step) {
    if (!(step > 0.0) || !(q_max >= q_min)) {
        throw std::invalid_argument("q grid needs q_min <= q_max and a positive step");
    }
    const auto count = static_cast<long>(std::floor((q_max - q_min) / step + 1e-9));
    std::vector<double> values;
    for (long i = 0; i <= count; ++i) {
        double q = q_min + static_cast<double>(i) * step;
        for (double anchor : {0.0, 1.0}) {
            if (std::abs(q - anchor) < step * 1e-9) {
                q = anchor;
            }
        }
        values.push_back(q);
    }
    for (double anchor : {0.0, 1.0}) {
        if (anchor >= q_min && anchor <= q_max && std::find(values.begin(), values.end(), anchor) == values.end()) {
            values.insert(std::lower_bound(values.begin(), values.end(), anchor), anchor);
        }
    }
    QGrid grid;
    grid.values_ = std::move(values);
    return grid;
}

QGrid QGrid::from_values(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("q grid is empty");
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    QGrid grid;
    grid.values_ = std::move(values);
    return grid;
}

double QGrid::max_spacing() const noexcept {
    double gap = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) {
        gap = std::max(gap, values_[i] - values_[i - 1]);
    }
    return gap;
}

double log_partition_function(std::span<const double> row, double q) {
    if (row.empty()) {
        throw std::invalid_argument("partition function of an empty row");
    }
    std::vector<double> exponents(row.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!(row[i] > 0.0)) {
            throw std::invalid_argument("partition function needs positive entries");
        }
        exponents[i] = q == 0.0 ? 0.0 : q * std::log(row[i]);
        peak = std::max(peak, exponents[i]);
    }
    for (auto& e : exponents) {
        e = std::exp(e - peak);
    }
    return peak + std::log(pairwise_sum(exponents));
}

double partition_function(std::span<const double> row, double q) { return std::exp(log_partition_function(row, q)); }

double log_mesh_scale(std::span<const double> diameters, MeshMode mode) {
    if (diameters.empty()) {
        throw std::invalid_argument("mesh scale of an empty row");
    }
    switch (mode) {
    case MeshMode::Max:
        return std::log(*std::max_element(diameters.begin(), diameters.end()));
    case MeshMode::GeoMean: {
        std::vector<double> logs(diameters.size());
        std::transform(diameters.begin(), diameters.end(), logs.begin(), [](double d) { return std::log(d); });
        return pairwise_sum(logs) / static_cast<double>(logs.size());
    }
    case MeshMode::Median: {
        std::vector<double> sorted(diameters.begin(), diameters.end());
        std::sort(sorted.begin(), sorted.end());
        const auto n = sorted.size();
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        return std::log(median);
    }
    }
    return 0.0;
}

double mesh_scale(std::span<const double> diameters, MeshMode mode) {
    return std::exp(log_mesh_scale(diameters, mode));
}

namespace {

std::vector<int> usable_depths(const ScaleMatrix& matrix, int lo, int hi) {
    std::vector<int> depths;
    for (int d = std::max(lo, 0); d <= hi && d < static_cast<int>(matrix.rows()); ++d) {
        if (matrix.leaf_count(d) >= 2) {
            depths.push_back(d);
        }
    }
    return depths;
}

} // namespace

DepthWindow default_depth_window(const ScaleMatrix& matrix, int transient) {
    const int last = static_cast<int>(matrix.rows()) - 1;
    auto after = usable_depths(matrix, transient, last);
    if (after.size() >= 3) {
        return {after.front(), after.back()};
    }
    auto all = usable_depths(matrix, 0, last);
    if (all.size() >= 3) {
        return {all.front(), all.back()};
    }
    throw InsufficientDataError("fewer than 3 depths with at least two leaves (found " + std::to_string(all.size()) +
                                ")");
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least squares needs two or more paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("least squares with constant abscissa");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = std::max(0.0, syy - fit.slope * sxy);
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

SpectrumEstimate tau_fit(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                         std::optional<DepthWindow> window) {
    if (source == Source::Mass && !matrix.has_masses()) {
        throw std::invalid_argument("mass source requested but no masses are attached");
    }
    SpectrumEstimate est;
    est.q = grid.values();
    est.mesh_mode = mesh_mode;
    est.source = source;
    est.depth_window = window ? *window : default_depth_window(matrix);
    est.depths = usable_depths(matrix, est.depth_window.lo, est.depth_window.hi);
    if (est.depths.size() < 3) {
        throw InsufficientDataError("depth window [" + std::to_string(est.depth_window.lo) + ", " +
                                    std::to_string(est.depth_window.hi) + "] has fewer than 3 usable depths");
    }
    if (est.depth_window.lo < 3) {
        est.warnings.emplace_back("transient depths retained in the fit; expect wide error bars");
    }

    std::vector<double> n_axis;
    for (int d : est.depths) {
        const auto& row = matrix.row(d);
        const auto& values = source == Source::Mass ? row.masses : row.diameters;
        std::vector<double> lz(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            lz[j] = log_partition_function(values, grid[j]);
        }
        est.log_z.push_back(std::move(lz));
        est.log_mesh.push_back(log_mesh_scale(row.diameters, mesh_mode));
        n_axis.push_back(static_cast<double>(d));
    }
    est.lambda_hat = least_squares(n_axis, est.log_mesh).slope;

    std::vector<double> column(est.depths.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t i = 0; i < est.depths.size(); ++i) {
            column[i] = est.log_z[i][j];
        }
        const auto fit = least_squares(est.log_mesh, column);
        est.tau.push_back(fit.slope);
        est.fit_r2.push_back(fit.r2);
        est.kappa_hat.push_back(least_squares(n_axis, column).slope);
    }
    return est;
}

std::vector<double> tau_via_kappa(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                                  std::optional<DepthWindow> window) {
    const auto est = tau_fit(matrix, grid, mesh_mode, source, window);
    if (!(est.lambda_hat < 0.0)) {
        throw InsufficientDataError("mesh scale does not decay with depth");
    }
    std::vector<double> tau(est.kappa_hat.size());
    for (std::size_t j = 0; j < tau.size(); ++j) {
        tau[j] = est.kappa_hat[j] / est.lambda_hat;
    }
    return tau;
}

LegendreResult legendre(std::span<const double> q, std::span<const double> tau) {
    if (q.size() != tau.size() || q.size() < 3) {
        throw std::invalid_argument("legendre needs at least three (q, tau) points");
    }
    const auto n = q.size();
    LegendreResult out;
    out.alpha.resize(n);
    out.f.resize(n);
    out.alpha[0] = (tau[1] - tau[0]) / (q[1] - q[0]);
    out.alpha[n - 1] = (tau[n - 1] - tau[n - 2]) / (q[n - 1] - q[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.alpha[i] = (tau[i + 1] - tau[i - 1]) / (q[i + 1] - q[i - 1]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.f[i] = q[i] * out.alpha[i] - tau[i];
    }
    return out;
}

std::string to_string(Curvature c) {
    switch (c) {
    case Curvature::Affine:
        return "affine/degenerate";
    case Curvature::StrictlyConvex:
        return "strictly convex";
    case Curvature::StrictlyConcave:
        return "strictly concave";
    case Curvature::Indefinite:
        return "indefinite";
    }
    return "?";
}

ConvexityReport convexity_report(std::span<const double> q, std::span<const double> tau, double affine_tol,
                                 std::optional<std::pair<double, double>> central) {
    if (q.size() != tau.size() || q.size() < 3) {
        throw std::invalid_argument("convexity report needs at least three (q, tau) points");
    }
    ConvexityReport report;
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        if (central && (q[i] < central->first - 1e-12 || q[i] > central->second + 1e-12)) {
            continue;
        }
        report.centers.push_back(q[i]);
        report.second_differences.push_back(tau[i - 1] - 2.0 * tau[i] + tau[i + 1]);
    }
    if (report.second_differences.empty()) {
        throw std::invalid_argument("no interior grid points inside the central range");
    }
    const auto [lo, hi] = std::minmax_element(report.second_differences.begin(), report.second_differences.end());
    report.min_second_difference = *lo;
    report.max_second_difference = *hi;
    if (std::max(std::abs(*lo), std::abs(*hi)) <= affine_tol) {
        report.verdict = Curvature::Affine;
    } else if (*lo > 0.0) {
        report.verdict = Curvature::StrictlyConvex;
    } else if (*hi < 0.0) {
        report.verdict = Curvature::StrictlyConcave;
    } else {
        report.verdict = Curvature::Indefinite;
    }
    return report;
}

std::vector<double> concave_hull(std::span<const double> q, std::span<const double> tau) {
    // Upper hull by monotone chain, then linear interpolation back onto q.
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < q.size(); ++i) {
        while (hull.size() >= 2) {
            const auto a = hull[hull.size() - 2];
            const auto b = hull.back();
            const double cross = (q[b] - q[a]) * (tau[i] - tau[a]) - (tau[b] - tau[a]) * (q[i] - q[a]);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(i);
    }
    // The hull keeps both endpoints, so every q lies on some segment.
    std::vector<double> out(q.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        while (seg + 2 < hull.size() && hull[seg + 1] < i) {
            ++seg;
        }
        if (hull.size() == 1) {
            out[i] = tau[i];
            continue;
        }
        const auto a = hull[seg];
        const auto b = hull[seg + 1];
        const double t = (q[i] - q[a]) / (q[b] - q[a]);
        out[i] = tau[a] + t * (tau[b] - tau[a]);
    }
    return out;
}

bool is_strictly_concave_spectrum(std::span<const double> alpha, std::span<const double> f) {
    if (alpha.size() != f.size() || alpha.size() < 3) {
        return false;
    }
    std::vector<std::size_t> order(alpha.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return alpha[a] < alpha[b]; });
    if (!(alpha[order.back()] - alpha[order.front()] > 0.0)) {
        return false;
    }
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < order.size(); ++k) {
        const double da = alpha[order[k]] - alpha[order[k - 1]];
        if (!(da > 0.0)) {
            return false;
        }
        const double slope = (f[order[k]] - f[order[k - 1]]) / da;
        if (!(slope < previous)) {
            return false;
        }
        previous = slope;
    }
    return true;
}

SpectrumEstimate estimate_spectrum(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                                   std::optional<DepthWindow> window) {
    auto est = tau_fit(matrix, grid, mesh_mode, source, window);
    if (grid.size() < 3 || grid.max_spacing() > 0.25) {
        est.warnings.emplace_back("q grid too coarse for finite-difference Legendre (needs >= 3 points, step <= 0.25)");
        return est;
    }
    std::vector<double> tau = est.tau;
    const auto report = convexity_report(est.q, tau);
    if (report.verdict == Curvature::Indefinite) {
        tau = concave_hull(est.q, tau);
        est.hull_smoothed = true;
        est.warnings.emplace_back("tau is not strictly concave on the grid; concave hull applied before Legendre");
    }
    auto lt = legendre(est.q, tau);
    est.alpha = std::move(lt.alpha);
    est.f = std::move(lt.f);
    return est;
}

} // namespace rifs
