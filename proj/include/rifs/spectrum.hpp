#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rifs/measure.hpp"

namespace rifs {

enum class MeshMode { Max, GeoMean, Median };
enum class Source { Mass, Diameter };

std::string to_string(MeshMode mode);
std::string to_string(Source source);
MeshMode parse_mesh_mode(const std::string& text);
Source parse_source(const std::string& text);

/// Ordered grid of moment orders q.
class QGrid {
  public:
    /// Arithmetic grid q_min, q_min + step, ..., q_max; values within
    /// step * 1e-9 of 0 or 1 snap exactly, and 0 and 1 are inserted when in
    /// range but missed by the step.
    static QGrid arithmetic(double q_min, double q_max, double step);
    static QGrid from_values(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    /// Largest gap between neighbouring grid points (0 for a single point).
    double max_spacing() const noexcept;

  private:
    std::vector<double> values_;
};

/// Sum of row_i^q, evaluated as log-sum-exp. Throws std::invalid_argument
/// on an empty row or non-positive entries.
double log_partition_function(std::span<const double> row, double q);
double partition_function(std::span<const double> row, double q);

double log_mesh_scale(std::span<const double> diameters, MeshMode mode);
double mesh_scale(std::span<const double> diameters, MeshMode mode);

/// Inclusive range of depths used for the fits.
struct DepthWindow {
    int lo = 0;
    int hi = 0;
};

/// Depths with at least two leaves. By default the first `transient` depths
/// are dropped, unless fewer than three depths would remain. Throws
/// InsufficientDataError when fewer than three usable depths exist.
DepthWindow default_depth_window(const ScaleMatrix& matrix, int transient = 3);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares y ~ a + b x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

struct SpectrumEstimate {
    std::vector<double> q;
    std::vector<int> depths;
    /// log Z_n(q), indexed [depth][q].
    std::vector<std::vector<double>> log_z;
    std::vector<double> log_mesh;
    std::vector<double> tau;
    std::vector<double> alpha;
    std::vector<double> f;
    double lambda_hat = 0.0;
    std::vector<double> kappa_hat;
    std::vector<double> fit_r2;
    DepthWindow depth_window;
    MeshMode mesh_mode = MeshMode::GeoMean;
    Source source = Source::Mass;
    bool hull_smoothed = false;
    std::vector<std::string> warnings;
};

/// Per-q least-squares slope of log Z_n(q) against log eps_n over the window
/// (default: default_depth_window). Fills tau, log_z, log_mesh, kappa_hat,
/// lambda_hat and fit_r2; alpha and f stay empty.
SpectrumEstimate tau_fit(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                         std::optional<DepthWindow> window = std::nullopt);

/// kappa_hat(q) / lambda_hat, each a least-squares slope against depth.
std::vector<double> tau_via_kappa(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                                  std::optional<DepthWindow> window = std::nullopt);

struct LegendreResult {
    std::vector<double> alpha;
    std::vector<double> f;
};

/// alpha = dtau/dq by central differences (one-sided at the ends),
/// f = q alpha - tau. Needs at least three points.
LegendreResult legendre(std::span<const double> q, std::span<const double> tau);

enum class Curvature { Affine, StrictlyConvex, StrictlyConcave, Indefinite };
std::string to_string(Curvature c);

struct ConvexityReport {
    /// tau[i-1] - 2 tau[i] + tau[i+1] for interior points i.
    std::vector<double> second_differences;
    /// q at the centre of each second difference.
    std::vector<double> centers;
    double min_second_difference = 0.0;
    double max_second_difference = 0.0;
    Curvature verdict = Curvature::Affine;
};

/// Curvature of tau over the grid, restricted to centres within [q_lo, q_hi]
/// when given. |second differences| <= affine_tol is reported as affine.
ConvexityReport convexity_report(std::span<const double> q, std::span<const double> tau, double affine_tol = 1e-6,
                                 std::optional<std::pair<double, double>> central = std::nullopt);

/// Least concave majorant of (q, tau), evaluated on the grid.
std::vector<double> concave_hull(std::span<const double> q, std::span<const double> tau);

/// True when the (alpha, f) points, sorted by alpha, form a strictly concave
/// polyline with positive alpha width.
bool is_strictly_concave_spectrum(std::span<const double> alpha, std::span<const double> f);

/// tau_fit followed by legendre. When tau is neither affine nor strictly
/// concave, a concave hull is applied before differencing and reported.
SpectrumEstimate estimate_spectrum(const ScaleMatrix& matrix, const QGrid& grid, MeshMode mesh_mode, Source source,
                                   std::optional<DepthWindow> window = std::nullopt);

} // namespace rifs
