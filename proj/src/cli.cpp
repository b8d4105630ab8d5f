#include "rifs/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rifs/benchmarks.hpp"
#include "rifs/error.hpp"
#include "rifs/format.hpp"
#include "rifs/io.hpp"
#include "rifs/svg.hpp"

namespace rifs {

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

/// q-grid flags shared by the analysis subcommands.
struct GridFlags {
    double q_min = -2.0;
    double q_max = 4.0;
    double q_step = 0.1;
    std::vector<double> q_values;

    void attach(CLI::App& cmd) {
        cmd.add_option("--q-min", q_min, "Smallest q")->capture_default_str();
        cmd.add_option("--q-max", q_max, "Largest q")->capture_default_str();
        cmd.add_option("--q-step", q_step, "Grid step")->capture_default_str();
        cmd.add_option("--q", q_values, "Explicit q values (overrides the range)")->delimiter(',');
    }

    QGrid grid() const {
        return q_values.empty() ? QGrid::arithmetic(q_min, q_max, q_step) : QGrid::from_values(q_values);
    }
};

struct WindowFlags {
    std::optional<int> lo;
    std::optional<int> hi;

    void attach(CLI::App& cmd) {
        cmd.add_option("--depth-lo", lo, "First depth used in fits");
        cmd.add_option("--depth-hi", hi, "Last depth used in fits");
    }

    std::optional<DepthWindow> window(const ScaleMatrix& matrix) const {
        if (!lo && !hi) {
            return std::nullopt;
        }
        return DepthWindow{lo.value_or(0), hi.value_or(static_cast<int>(matrix.rows()) - 1)};
    }
};

void write_manifest(const std::string& path, const std::string& command, const CascadeConfig& config,
                    const std::string& started, unsigned threads, const std::vector<std::string>& outputs) {
    nlohmann::json manifest;
    manifest["tool"] = "rifs";
    manifest["version"] = kToolVersion;
    manifest["command"] = command;
    manifest["config"] = config_to_string(config);
    manifest["master_seed"] = config.master_seed;
    manifest["threads"] = threads;
    manifest["started_utc"] = started;
    manifest["finished_utc"] = utc_now();
    auto files = nlohmann::json::array();
    for (const auto& o : outputs) {
        files.push_back({{"path", o}, {"sha256", sha256_file(o)}});
    }
    manifest["outputs"] = files;
    write_text_file(path, manifest.dump(2) + "\n");
}

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : std::string{}; }

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed,
                 std::optional<int> depth, unsigned threads, std::ostream& out, std::ostream& err) {
    const auto started = utc_now();
    auto config = parse_config_file(config_path);
    if (seed) {
        config.master_seed = *seed;
    }
    if (depth) {
        config.max_depth = *depth;
    }
    for (const auto& w : validate(config)) {
        err << "warning: " << w << '\n';
    }
    const auto realization = grow(config, threads);
    const auto matrix = scale_matrix(realization, config.weighting);

    std::ostringstream csv;
    write_leaf_csv(csv, matrix);
    write_text_file(out_path, csv.str());
    std::ostringstream meta;
    write_sidecar(meta, realization);
    write_text_file(out_path + ".meta", meta.str());
    write_manifest(out_path + ".manifest.json", "simulate", config, started, threads, {out_path, out_path + ".meta"});

    out << "grew " << realization.depth() << " depths, " << realization.leaves(realization.depth()).size()
        << " leaves at the final depth" << (realization.extinct() ? " (extinct)" : "") << '\n';
    return kExitOk;
}

int cmd_spectrum(const std::string& in_path, const GridFlags& grid_flags, const WindowFlags& window_flags,
                 const std::string& mesh, const std::string& source, const std::string& out_path,
                 const std::string& svg_path, std::ostream& out) {
    std::ifstream in(in_path);
    if (!in) {
        throw ConfigError("--in", "cannot open '" + in_path + "'");
    }
    const auto matrix = parse_leaf_csv(in);
    const auto estimate =
        estimate_spectrum(matrix, grid_flags.grid(), parse_mesh_mode(mesh), parse_source(source),
                          window_flags.window(matrix));
    const auto doc = to_json(estimate).dump(2) + "\n";
    if (out_path.empty()) {
        out << doc;
    } else {
        write_text_file(out_path, doc);
    }
    if (!svg_path.empty() && !estimate.alpha.empty()) {
        write_text_file(svg_path, curve_svg(estimate.alpha, estimate.f, "alpha", "f(alpha)"));
    }
    return kExitOk;
}

int cmd_benchmark(int depth, int seeds, std::uint64_t master, const GridFlags& grid_flags, double tolerance,
                  std::size_t mc_samples, const std::string& out_path, std::ostream& out) {
    if (depth < 1 || seeds < 1) {
        throw ConfigError("--depth/--seeds", "must be positive");
    }
    const auto grid = grid_flags.grid();
    const OneStepEnvironment env;
    std::vector<double> sum(grid.size(), 0.0);
    std::vector<double> sum_sq(grid.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const auto seed = derive_node_seed(master, std::vector<std::uint32_t>{static_cast<std::uint32_t>(s)});
        const auto real = grow(worked_example_config(depth, seed));
        const auto est = tau_fit(scale_matrix(real, Canonical{1.0}), grid, MeshMode::GeoMean, Source::Mass);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            sum[j] += est.kappa_hat[j];
            sum_sq[j] += est.kappa_hat[j] * est.kappa_hat[j];
        }
    }

    std::ostringstream csv;
    csv << "q,kappa_closed,kappa_exact,kappa_mc,kappa_mc_se,kappa_sim,kappa_sim_se,abs_error\n";
    double worst = 0.0;
    Rng rng(derive_node_seed(master, std::vector<std::uint32_t>{0xffffffffu}));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double q = grid[j];
        const double closed = kappa_closed_form_worked_example(q);
        const double exact = kappa_exact(env, q);
        const auto mc = kappa_monte_carlo(env, q, mc_samples, rng);
        const double n = static_cast<double>(seeds);
        const double mean = sum[j] / n;
        const double var = seeds > 1 ? std::max(0.0, (sum_sq[j] - n * mean * mean) / (n - 1.0)) : 0.0;
        const double se = std::sqrt(var / n);
        const double error = std::abs(mean - closed);
        worst = std::max(worst, error);
        csv << format_double(q) << ',' << format_double(closed) << ',' << format_double(exact) << ','
            << format_double(mc.mean) << ',' << format_double(mc.standard_error) << ',' << format_double(mean)
            << ',' << csv_number(se) << ',' << format_double(error) << '\n';
    }
    if (out_path.empty()) {
        out << csv.str();
    } else {
        write_text_file(out_path, csv.str());
    }
    const bool pass = worst <= tolerance;
    out << "max |kappa_sim - kappa_closed| = " << format_double(worst) << " (tolerance " << format_double(tolerance)
        << "): " << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitFailure;
}

int cmd_tangent(const std::string& config_path, const TangentTestOptions& options, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
    const auto config = parse_config_file(config_path);
    for (const auto& w : validate(config)) {
        err << "warning: " << w << '\n';
    }
    const auto report = tangent_equivalence_test(config, options);
    const auto doc = to_json(report).dump(2) + "\n";
    if (out_path.empty()) {
        out << doc;
    } else {
        write_text_file(out_path, doc);
    }
    out << "verdict: " << to_string(report.verdict) << '\n';
    switch (report.verdict) {
    case TangentVerdict::NotRejected:
        return kExitOk;
    case TangentVerdict::Rejected:
        return kExitFailure;
    case TangentVerdict::Inconclusive:
        return kExitInconclusive;
    }
    return kExitFailure;
}

int cmd_figure1(const std::string& config_path, int depth, int bins, std::optional<std::uint64_t> seed,
                const GridFlags& grid_flags, const std::string& mesh, const std::string& source,
                const std::string& prefix, unsigned threads, std::ostream& out) {
    auto config = config_path.empty() ? figure_config(depth, 1) : parse_config_file(config_path);
    config.max_depth = depth;
    if (seed) {
        config.master_seed = *seed;
    }
    const auto realization = grow(config, threads);
    const auto matrix = scale_matrix(realization, config.weighting);
    const auto heatmap = mass_heatmap_bins(matrix, bins);

    std::ostringstream csv;
    write_heatmap_csv(csv, heatmap);
    write_text_file(prefix + "_heatmap.csv", csv.str());
    write_text_file(prefix + "_heatmap.svg", heatmap_svg(heatmap));

    const auto estimate = estimate_spectrum(matrix, grid_flags.grid(), parse_mesh_mode(mesh), parse_source(source));
    write_text_file(prefix + "_spectrum.json", to_json(estimate).dump(2) + "\n");
    if (!estimate.alpha.empty()) {
        write_text_file(prefix + "_spectrum.svg", curve_svg(estimate.alpha, estimate.f, "alpha", "f(alpha)"));
    }
    out << "leaves at depth " << realization.depth() << ": " << realization.leaves(realization.depth()).size() << '\n';
    if (!estimate.alpha.empty()) {
        const auto [amin, amax] = std::minmax_element(estimate.alpha.begin(), estimate.alpha.end());
        out << "alpha range: [" << format_double(*amin) << ", " << format_double(*amax) << "], f(alpha) "
            << (is_strictly_concave_spectrum(estimate.alpha, estimate.f) ? "strictly concave" : "not strictly concave")
            << '\n';
    }
    for (const auto& w : estimate.warnings) {
        out << "warning: " << w << '\n';
    }
    return kExitOk;
}

const char* kDefaultsPreamble =
    "# rifs cascade configuration (key = value; '#' starts a comment)\n"
    "# offspring.probs      P(N = 0), P(N = 1), ...; must sum to 1\n"
    "# contraction          constant:r | twopoint:r1,r2,p | uniform:lo,hi | ratios:r1,...,rm\n"
    "# variant              non_anchored | anchored\n"
    "# placement            free | disjoint_pack (ignored when anchored)\n"
    "# weighting            canonical:beta | raw_product | explicit:w1,...,wm\n"
    "# subtree_height       generations per embedded subtree\n"
    "# max_depth            refinement steps\n"
    "# master_seed          unsigned 64-bit seed\n"
    "# strict               reject degenerate laws instead of warning\n"
    "# placement.retry_cap  contraction redraws per node for disjoint packing\n"
    "# Numbers accept fractions such as 1/3.\n";

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Branching-process random IFS simulator and multifractal analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Grow a realization and write the leaf CSV");
    std::string sim_config;
    std::string sim_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> sim_depth;
    simulate->add_option("--config", sim_config, "Config file")->required();
    simulate->add_option("--out", sim_out, "Output CSV path")->required();
    simulate->add_option("--seed", sim_seed, "Override master_seed");
    simulate->add_option("--depth", sim_depth, "Override max_depth");

    auto* spectrum = app.add_subcommand("spectrum", "Estimate tau(q) and f(alpha) from a leaf CSV");
    std::string spec_in;
    std::string spec_out;
    std::string spec_svg;
    std::string spec_mesh = "geomean";
    std::string spec_source = "mass";
    GridFlags spec_grid;
    WindowFlags spec_window;
    spectrum->add_option("--in", spec_in, "Leaf CSV")->required();
    spectrum->add_option("--out", spec_out, "Spectrum JSON (stdout when omitted)");
    spectrum->add_option("--svg", spec_svg, "Optional (alpha, f) plot");
    spectrum->add_option("--mesh", spec_mesh, "max | geomean | median")->capture_default_str();
    spectrum->add_option("--source", spec_source, "mass | diameter")->capture_default_str();
    spec_grid.attach(*spectrum);
    spec_window.attach(*spectrum);

    auto* benchmark = app.add_subcommand("benchmark", "Compare simulated kappa to the worked-example closed form");
    int bench_depth = 14;
    int bench_seeds = 20;
    std::uint64_t bench_master = 1;
    double bench_tol = 0.05;
    std::size_t bench_mc = 20000;
    std::string bench_out;
    GridFlags bench_grid;
    bench_grid.q_min = -1.0;
    bench_grid.q_max = 3.0;
    bench_grid.q_step = 0.5;
    benchmark->add_option("--depth", bench_depth)->capture_default_str();
    benchmark->add_option("--seeds", bench_seeds)->capture_default_str();
    benchmark->add_option("--seed", bench_master, "Master seed")->capture_default_str();
    benchmark->add_option("--tolerance", bench_tol)->capture_default_str();
    benchmark->add_option("--mc-samples", bench_mc)->capture_default_str();
    benchmark->add_option("--out", bench_out, "Report CSV (stdout when omitted)");
    bench_grid.attach(*benchmark);

    auto* tangent = app.add_subcommand("tangent", "Anchored tangent-measure equivalence test");
    std::string tan_config;
    std::string tan_out;
    std::string tan_control;
    TangentTestOptions tan_opts;
    tangent->add_option("--config", tan_config, "Config file")->required();
    tangent->add_option("--n", tan_opts.n, "Depth of the zoom leaf")->capture_default_str();
    tangent->add_option("--k", tan_opts.k, "Sub-depth below the leaf")->capture_default_str();
    tangent->add_option("--seeds", tan_opts.seeds, "Realizations per side")->capture_default_str();
    tangent->add_option("--alpha", tan_opts.alpha, "Test level")->capture_default_str();
    tangent->add_option("--control-contraction", tan_control, "Contraction law for a mismatched reference side");
    tangent->add_option("--out", tan_out, "Report JSON (stdout when omitted)");

    auto* figure = app.add_subcommand("figure1", "Mass heatmap and spectrum for one realization");
    std::string fig_config;
    std::string fig_prefix = "figure1";
    std::string fig_mesh = "geomean";
    std::string fig_source = "mass";
    int fig_depth = 20;
    int fig_bins = 128;
    std::optional<std::uint64_t> fig_seed;
    GridFlags fig_grid;
    fig_grid.q_min = -1.0;
    fig_grid.q_max = 3.0;
    figure->add_option("--config", fig_config, "Config file (default: uniform contraction and translation)");
    figure->add_option("--depth", fig_depth)->capture_default_str();
    figure->add_option("--bins", fig_bins)->capture_default_str();
    figure->add_option("--seed", fig_seed, "Override master_seed");
    figure->add_option("--mesh", fig_mesh)->capture_default_str();
    figure->add_option("--source", fig_source)->capture_default_str();
    figure->add_option("--out-prefix", fig_prefix)->capture_default_str();
    fig_grid.attach(*figure);

    auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*simulate) {
            return cmd_simulate(sim_config, sim_out, sim_seed, sim_depth, threads, out, err);
        }
        if (*spectrum) {
            return cmd_spectrum(spec_in, spec_grid, spec_window, spec_mesh, spec_source, spec_out, spec_svg, out);
        }
        if (*benchmark) {
            return cmd_benchmark(bench_depth, bench_seeds, bench_master, bench_grid, bench_tol, bench_mc, bench_out,
                                 out);
        }
        if (*tangent) {
            if (!tan_control.empty()) {
                tan_opts.control_contraction = parse_contraction(tan_control);
            }
            tan_opts.threads = threads;
            return cmd_tangent(tan_config, tan_opts, tan_out, out, err);
        }
        if (*figure) {
            return cmd_figure1(fig_config, fig_depth, fig_bins, fig_seed, fig_grid, fig_mesh, fig_source, fig_prefix,
                               threads, out);
        }
        if (*defaults) {
            out << kDefaultsPreamble;
            write_config(out, CascadeConfig{});
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientDataError& e) {
        err << "insufficient data: " << e.what() << '\n';
        return kExitInsufficientData;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

} // namespace rifs
