#include "rifs/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "rifs/error.hpp"
#include "rifs/format.hpp"

namespace rifs {

void write_leaf_csv(std::ostream& out, const ScaleMatrix& matrix) {
    out << kLeafCsvHeader << '\n';
    const bool masses = matrix.has_masses();
    for (std::size_t d = 0; d < matrix.rows(); ++d) {
        const auto& row = matrix.row(static_cast<int>(d));
        for (std::size_t i = 0; i < row.diameters.size(); ++i) {
            out << d << ',' << i << ',' << format_double(row.lefts[i]) << ','
                << format_double(row.lefts[i] + row.diameters[i]) << ',' << format_double(row.diameters[i]) << ',';
            if (masses) {
                out << format_double(row.masses[i]);
            }
            out << '\n';
        }
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            return fields;
        }
        start = comma + 1;
    }
}

} // namespace

ScaleMatrix parse_leaf_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kLeafCsvHeader) {
        throw ParseError("line 1: expected header '" + std::string(kLeafCsvHeader) + "'");
    }
    std::vector<ScaleMatrix::Row> rows;
    int line_no = 1;
    std::optional<bool> with_mass;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto fields = split_fields(trim(line));
        if (fields.size() != 6) {
            throw ParseError(where + "expected 6 fields");
        }
        auto number = [&](std::string_view f, const char* name) {
            auto v = parse_number(f);
            if (!v || f.find('/') != std::string_view::npos) {
                throw ParseError(where + "bad " + name + " '" + std::string(f) + "'");
            }
            return *v;
        };
        const double depth = number(fields[0], "depth");
        const double index = number(fields[1], "leaf_index");
        if (depth != static_cast<double>(rows.size()) && depth != static_cast<double>(rows.size()) - 1) {
            throw ParseError(where + "depths must appear in order starting at 0");
        }
        if (depth == static_cast<double>(rows.size())) {
            rows.emplace_back();
        }
        auto& row = rows.back();
        if (index != static_cast<double>(row.diameters.size())) {
            throw ParseError(where + "leaf_index out of sequence");
        }
        const double left = number(fields[2], "left");
        const double diameter = number(fields[4], "diameter");
        if (!(diameter > 0.0)) {
            throw ParseError(where + "diameter must be positive");
        }
        row.lefts.push_back(left);
        row.diameters.push_back(diameter);
        const bool has_mass = !trim(fields[5]).empty();
        if (with_mass && *with_mass != has_mass) {
            throw ParseError(where + "mass column must be filled on every row or on none");
        }
        with_mass = has_mass;
        if (has_mass) {
            const double m = number(fields[5], "mass");
            if (!(m > 0.0)) {
                throw ParseError(where + "mass must be positive");
            }
            row.masses.push_back(m);
        }
    }
    if (rows.empty()) {
        throw ParseError("no leaf rows");
    }
    return ScaleMatrix(std::move(rows));
}

void write_sidecar(std::ostream& out, const Realization& realization) {
    write_config(out, realization.config());
    out << "# grown_depth = " << realization.depth() << '\n'
        << "# extinct = " << (realization.extinct() ? "true" : "false") << '\n'
        << "# leaves = " << realization.leaves(realization.depth()).size() << '\n';
}

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json array_of(const std::vector<double>& xs) {
    auto arr = nlohmann::json::array();
    for (double x : xs) {
        arr.push_back(number_or_null(x));
    }
    return arr;
}

} // namespace

nlohmann::json to_json(const SpectrumEstimate& e) {
    nlohmann::json j;
    j["q"] = array_of(e.q);
    j["tau"] = array_of(e.tau);
    j["alpha"] = array_of(e.alpha);
    j["f"] = array_of(e.f);
    j["fit_r2"] = array_of(e.fit_r2);
    j["kappa_hat"] = array_of(e.kappa_hat);
    j["lambda_hat"] = number_or_null(e.lambda_hat);
    j["mesh_mode"] = to_string(e.mesh_mode);
    j["source"] = to_string(e.source);
    j["depth_window"] = {e.depth_window.lo, e.depth_window.hi};
    j["depths"] = e.depths;
    j["hull_smoothed"] = e.hull_smoothed;
    j["warnings"] = e.warnings;
    return j;
}

nlohmann::json to_json(const TangentTestReport& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["k"] = r.k;
    j["seeds"] = r.seeds;
    j["alpha"] = r.alpha;
    j["control"] = r.control;
    j["anchored"] = {{"samples", r.anchored_samples}, {"extinct", r.anchored_extinct}};
    j["reference"] = {{"samples", r.reference_samples}, {"extinct", r.reference_extinct}};
    auto stats = nlohmann::json::array();
    for (const auto& c : r.comparisons) {
        stats.push_back({{"statistic", c.statistic},
                         {"ks", c.distance},
                         {"critical_value", c.critical_value},
                         {"p_value", c.p_value},
                         {"n1", c.n1},
                         {"n2", c.n2},
                         {"verdict", c.reject ? "rejected" : "not rejected"}});
    }
    j["statistics"] = stats;
    j["verdict"] = to_string(r.verdict);
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    return j;
}

nlohmann::json to_json(const DomainEndpoints& d) {
    auto endpoint = [](double x) -> nlohmann::json {
        if (std::isinf(x)) {
            return x > 0 ? "inf" : "-inf";
        }
        return x;
    };
    return {{"q_minus", endpoint(d.q_minus)},
            {"q_plus", endpoint(d.q_plus)},
            {"t_star", endpoint(d.t_star)},
            {"degenerate", d.degenerate}};
}

void write_heatmap_csv(std::ostream& out, const std::vector<std::vector<double>>& heatmap) {
    out << "depth,bin,mass\n";
    for (std::size_t d = 0; d < heatmap.size(); ++d) {
        for (std::size_t b = 0; b < heatmap[d].size(); ++b) {
            out << d << ',' << b << ',' << format_double(heatmap[d][b]) << '\n';
        }
    }
}

std::string sha256_file(const std::string& path) {
    const auto bytes = read_text_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed for '" + path + "'");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << contents;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rifs
