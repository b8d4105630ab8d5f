#include "rifs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rifs/error.hpp"
#include "rifs/format.hpp"

namespace rifs {

std::string_view trim(std::string_view text) noexcept {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    auto parse_plain = [](std::string_view t) -> std::optional<double> {
        t = trim(t);
        if (t.empty()) {
            return std::nullopt;
        }
        if (t.front() == '+') {
            t.remove_prefix(1);
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            return std::nullopt;
        }
        return value;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parse_plain(text.substr(0, slash));
        auto den = parse_plain(text.substr(slash + 1));
        if (!num || !den || *den == 0.0) {
            return std::nullopt;
        }
        return *num / *den;
    }
    return parse_plain(text);
}

namespace {

std::vector<double> parse_list(const std::string& field, std::string_view text) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        auto value = parse_number(item);
        if (!value) {
            throw ConfigError(field, "cannot parse number '" + std::string(trim(item)) + "'");
        }
        out.push_back(*value);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::pair<std::string, std::string> split_kind(std::string_view text) {
    text = trim(text);
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        return {std::string(text), {}};
    }
    return {std::string(trim(text.substr(0, colon))), std::string(text.substr(colon + 1))};
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ", " : "") + format_double(values[i]);
    }
    return out;
}

long long parse_int(const std::string& field, std::string_view text) {
    text = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(field, "expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

WeightingMode parse_weighting(std::string_view text) {
    auto [kind, params] = split_kind(text);
    if (kind == "canonical") {
        auto values = parse_list("weighting", params);
        if (values.size() > 1) {
            throw ConfigError("weighting", "canonical takes at most one parameter (beta)");
        }
        return Canonical{values.empty() ? 1.0 : values[0]};
    }
    if (kind == "raw_product") {
        return RawProduct{};
    }
    if (kind == "explicit") {
        return Explicit{parse_list("weighting", params)};
    }
    throw ConfigError("weighting", "unknown weighting '" + kind + "'");
}

} // namespace

ContractionLaw parse_contraction(const std::string& text) {
    auto [kind, params] = split_kind(text);
    auto values = parse_list("contraction", params);
    auto expect = [&](std::size_t n) {
        if (values.size() != n) {
            throw ConfigError("contraction", kind + " expects " + std::to_string(n) + " parameters");
        }
    };
    if (kind == "constant") {
        expect(1);
        return ContractionLaw(Constant{values[0]});
    }
    if (kind == "twopoint") {
        expect(3);
        return ContractionLaw(TwoPoint{values[0], values[1], values[2]});
    }
    if (kind == "uniform") {
        expect(2);
        return ContractionLaw(Uniform{values[0], values[1]});
    }
    if (kind == "ratios") {
        return ContractionLaw(DeterministicRatios{values});
    }
    throw ConfigError("contraction", "unknown contraction law '" + kind + "'");
}

std::vector<std::string> validate(const CascadeConfig& config) {
    if (config.subtree_height < 1) {
        throw ConfigError("subtree_height", "must be at least 1");
    }
    if (config.max_depth < 1) {
        throw ConfigError("max_depth", "must be at least 1");
    }
    if (config.placement_retry_cap < 1) {
        throw ConfigError("placement.retry_cap", "must be at least 1");
    }
    if (const auto* c = std::get_if<Canonical>(&config.weighting)) {
        if (!(c->beta > 0.0) || !std::isfinite(c->beta)) {
            throw ConfigError("weighting", "beta must be positive");
        }
    }
    if (const auto* e = std::get_if<Explicit>(&config.weighting)) {
        double total = 0.0;
        for (double w : e->weights) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw ConfigError("weighting", "explicit weights must be positive");
            }
            total += w;
        }
        if (e->weights.empty() || std::abs(total - 1.0) > 1e-12) {
            throw ConfigError("weighting", "explicit weights must sum to 1");
        }
        if (e->weights.size() < config.offspring.max_offspring()) {
            throw ConfigError("weighting", "explicit weights must cover every sibling rank up to N_max");
        }
    }

    std::vector<std::string> warnings;
    if (!config.offspring.is_nondegenerate()) {
        warnings.emplace_back("offspring.probs: law is concentrated on {0, 1}");
    }
    if (!config.contraction.is_nondegenerate()) {
        warnings.emplace_back("contraction: law is degenerate (single value); tau is affine");
    }
    if (config.strict && !warnings.empty()) {
        auto colon = warnings.front().find(':');
        throw ConfigError(warnings.front().substr(0, colon), warnings.front().substr(colon + 2));
    }
    return warnings;
}

CascadeConfig parse_config(std::istream& in) {
    std::map<std::string, std::pair<std::string, int>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        std::string_view body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
            throw ConfigError(key, "duplicate key");
        }
    }

    CascadeConfig config;
    for (const auto& [key, entry] : entries) {
        const auto& value = entry.first;
        if (key == "offspring.probs") {
            config.offspring = OffspringLaw(parse_list(key, value));
        } else if (key == "contraction") {
            config.contraction = parse_contraction(value);
        } else if (key == "variant") {
            if (value == "non_anchored") {
                config.variant = Variant::NonAnchored;
            } else if (value == "anchored") {
                config.variant = Variant::Anchored;
            } else {
                throw ConfigError(key, "expected non_anchored or anchored");
            }
        } else if (key == "placement") {
            if (value == "free") {
                config.placement = Placement::Free;
            } else if (value == "disjoint_pack") {
                config.placement = Placement::DisjointPack;
            } else {
                throw ConfigError(key, "expected free or disjoint_pack");
            }
        } else if (key == "weighting") {
            config.weighting = parse_weighting(value);
        } else if (key == "subtree_height") {
            config.subtree_height = static_cast<int>(parse_int(key, value));
        } else if (key == "max_depth") {
            config.max_depth = static_cast<int>(parse_int(key, value));
        } else if (key == "master_seed") {
            std::string_view t = value;
            std::uint64_t seed = 0;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), seed);
            if (ec != std::errc{} || ptr != t.data() + t.size()) {
                throw ConfigError(key, "expected an unsigned 64-bit integer");
            }
            config.master_seed = seed;
        } else if (key == "strict") {
            if (value != "true" && value != "false") {
                throw ConfigError(key, "expected true or false");
            }
            config.strict = value == "true";
        } else if (key == "placement.retry_cap") {
            config.placement_retry_cap = static_cast<int>(parse_int(key, value));
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    validate(config);
    return config;
}

CascadeConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    return parse_config(in);
}

std::string to_string(Variant v) { return v == Variant::Anchored ? "anchored" : "non_anchored"; }

std::string to_string(Placement p) { return p == Placement::DisjointPack ? "disjoint_pack" : "free"; }

std::string describe(const WeightingMode& mode) {
    return std::visit(
        [](const auto& m) -> std::string {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Canonical>) {
                return "canonical:" + format_double(m.beta);
            } else if constexpr (std::is_same_v<M, RawProduct>) {
                return "raw_product";
            } else {
                std::string out = "explicit:";
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    out += (i ? "," : "") + format_double(m.weights[i]);
                }
                return out;
            }
        },
        mode);
}

void write_config(std::ostream& out, const CascadeConfig& config) {
    out << "offspring.probs = " << join(config.offspring.probs()) << '\n'
        << "contraction = " << describe(config.contraction) << '\n'
        << "variant = " << to_string(config.variant) << '\n'
        << "placement = " << to_string(config.placement) << '\n'
        << "weighting = " << describe(config.weighting) << '\n'
        << "subtree_height = " << config.subtree_height << '\n'
        << "max_depth = " << config.max_depth << '\n'
        << "master_seed = " << config.master_seed << '\n'
        << "strict = " << (config.strict ? "true" : "false") << '\n'
        << "placement.retry_cap = " << config.placement_retry_cap << '\n';
}

std::string config_to_string(const CascadeConfig& config) {
    std::ostringstream out;
    write_config(out, config);
    return out.str();
}

CascadeConfig worked_example_config(int max_depth, std::uint64_t seed) {
    CascadeConfig config;
    config.offspring = OffspringLaw::fixed(2);
    config.contraction = ContractionLaw(TwoPoint{1.0 / 3.0, 2.0 / 3.0, 0.5});
    config.weighting = Canonical{1.0};
    config.max_depth = max_depth;
    config.master_seed = seed;
    return config;
}

CascadeConfig dyadic_config(int max_depth, std::uint64_t seed) {
    CascadeConfig config;
    config.offspring = OffspringLaw::fixed(2);
    config.contraction = ContractionLaw(Constant{0.5});
    config.placement = Placement::DisjointPack;
    config.weighting = Canonical{1.0};
    config.max_depth = max_depth;
    config.master_seed = seed;
    return config;
}

CascadeConfig figure_config(int max_depth, std::uint64_t seed) {
    CascadeConfig config;
    config.offspring = OffspringLaw({0.0, 0.5, 0.5});
    config.contraction = ContractionLaw(Uniform{0.0, 1.0});
    config.variant = Variant::NonAnchored;
    config.placement = Placement::Free;
    config.weighting = Canonical{1.0};
    config.max_depth = max_depth;
    config.master_seed = seed;
    return config;
}

} // namespace rifs
