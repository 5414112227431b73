#include "redsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "redsim/errors.hpp"

namespace redsim {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_real(const std::string& text, const std::string& key) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError("invalid number for '" + key + "': '" + text + "'");
    }
    return v;
}

bool to_bool(const std::string& text, const std::string& key) {
    const auto t = lower(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

const std::string& require(const std::map<std::string, std::string>& block, const std::string& key,
                           const std::string& kind) {
    const auto it = block.find(key);
    if (it == block.end()) throw ConfigError(kind + " distribution needs '" + key + "'");
    return it->second;
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
    ConfigFile cfg;
    std::map<std::string, std::string>* current = nullptr;
    bool saw_scenario = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            const std::string name = lower(trim(std::string_view(t).substr(1, t.size() - 2)));
            if (name == "scenario") {
                if (saw_scenario) throw ConfigError("line " + std::to_string(lineno) + ": duplicate [scenario]");
                saw_scenario = true;
                current = &cfg.scenario;
            } else if (name == "distribution") {
                cfg.distributions.emplace_back();
                current = &cfg.distributions.back();
            } else {
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + name + "]");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (!current) throw ConfigError("line " + std::to_string(lineno) + ": key outside of a section");
        const std::string key = lower(trim(std::string_view(t).substr(0, eq)));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!current->emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

DistributionSpec parse_distribution(const std::map<std::string, std::string>& block) {
    const auto kind_it = block.find("kind");
    if (kind_it == block.end()) throw ConfigError("distribution block needs 'kind'");
    const std::string kind = lower(kind_it->second);
    auto real = [&](const std::string& key) { return to_real(require(block, key, kind), key); };
    auto real_or = [&](const std::string& key, double fallback) {
        const auto it = block.find(key);
        return it == block.end() ? fallback : to_real(it->second, key);
    };

    std::optional<JobSizeDistribution> dist;
    if (kind == "exponential" || kind == "exp") {
        dist = JobSizeDistribution::exponential(real_or("rate", 1.0));
    } else if (kind == "weibull") {
        dist = JobSizeDistribution::weibull(real("shape"), real_or("scale", 1.0));
    } else if (kind == "pareto") {
        dist = JobSizeDistribution::pareto(real("index"), real_or("minimum", 1.0));
    } else if (kind == "deterministic") {
        dist = JobSizeDistribution::deterministic(real_or("value", 1.0));
    } else {
        throw ConfigError("unknown distribution kind '" + kind_it->second + "'");
    }
    if (const auto it = block.find("unit_mean"); it != block.end() && to_bool(it->second, "unit_mean")) {
        dist = normalize_to_unit_mean(*dist);
    }
    for (const auto& [key, value] : block) {
        static const char* known[] = {"kind", "label", "rate", "shape", "scale",
                                      "index", "minimum", "value", "unit_mean"};
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ConfigError("unknown distribution key '" + key + "'");
        }
    }
    const auto label_it = block.find("label");
    return {label_it != block.end() ? label_it->second : kind, *dist};
}

DistributionSpec parse_distribution_shorthand(const std::string& text) {
    std::map<std::string, std::string> block;
    const auto colon = text.find(':');
    block["kind"] = trim(std::string_view(text).substr(0, colon));
    if (colon != std::string::npos) {
        std::stringstream rest(text.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                // A bare flag such as "unit_mean".
                block[lower(trim(item))] = "true";
            } else {
                block[lower(trim(std::string_view(item).substr(0, eq)))] =
                    trim(std::string_view(item).substr(eq + 1));
            }
        }
    }
    return parse_distribution(block);
}

Discipline parse_discipline(const std::string& text) {
    const auto t = lower(trim(text));
    if (t == "fcfs") return Discipline::FCFS;
    if (t == "ps") return Discipline::PS;
    throw ConfigError("unknown discipline '" + text + "' (expected fcfs or ps)");
}

ReplicaDependence parse_dependence(const std::string& text) {
    const auto t = lower(trim(text));
    if (t == "iid") return ReplicaDependence::IID;
    if (t == "identical") return ReplicaDependence::Identical;
    throw ConfigError("unknown dependence '" + text + "' (expected iid or identical)");
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = trim(item);
        if (!t.empty()) out.push_back(to_real(t, "list"));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        if (v != static_cast<int>(v)) throw ConfigError("expected integers in list");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace redsim
