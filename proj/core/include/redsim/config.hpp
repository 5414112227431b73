#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redsim/distributions.hpp"
#include "redsim/simulation.hpp"

namespace redsim {

/// Raw contents of an experiment file: one [scenario] block and any number of
/// [distribution] blocks, each a flat list of `key = value` lines. Lines
/// starting with '#' or ';' are comments.
struct ConfigFile {
    std::map<std::string, std::string> scenario;
    std::vector<std::map<std::string, std::string>> distributions;
};

/// Throws ConfigError (with the offending line number) on malformed input.
ConfigFile parse_config(std::istream& in);
ConfigFile load_config_file(const std::string& path);

struct DistributionSpec {
    std::string label;
    JobSizeDistribution dist;
};

/// Builds a distribution from a [distribution] block:
///   kind = exponential | weibull | pareto | deterministic
///   rate | shape, scale | index, minimum | value
///   unit_mean = true|false   (rescale so that E[X] = 1)
DistributionSpec parse_distribution(const std::map<std::string, std::string>& block);

/// Parses "kind:key=value,key=value" shorthand, e.g. "weibull:shape=1.2,unit_mean=true".
DistributionSpec parse_distribution_shorthand(const std::string& text);

Discipline parse_discipline(const std::string& text);
ReplicaDependence parse_dependence(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace redsim
