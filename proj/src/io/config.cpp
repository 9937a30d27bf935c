#include "psolim/io/config.hpp"

#include "psolim/core/objective.hpp"
#include "psolim/rate/rate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace psolim {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
    }
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
    params.validate();
    if (!ObjectiveRegistry::instance().contains(objective))
        throw ConfigError("unknown objective: " + objective);
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (!(init_range > 0.0)) throw ConfigError("init_range must be positive");
    if (mode != "optimize" && mode != "analysis")
        throw ConfigError("mode must be 'optimize' or 'analysis'");

    if (variant != "gpso" && variant != "basic") {
        const auto colon = variant.find(':');
        const std::string head = variant.substr(0, colon);
        if (colon == std::string::npos || (head != "inertia" && head != "constriction"))
            throw ConfigError("variant must be gpso | basic | inertia:<w> | constriction:<chi>");
        parse_double("variant", variant.substr(colon + 1));
    }
    if (noise != "none") {
        const auto colon = noise.find(':');
        if (colon == std::string::npos || noise.substr(0, colon) != "gauss")
            throw ConfigError("noise must be none | gauss:<sigma>");
        const double sigma = parse_double("noise", noise.substr(colon + 1));
        if (sigma < 0.0) throw ConfigError("noise sigma must be nonnegative");
    }
}

NoiseModel ExperimentConfig::make_noise_model() const {
    if (noise == "none") return NoiseModel::none();
    const auto colon = noise.find(':');
    const double sigma = parse_double("noise", noise.substr(colon + 1));
    return NoiseModel::iid_gaussian(sigma, params.state_size(), seed);
}

std::size_t ExperimentConfig::effective_burn_in() const {
    if (burn_in >= 0) return static_cast<std::size_t>(burn_in);
    return default_burn_in(params.epsilon);
}

std::string ExperimentConfig::to_key_value() const {
    std::ostringstream text;
    text.precision(17);
    text << "burn_in = " << burn_in << '\n'
        << "c1 = " << params.c1 << '\n'
        << "c2 = " << params.c2 << '\n'
        << "chi = " << params.chi << '\n'
        << "dim = " << params.dim << '\n'
        << "epsilon = " << params.epsilon << '\n'
        << "init_range = " << init_range << '\n'
        << "jobs = " << jobs << '\n'
        << "kappa1 = " << params.kappa1 << '\n'
        << "kappa2 = " << params.kappa2 << '\n'
        << "mode = " << mode << '\n'
        << "noise = " << noise << '\n'
        << "objective = " << objective << '\n'
        << "out = " << out << '\n'
        << "particles = " << params.particles << '\n'
        << "pg_star = " << pg_star << '\n'
        << "pr_star = " << pr_star << '\n'
        << "reps = " << reps << '\n'
        << "seed = " << seed << '\n'
        << "steps = " << steps << '\n'
        << "variant = " << variant << '\n';
    return text.str();
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        const auto equals = line.find('=');
        if (equals == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_number) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, equals));
        const std::string value = trim(line.substr(equals + 1));

        if (key == "objective") config.objective = value;
        else if (key == "dim") config.params.dim = static_cast<int>(parse_int(key, value));
        else if (key == "particles") config.params.particles = static_cast<int>(parse_int(key, value));
        else if (key == "epsilon") config.params.epsilon = parse_double(key, value);
        else if (key == "chi") config.params.chi = parse_double(key, value);
        else if (key == "kappa1") config.params.kappa1 = parse_double(key, value);
        else if (key == "kappa2") config.params.kappa2 = parse_double(key, value);
        else if (key == "c1") config.params.c1 = parse_double(key, value);
        else if (key == "c2") config.params.c2 = parse_double(key, value);
        else if (key == "variant") config.variant = value;
        else if (key == "noise") config.noise = value;
        else if (key == "mode") config.mode = value;
        else if (key == "pr_star") config.pr_star = parse_double(key, value);
        else if (key == "pg_star") config.pg_star = parse_double(key, value);
        else if (key == "steps") config.steps = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "reps") config.reps = static_cast<int>(parse_int(key, value));
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "burn_in") config.burn_in = static_cast<long>(parse_int(key, value));
        else if (key == "init_range") config.init_range = parse_double(key, value);
        else if (key == "out") config.out = value;
        else if (key == "jobs") config.jobs = static_cast<int>(parse_int(key, value));
        else throw ConfigError(origin + ":" + std::to_string(line_number) +
                               ": unknown config key '" + key + "'");
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

}  // namespace psolim
