#pragma once

#include "psolim/core/noise.hpp"
#include "psolim/core/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace psolim {

/// Fully serializable experiment description. Flat key=value text format;
/// command-line flags override file values. Replaying a stored config with
/// the same seed reproduces every output byte for byte.
struct ExperimentConfig {
    std::string objective = "sphere";
    GpsoParams params;

    /// "gpso", "basic", "inertia:<w>", or "constriction:<chi>".
    std::string variant = "gpso";

    /// "none" or "gauss:<sigma>".
    std::string noise = "none";

    /// "optimize" (tracked attractors on the objective) or "analysis"
    /// (closed-form constant attractors pr_star / pg_star).
    std::string mode = "optimize";
    double pr_star = 0.0;
    double pg_star = 0.0;

    std::uint64_t steps = 1000;
    int reps = 100;
    std::uint64_t seed = 1;
    long burn_in = -1;  ///< -1: default ceil(5/epsilon)
    double init_range = 5.0;
    std::string out = "out";
    int jobs = 1;

    void validate() const;

    NoiseModel make_noise_model() const;  ///< for state_size-dim draws
    std::size_t effective_burn_in() const;

    /// Canonical key=value serialization (one key per line, sorted).
    std::string to_key_value() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

}  // namespace psolim
