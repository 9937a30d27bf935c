#pragma once

#include "psolim/core/attractors.hpp"
#include "psolim/core/random.hpp"
#include "psolim/core/types.hpp"

#include <string>

namespace psolim {

/// The three reference update rules: plain velocity accumulation, inertia
/// weight w on the old velocity, and the constriction coefficient chi
/// scaling the whole velocity update.
struct ClassicVariant {
    enum class Kind { Basic, Inertia, Constriction };

    Kind kind = Kind::Basic;
    double coeff = 1.0;  ///< w for Inertia, chi for Constriction

    static ClassicVariant basic() { return {Kind::Basic, 1.0}; }
    static ClassicVariant inertia(double w) { return {Kind::Inertia, w}; }
    static ClassicVariant constriction(double chi) { return {Kind::Constriction, chi}; }

    std::string name() const;
};

/// One synchronous sweep of the classic update: velocities first, then
/// positions by the new velocity, so x_{n+1} - x_n == v_{n+1} exactly.
/// Draws r1/r2 from the shared per-(iteration, particle, role) streams.
SwarmVector step_classic(const SwarmVector& state, const ClassicVariant& variant,
                         double c1, double c2, const AttractorModel& attractors,
                         const RandomSource& rng, std::uint64_t iteration);

/// Baseline runner: seeds tracked attractors with theta0, then alternates
/// step and attractor sweep. Divergence truncates the trace.
RunTrace run_classic(const SwarmVector& theta0, const ClassicVariant& variant,
                     const GpsoParams& params, AttractorModel attractors,
                     const std::string& objective_id, std::size_t n_steps,
                     std::uint64_t seed);

}  // namespace psolim
