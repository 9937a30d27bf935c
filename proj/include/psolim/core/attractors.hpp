#pragma once

#include "psolim/core/noise.hpp"
#include "psolim/core/objective.hpp"
#include "psolim/core/random.hpp"
#include "psolim/core/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace psolim {

enum class AttractorMode { Tracked, ClosedForm };

/// Particle communication structure used when tracking neighborhood bests.
struct Topology {
    enum class Kind { Global, Ring };

    Kind kind = Kind::Global;
    int ring_neighbors = 1;  ///< k: neighbors on each side, ring mode only

    static Topology global() { return {}; }
    static Topology ring(int k);
};

/// Mean attractor function for analysis mode: maps the stacked state to an
/// r*D vector of attractor positions.
using MeanAttractorFn = std::function<Vector(const SwarmVector&)>;

/// Provider of the personal-best (Pr) and neighborhood-best (Pg) positions.
///
/// Two modes share one query interface:
///  - Tracked: real swarm bookkeeping. `observe` folds new positions into
///    the per-particle best history; queries return the stored bests.
///  - ClosedForm: user-supplied mean functions, for analysis runs where the
///    attractor structure is prescribed rather than discovered.
/// In both modes query noise is applied additively per the NoiseModel.
class AttractorModel {
public:
    AttractorModel() = default;

    static AttractorModel tracked(int particles, int dim,
                                  Topology topology = Topology::global(),
                                  NoiseModel noise = NoiseModel::none());
    static AttractorModel closed_form(MeanAttractorFn pr_fn, MeanAttractorFn pg_fn,
                                      NoiseModel noise = NoiseModel::none());
    /// Closed-form model with constant attractor positions.
    static AttractorModel constant(Vector pr_star, Vector pg_star,
                                   NoiseModel noise = NoiseModel::none());

    AttractorMode mode() const { return mode_; }
    const NoiseModel& noise() const { return noise_; }
    const Topology& topology() const { return topology_; }

    /// Tracked mode only: records the positions of `state`, updating each
    /// particle's best iff the new value strictly improves it, then refreshes
    /// the neighborhood bests. Argmin ties keep the earlier incumbent.
    /// The first call seeds the history with the initial positions.
    void observe(const SwarmVector& state, const ObjectiveFn& objective);

    bool initialized() const { return initialized_; }

    /// Noise-free attractor values at `theta`, stacked r*D vectors (pr, pg).
    std::pair<Vector, Vector> mean(const SwarmVector& theta) const;

    /// Attractor values with a fresh additive noise draw for `iteration`.
    std::pair<Vector, Vector> query(const SwarmVector& theta, const RandomSource& rng,
                                    std::uint64_t iteration) const;

    // Tracked-state accessors (for diagnostics and figure output).
    const Vector& personal_best() const { return pr_; }
    const Vector& personal_best_values() const { return pr_value_; }
    const Vector& neighborhood_best() const { return pg_; }
    const Vector& neighborhood_best_values() const { return pg_value_; }

private:
    void refresh_neighborhood_bests();

    AttractorMode mode_ = AttractorMode::Tracked;
    Topology topology_;
    NoiseModel noise_;
    MeanAttractorFn pr_fn_;
    MeanAttractorFn pg_fn_;

    // Tracked state, all particle-major / dimension-minor.
    bool initialized_ = false;
    int particles_ = 0;
    int dim_ = 0;
    Vector pr_;        // r*D
    Vector pr_value_;  // r
    Vector pg_;        // r*D (per-particle neighborhood best)
    Vector pg_value_;  // r
};

/// Value-returning sweep update; tracked mode only (ClosedForm is a
/// contract violation).
AttractorModel update_attractors(const SwarmVector& state, AttractorModel attractors,
                                 const ObjectiveFn& objective);

/// (pr, pg) with a fresh noise draw keyed by `iteration`.
std::pair<Vector, Vector> query_attractors(const AttractorModel& attractors,
                                           const SwarmVector& theta,
                                           const RandomSource& rng,
                                           std::uint64_t iteration);

}  // namespace psolim
