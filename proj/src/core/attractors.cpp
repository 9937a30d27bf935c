#include "psolim/core/attractors.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace psolim {

Topology Topology::ring(int k) {
    if (k < 0) throw ConfigError("ring neighborhood radius must be >= 0");
    Topology t;
    t.kind = Kind::Ring;
    t.ring_neighbors = k;
    return t;
}

AttractorModel AttractorModel::tracked(int particles, int dim, Topology topology,
                                       NoiseModel noise) {
    if (particles < 1 || dim < 1)
        throw ConfigError("tracked attractors need particles >= 1 and dim >= 1");
    AttractorModel model;
    model.mode_ = AttractorMode::Tracked;
    model.topology_ = topology;
    model.noise_ = std::move(noise);
    model.particles_ = particles;
    model.dim_ = dim;
    return model;
}

AttractorModel AttractorModel::closed_form(MeanAttractorFn pr_fn, MeanAttractorFn pg_fn,
                                           NoiseModel noise) {
    if (!pr_fn || !pg_fn)
        throw ConfigError("closed-form attractors need both mean functions");
    AttractorModel model;
    model.mode_ = AttractorMode::ClosedForm;
    model.noise_ = std::move(noise);
    model.pr_fn_ = std::move(pr_fn);
    model.pg_fn_ = std::move(pg_fn);
    return model;
}

AttractorModel AttractorModel::constant(Vector pr_star, Vector pg_star, NoiseModel noise) {
    if (pr_star.size() != pg_star.size())
        throw ConfigError("constant attractor vectors must have equal length");
    return closed_form([pr = std::move(pr_star)](const SwarmVector&) { return pr; },
                       [pg = std::move(pg_star)](const SwarmVector&) { return pg; },
                       std::move(noise));
}

void AttractorModel::observe(const SwarmVector& state, const ObjectiveFn& objective) {
    if (mode_ != AttractorMode::Tracked)
        throw ContractError("observe() applies to tracked attractors only");
    if (!objective) throw ContractError("tracked attractors need an objective");
    ensure_finite(state);
    if (state.half() != particles_ * dim_)
        throw ContractError("state size does not match the tracked swarm geometry");

    const auto positions = state.x();
    if (!initialized_) {
        pr_ = positions;
        pr_value_.resize(particles_);
        for (int i = 0; i < particles_; ++i)
            pr_value_[i] = objective(pr_.segment(i * dim_, dim_));
        pg_ = Vector::Zero(particles_ * dim_);
        pg_value_ = Vector::Constant(particles_, std::numeric_limits<double>::infinity());
        initialized_ = true;
        refresh_neighborhood_bests();
        return;
    }

    for (int i = 0; i < particles_; ++i) {
        const double value = objective(positions.segment(i * dim_, dim_));
        // Strict improvement only; ties keep the earlier incumbent.
        if (value < pr_value_[i]) {
            pr_value_[i] = value;
            pr_.segment(i * dim_, dim_) = positions.segment(i * dim_, dim_);
        }
    }
    refresh_neighborhood_bests();
}

void AttractorModel::refresh_neighborhood_bests() {
    auto in_neighborhood = [&](int i, int j) {
        if (topology_.kind == Topology::Kind::Global) return true;
        const int forward = ((j - i) % particles_ + particles_) % particles_;
        const int backward = ((i - j) % particles_ + particles_) % particles_;
        return std::min(forward, backward) <= topology_.ring_neighbors;
    };

    for (int i = 0; i < particles_; ++i) {
        // Scan in increasing particle index: argmin ties go to the earliest.
        int best = -1;
        double best_value = std::numeric_limits<double>::infinity();
        for (int j = 0; j < particles_; ++j) {
            if (!in_neighborhood(i, j)) continue;
            if (pr_value_[j] < best_value) {
                best_value = pr_value_[j];
                best = j;
            }
        }
        // Equal-value candidates keep the earlier incumbent.
        if (best >= 0 && best_value < pg_value_[i]) {
            pg_value_[i] = best_value;
            pg_.segment(i * dim_, dim_) = pr_.segment(best * dim_, dim_);
        }
    }
}

std::pair<Vector, Vector> AttractorModel::mean(const SwarmVector& theta) const {
    if (mode_ == AttractorMode::Tracked) {
        if (!initialized_)
            throw ContractError("tracked attractors queried before any observation");
        return {pr_, pg_};
    }
    Vector pr = pr_fn_(theta);
    Vector pg = pg_fn_(theta);
    if (pr.size() != theta.half() || pg.size() != theta.half())
        throw ContractError("closed-form attractor functions returned the wrong size");
    return {std::move(pr), std::move(pg)};
}

std::pair<Vector, Vector> AttractorModel::query(const SwarmVector& theta,
                                                const RandomSource& rng,
                                                std::uint64_t iteration) const {
    auto [pr, pg] = mean(theta);
    if (noise_.active()) {
        const int half = static_cast<int>(pr.size());
        const Vector eta = noise_.draw(rng, iteration, 2 * half);
        pr += eta.head(half);
        pg += eta.tail(half);
    }
    return {std::move(pr), std::move(pg)};
}

AttractorModel update_attractors(const SwarmVector& state, AttractorModel attractors,
                                 const ObjectiveFn& objective) {
    attractors.observe(state, objective);
    return attractors;
}

std::pair<Vector, Vector> query_attractors(const AttractorModel& attractors,
                                           const SwarmVector& theta,
                                           const RandomSource& rng,
                                           std::uint64_t iteration) {
    return attractors.query(theta, rng, iteration);
}

}  // namespace psolim
