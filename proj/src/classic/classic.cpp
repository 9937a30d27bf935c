#include "psolim/classic/classic.hpp"

#include <sstream>
#include <utility>

namespace psolim {

std::string ClassicVariant::name() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Basic:
            out << "basic";
            break;
        case Kind::Inertia:
            out << "inertia(" << coeff << ")";
            break;
        case Kind::Constriction:
            out << "constriction(" << coeff << ")";
            break;
    }
    return out.str();
}

SwarmVector step_classic(const SwarmVector& state, const ClassicVariant& variant,
                         double c1, double c2, const AttractorModel& attractors,
                         const RandomSource& rng, std::uint64_t iteration) {
    ensure_finite(state, iteration);
    const int half = state.half();

    const auto [pr, pg] = query_attractors(attractors, state, rng, iteration);
    const SweepDraws draws = draw_sweep_uniforms(rng, iteration, half);

    SwarmVector next = state;
    auto v = next.v();
    auto x = next.x();
    for (int j = 0; j < half; ++j) {
        const double pull = c1 * draws.r1[j] * (pr[j] - x[j]) +
                            c2 * draws.r2[j] * (pg[j] - x[j]);
        switch (variant.kind) {
            case ClassicVariant::Kind::Basic:
                v[j] = v[j] + pull;
                break;
            case ClassicVariant::Kind::Inertia:
                v[j] = variant.coeff * v[j] + pull;
                break;
            case ClassicVariant::Kind::Constriction:
                v[j] = variant.coeff * (v[j] + pull);
                break;
        }
    }
    x += v;  // position moves by the new velocity, exactly
    return next;
}

RunTrace run_classic(const SwarmVector& theta0, const ClassicVariant& variant,
                     const GpsoParams& params, AttractorModel attractors,
                     const std::string& objective_id, std::size_t n_steps,
                     std::uint64_t seed) {
    if (n_steps < 1) throw ContractError("run_classic needs n_steps >= 1");
    ensure_finite(theta0);

    RunTrace trace;
    trace.params = params;
    trace.seed = seed;
    trace.kind = "classic";
    trace.states.reserve(n_steps + 1);

    ObjectiveFn objective;
    if (attractors.mode() == AttractorMode::Tracked) {
        objective = ObjectiveRegistry::instance().find(objective_id);
        attractors.observe(theta0, objective);
    }

    const RandomSource rng(seed);
    SwarmVector theta = theta0;
    trace.states.push_back(theta.stacked());

    for (std::size_t n = 0; n < n_steps; ++n) {
        SwarmVector next = step_classic(theta, variant, params.c1, params.c2,
                                        attractors, rng, n);
        if (!is_finite_and_bounded(next)) {
            trace.diverged = true;
            trace.divergence_step = n + 1;
            std::ostringstream msg;
            msg << "divergence guard tripped at step " << (n + 1) << " ("
                << variant.name() << ")";
            trace.diagnostic = msg.str();
            return trace;
        }
        theta = std::move(next);
        if (attractors.mode() == AttractorMode::Tracked)
            attractors.observe(theta, objective);
        trace.states.push_back(theta.stacked());
    }
    return trace;
}

}  // namespace psolim
