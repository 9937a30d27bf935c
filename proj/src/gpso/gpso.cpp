#include "psolim/gpso/gpso.hpp"

#include <sstream>
#include <utility>

namespace psolim {

DriftMatrix build_M(const GpsoParams& params) {
    params.validate();
    const int half = params.swarm_size();
    const double attraction = -0.5 * params.chi * (params.c1 + params.c2);

    Matrix m = Matrix::Zero(2 * half, 2 * half);
    m.topLeftCorner(half, half) = params.kappa1 * Matrix::Identity(half, half);
    m.bottomLeftCorner(half, half) = params.kappa2 * Matrix::Identity(half, half);
    m.topRightCorner(half, half) = attraction * Matrix::Identity(half, half);
    m.bottomRightCorner(half, half) = attraction * Matrix::Identity(half, half);
    return DriftMatrix{std::move(m)};
}

Vector drift_term(const GpsoParams& params, const SwarmVector& theta) {
    const int half = theta.half();
    const double attraction = -0.5 * params.chi * (params.c1 + params.c2);
    Vector out(2 * half);
    out.head(half) = params.kappa1 * theta.v() + attraction * theta.x();
    out.tail(half) = params.kappa2 * theta.v() + attraction * theta.x();
    return out;
}

Vector mean_attraction_term(const GpsoParams& params, const Vector& pr, const Vector& pg) {
    const auto half = pr.size();
    Vector out(2 * half);
    out.head(half) = params.chi * (0.5 * params.c1 * pr + 0.5 * params.c2 * pg);
    out.tail(half) = out.head(half);
    return out;
}

Vector fluctuation_term(const GpsoParams& params, const SwarmVector& theta,
                        const Vector& r1, const Vector& r2,
                        const Vector& pr, const Vector& pg) {
    const int half = theta.half();
    Vector block(half);
    for (int j = 0; j < half; ++j) {
        const double c1r = params.c1 * (r1[j] - 0.5);
        const double c2r = params.c2 * (r2[j] - 0.5);
        // Centered pull on the position plus centered attractor weighting;
        // conditional mean zero because E[r - 0.5] = 0.
        block[j] = params.chi *
                   (-(c1r + c2r) * theta.x()[j] + c1r * pr[j] + c2r * pg[j]);
    }
    Vector out(2 * half);
    out.head(half) = block;
    out.tail(half) = block;
    return out;
}

std::pair<SwarmVector, UpdateDecomposition> step_gpso(const SwarmVector& state,
                                                      const GpsoParams& params,
                                                      const AttractorModel& attractors,
                                                      const RandomSource& rng,
                                                      std::uint64_t iteration) {
    ensure_finite(state, iteration);
    const int half = state.half();

    const auto [pr, pg] = query_attractors(attractors, state, rng, iteration);
    const SweepDraws draws = draw_sweep_uniforms(rng, iteration, half);

    UpdateDecomposition parts{
        drift_term(params, state),
        mean_attraction_term(params, pr, pg),
        fluctuation_term(params, state, draws.r1, draws.r2, pr, pg),
    };

    SwarmVector next = state;
    next.stacked() += params.epsilon * parts.increment();
    return {std::move(next), std::move(parts)};
}

RunTrace run_gpso(const SwarmVector& theta0, const GpsoParams& params,
                  AttractorModel attractors, const std::string& objective_id,
                  std::size_t n_steps, std::uint64_t seed) {
    if (n_steps < 1) throw ContractError("run_gpso needs n_steps >= 1");
    params.validate();
    ensure_finite(theta0);

    RunTrace trace;
    trace.params = params;
    trace.seed = seed;
    trace.kind = "gpso";
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
        auto [next, parts] = step_gpso(theta, params, attractors, rng, n);
        if (!is_finite_and_bounded(next)) {
            trace.diverged = true;
            trace.divergence_step = n + 1;
            std::ostringstream msg;
            msg << "divergence guard tripped at step " << (n + 1)
                << " (epsilon=" << params.epsilon << ", seed=" << seed << ")";
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

Vector empirical_W_mean(const SwarmVector& theta, const GpsoParams& params,
                        const AttractorModel& attractors, std::size_t n_draws,
                        std::uint64_t seed) {
    if (n_draws < 1) throw ContractError("empirical_W_mean needs n_draws >= 1");
    ensure_finite(theta);
    const int half = theta.half();

    const RandomSource rng(seed);
    Vector sum = Vector::Zero(2 * half);
    for (std::size_t k = 0; k < n_draws; ++k) {
        const auto [pr, pg] = query_attractors(attractors, theta, rng, k);
        const SweepDraws draws = draw_sweep_uniforms(rng, k, half);
        sum += fluctuation_term(params, theta, draws.r1, draws.r2, pr, pg);
    }
    return sum / static_cast<double>(n_draws);
}

Vector centered_perturbation_draw(const SwarmVector& theta, const GpsoParams& params,
                                  const AttractorModel& attractors,
                                  const RandomSource& rng, std::uint64_t iteration) {
    if (attractors.mode() != AttractorMode::ClosedForm)
        throw ContractError("centered perturbation needs closed-form attractors");

    const auto [pr_mean, pg_mean] = attractors.mean(theta);
    const auto [pr, pg] = query_attractors(attractors, theta, rng, iteration);
    const SweepDraws draws = draw_sweep_uniforms(rng, iteration, theta.half());

    return mean_attraction_term(params, pr, pg) -
           mean_attraction_term(params, pr_mean, pg_mean) +
           fluctuation_term(params, theta, draws.r1, draws.r2, pr, pg);
}

}  // namespace psolim
