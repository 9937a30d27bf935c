#pragma once

#include "psolim/core/attractors.hpp"
#include "psolim/core/random.hpp"
#include "psolim/core/types.hpp"

#include <string>
#include <utility>

namespace psolim {

/// The constant drift matrix of the generalized recursion,
///   [ kappa1*I   -0.5*chi*(c1+c2)*I ]
///   [ kappa2*I   -0.5*chi*(c1+c2)*I ],
/// acting on the stacked state [v; x].
struct DriftMatrix {
    Matrix m;

    int size() const { return static_cast<int>(m.rows()); }
};

DriftMatrix build_M(const GpsoParams& params);

/// Additive split of one update increment (before the epsilon factor):
/// drift M*theta, mean attraction P (the averaged pull toward the
/// attractors), and the zero-conditional-mean fluctuation W. Their sum is
/// the full bracketed increment, exactly.
struct UpdateDecomposition {
    Vector drift;
    Vector mean_attraction;
    Vector fluctuation;

    Vector increment() const { return drift + mean_attraction + fluctuation; }
};

/// M*theta without forming the matrix.
Vector drift_term(const GpsoParams& params, const SwarmVector& theta);

/// P: chi * [0.5*c1*pr + 0.5*c2*pg] stacked into both blocks.
Vector mean_attraction_term(const GpsoParams& params, const Vector& pr, const Vector& pg);

/// W: the centered-uniform terms. `pr`/`pg` are the (possibly noisy)
/// queried attractor values; `r1`/`r2` the sweep uniforms.
Vector fluctuation_term(const GpsoParams& params, const SwarmVector& theta,
                        const Vector& r1, const Vector& r2,
                        const Vector& pr, const Vector& pg);

/// One generalized step theta + eps*(drift + P + W), with the decomposition
/// it was built from. Throws DivergenceError if the input state is already
/// outside the guard.
std::pair<SwarmVector, UpdateDecomposition> step_gpso(const SwarmVector& state,
                                                      const GpsoParams& params,
                                                      const AttractorModel& attractors,
                                                      const RandomSource& rng,
                                                      std::uint64_t iteration);

/// Full run of n_steps >= 1 sweeps. The trace records theta_0 first and the
/// seed/params for bit-exact replay; tracked attractors are seeded with
/// theta0 and updated after every sweep. If the guard trips the trace is
/// truncated at the last finite state and flagged.
RunTrace run_gpso(const SwarmVector& theta0, const GpsoParams& params,
                  AttractorModel attractors, const std::string& objective_id,
                  std::size_t n_steps, std::uint64_t seed);

/// Monte Carlo mean of the fluctuation W at a fixed state over n_draws
/// independent sweeps (fresh r1, r2 and noise each draw).
Vector empirical_W_mean(const SwarmVector& theta, const GpsoParams& params,
                        const AttractorModel& attractors, std::size_t n_draws,
                        std::uint64_t seed);

/// One draw of the centered combined perturbation P - Pbar + W at a fixed
/// state; closed-form attractors only. This is the driving term whose
/// covariance enters the diffusion analysis.
Vector centered_perturbation_draw(const SwarmVector& theta, const GpsoParams& params,
                                  const AttractorModel& attractors,
                                  const RandomSource& rng, std::uint64_t iteration);

}  // namespace psolim
