#pragma once

#include "psolim/core/attractors.hpp"
#include "psolim/core/types.hpp"
#include "psolim/gpso/gpso.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace psolim {

/// Post-burn-in iterates rescaled as z_n = (theta_n - theta_star) / sqrt(eps).
/// The scaling is exact: sqrt(eps) * z_n + theta_star reproduces theta_n to
/// machine precision.
struct ScaledErrorSeries {
    double epsilon = 0.0;
    std::size_t burn_in = 0;
    std::vector<Vector> z;
};

ScaledErrorSeries scaled_errors(const RunTrace& trace, const SwarmVector& theta_star,
                                std::size_t burn_in);

/// Default burn-in: ceil(5 / epsilon) iterations, about five interpolated
/// time units.
inline std::size_t default_burn_in(double epsilon) {
    return static_cast<std::size_t>(std::ceil(5.0 / epsilon));
}

/// Unique symmetric solution of a*Xi + Xi*a' = -sigma via the vectorized
/// dense linear system. Requires a stable and sigma symmetric PSD; enforces
/// residual max-norm below 1e-10 (relative to the scale of sigma).
Matrix solve_lyapunov(const Matrix& a, const Matrix& sigma);

/// Linearized limit dynamics around theta_star: dz = a z dt + sigma^{1/2} dB.
/// xi is the stationary covariance, i.e. the Lyapunov solution.
struct DiffusionModel {
    Matrix a;
    Matrix sigma;
    Matrix xi;
};

/// Validates stability/PSD-ness and solves for xi.
DiffusionModel make_diffusion_model(Matrix a, Matrix sigma);

/// Monte Carlo estimate of the asymptotic covariance of the centered
/// perturbation at theta_star: the lag-0 second moment plus symmetrized
/// cross terms up to max_lag. Closed-form attractors only; use max_lag = 0
/// for i.i.d. noise.
Matrix estimate_sigma(const SwarmVector& theta_star, const GpsoParams& params,
                      const AttractorModel& attractors, std::size_t n_draws,
                      int max_lag, std::uint64_t seed);

/// Exact asymptotic covariance for constant closed-form attractors with
/// i.i.d. Gaussian query noise (or no noise). Both stacked blocks carry the
/// same r*D x r*D matrix
///   S = 0.25*chi^2*(c1, c2 covariance quadratic) + chi^2/12 * diag terms,
/// so the result has the [S S; S S] structure of the shared perturbation.
Matrix sigma_iid_closed_form(const SwarmVector& theta_star, const GpsoParams& params,
                             const AttractorModel& attractors);

/// Replicated-run description for the stationary-covariance study.
struct ReplicationConfig {
    GpsoParams params;
    AttractorModel attractors;  ///< closed-form analysis model
    SwarmVector theta0;
    SwarmVector theta_star;
    std::size_t n_steps = 0;  ///< total steps per replication, > burn_in
    std::uint64_t seed = 0;
};

struct ReplicationStudy {
    Matrix covariance;  ///< pooled sample covariance of z
    Vector mean;        ///< pooled sample mean of z
    std::size_t samples = 0;
    int replications = 0;
    int divergent = 0;
    std::vector<Vector> pooled_z;  ///< thinned retained samples
};

/// Runs n_reps independent replications (seeds forked per replication),
/// pools post-burn-in scaled errors, and accumulates their covariance.
/// Every `thin`-th sample is retained in pooled_z. Replications that trip
/// the divergence guard are excluded and counted; more than 1% divergent
/// aborts with DivergenceError. Results are independent of `jobs`.
ReplicationStudy run_replication_study(const ReplicationConfig& config, int n_reps,
                                       std::size_t burn_in, int thin = 1, int jobs = 1);

/// Pooled covariance only.
Matrix empirical_stationary_covariance(int n_reps, const ReplicationConfig& config,
                                       std::size_t burn_in, int jobs = 1);

/// Euler-Maruyama sample paths of the limit SDE, recorded every
/// `record_every` steps (plus the endpoint).
struct SdePathSet {
    double step = 0.0;
    std::vector<double> times;            ///< recorded times, shared by paths
    std::vector<std::vector<Vector>> paths;

    /// Pooled covariance of recorded states with time >= t_min.
    Matrix covariance_from(double t_min) const;
};

SdePathSet simulate_limit_sde(const DiffusionModel& model, double t_final, double step,
                              int n_paths, std::uint64_t seed, int record_every = 1,
                              Vector z0 = Vector());

/// Chi-square comparison of Mahalanobis distances d_i^2 = z_i' xi^{-1} z_i
/// against the dof = dimension reference: sample moments and tail fractions
/// at the 0.95 / 0.99 quantiles.
struct NormalityReport {
    std::size_t samples = 0;
    int dof = 0;
    double mean_d2 = 0.0;
    double var_d2 = 0.0;
    double mean_ratio = 0.0;  ///< mean_d2 / dof, 1 under normality
    double var_ratio = 0.0;   ///< var_d2 / (2*dof), 1 under normality
    double tail05_observed = 0.0;
    double tail01_observed = 0.0;
    bool consistent = false;  ///< mean_ratio within [0.85, 1.15]
};

/// Requires at least 500 pooled samples and invertible xi.
NormalityReport normality_diagnostic(const std::vector<Vector>& pooled_z, const Matrix& xi);

// Chi-square utilities (regularized incomplete gamma based).
double chi_square_cdf(int dof, double x);
double chi_square_quantile(int dof, double p);

}  // namespace psolim
