#pragma once

#include "psolim/core/attractors.hpp"
#include "psolim/core/types.hpp"
#include "psolim/gpso/gpso.hpp"

#include <functional>
#include <vector>

namespace psolim {

/// Right-hand side of the mean-field limit d theta/dt = M theta + Pbar(theta).
struct MeanField {
    Matrix m;
    std::function<Vector(const Vector&)> pbar;
    /// Optional analytic Jacobian of pbar; finite differences otherwise.
    std::function<Matrix(const Vector&)> pbar_jacobian;
};

/// Assembles the mean field from closed-form attractors: Pbar is the mean
/// attraction evaluated on the noise-free attractor functions.
MeanField make_mean_field(const GpsoParams& params, const AttractorModel& attractors);

Vector mean_field_rhs(const Vector& theta, const MeanField& model);

struct OdeTrajectory {
    double step = 0.0;
    std::vector<double> times;
    std::vector<Vector> states;

    std::size_t length() const { return states.size(); }
};

/// Classical fixed-step RK4 on [0, t_final]. The requested step is adjusted
/// to the nearest value that divides t_final into whole steps, so the grid
/// is uniform and lands on t_final exactly.
OdeTrajectory integrate_ode(const SwarmVector& theta0, const MeanField& model,
                            double t_final, double step);

/// Piecewise-constant interpolation of a discrete trace on intervals of
/// width epsilon: returns theta_n for t in [eps*n, eps*n + eps). Grid points
/// are exact: t == eps*n (in floating point) maps to index n.
SwarmVector interpolate_trace(const RunTrace& trace, double epsilon, double t);

/// Stationary point of the mean field for constant attractor means: zero
/// velocity block, position block (c1*pr_star + c2*pg_star) / (c1 + c2).
SwarmVector equilibrium(const GpsoParams& params, const Vector& pr_star,
                        const Vector& pg_star);

/// Jacobian of Pbar at theta_star: the analytic callback when the model has
/// one, otherwise central finite differences with relative step 1e-5.
Matrix jacobian_pbar(const MeanField& model, const SwarmVector& theta_star);

struct StabilityReport {
    bool stable = false;
    Vector eigen_real_parts;
};

/// Hurwitz test: stable iff every eigenvalue real part < -1e-9.
StabilityReport check_stability(const Matrix& a);

}  // namespace psolim
