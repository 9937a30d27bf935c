#include "psolim/ode/ode.hpp"

#include <cmath>
#include <utility>

namespace psolim {

MeanField make_mean_field(const GpsoParams& params, const AttractorModel& attractors) {
    if (attractors.mode() != AttractorMode::ClosedForm)
        throw ContractError("mean field needs closed-form attractors");
    MeanField model;
    model.m = build_M(params).m;
    model.pbar = [params, attractors](const Vector& theta) {
        const SwarmVector state = SwarmVector::from_stacked(theta);
        const auto [pr, pg] = attractors.mean(state);
        return mean_attraction_term(params, pr, pg);
    };
    return model;
}

Vector mean_field_rhs(const Vector& theta, const MeanField& model) {
    return model.m * theta + model.pbar(theta);
}

OdeTrajectory integrate_ode(const SwarmVector& theta0, const MeanField& model,
                            double t_final, double step) {
    if (!(step > 0.0) || !(step <= t_final))
        throw ContractError("integrate_ode needs 0 < step <= t_final");
    ensure_finite(theta0);

    // Snap to a whole number of uniform steps covering [0, t_final] exactly.
    const auto n_steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(t_final / step)));
    const double h = t_final / static_cast<double>(n_steps);

    OdeTrajectory trajectory;
    trajectory.step = h;
    trajectory.times.reserve(n_steps + 1);
    trajectory.states.reserve(n_steps + 1);

    Vector y = theta0.stacked();
    trajectory.times.push_back(0.0);
    trajectory.states.push_back(y);

    for (std::size_t n = 0; n < n_steps; ++n) {
        const Vector k1 = mean_field_rhs(y, model);
        const Vector k2 = mean_field_rhs(y + 0.5 * h * k1, model);
        const Vector k3 = mean_field_rhs(y + 0.5 * h * k2, model);
        const Vector k4 = mean_field_rhs(y + h * k3, model);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ensure_finite(y, n + 1);
        trajectory.times.push_back(h * static_cast<double>(n + 1));
        trajectory.states.push_back(y);
    }
    return trajectory;
}

SwarmVector interpolate_trace(const RunTrace& trace, double epsilon, double t) {
    if (trace.states.empty()) throw ContractError("cannot interpolate an empty trace");
    if (!(epsilon > 0.0)) throw ContractError("interpolation needs epsilon > 0");
    const auto length = trace.states.size();
    if (!(t >= 0.0) || !(t < epsilon * static_cast<double>(length)))
        throw ContractError("interpolation time outside [0, epsilon * length)");

    // Left-closed intervals [eps*n, eps*n + eps). Nudge the raw quotient so
    // the floating-point grid points land on their own index exactly.
    auto n = static_cast<std::size_t>(std::floor(t / epsilon));
    while (n + 1 < length && epsilon * static_cast<double>(n + 1) <= t) ++n;
    while (n > 0 && epsilon * static_cast<double>(n) > t) --n;
    return SwarmVector::from_stacked(trace.states[n]);
}

SwarmVector equilibrium(const GpsoParams& params, const Vector& pr_star,
                        const Vector& pg_star) {
    if (!(params.c1 + params.c2 > 0.0))
        throw ContractError("equilibrium undefined for c1 + c2 == 0");
    if (pr_star.size() != pg_star.size())
        throw ContractError("attractor means must have equal length");

    const Vector position =
        (params.c1 * pr_star + params.c2 * pg_star) / (params.c1 + params.c2);
    return SwarmVector(Vector::Zero(position.size()), position);
}

Matrix jacobian_pbar(const MeanField& model, const SwarmVector& theta_star) {
    if (model.pbar_jacobian) return model.pbar_jacobian(theta_star.stacked());

    const Vector& center = theta_star.stacked();
    const auto n = center.size();
    Matrix jacobian(n, n);
    Vector probe = center;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-5 * (1.0 + std::abs(center[j]));
        probe[j] = center[j] + h;
        const Vector forward = model.pbar(probe);
        probe[j] = center[j] - h;
        const Vector backward = model.pbar(probe);
        probe[j] = center[j];
        jacobian.col(j) = (forward - backward) / (2.0 * h);
    }
    if (!jacobian.allFinite())
        throw NumericalError("finite-difference Jacobian has non-finite entries");
    return jacobian;
}

StabilityReport check_stability(const Matrix& a) {
    if (a.rows() != a.cols()) throw ContractError("stability check needs a square matrix");
    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue solver did not converge");

    StabilityReport report;
    report.eigen_real_parts = solver.eigenvalues().real();
    report.stable = (report.eigen_real_parts.maxCoeff() < -1e-9);
    return report;
}

}  // namespace psolim
