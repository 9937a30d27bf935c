#include "psolim/rate/rate.hpp"

#include "psolim/ode/ode.hpp"

#include <atomic>
#include <cmath>
#include <iterator>
#include <thread>
#include <utility>

namespace psolim {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void require_symmetric_psd(const Matrix& sigma, const char* what) {
    if (sigma.rows() != sigma.cols())
        throw ContractError(std::string(what) + " must be square");
    const double scale = std::max(1.0, max_abs(sigma));
    if (max_abs(sigma - sigma.transpose()) > 1e-10 * scale)
        throw ContractError(std::string(what) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(0.5 * (sigma + sigma.transpose()));
    if (eigen.info() != Eigen::Success)
        throw NumericalError(std::string(what) + " eigendecomposition failed");
    if (eigen.eigenvalues().minCoeff() < -1e-10 * scale)
        throw ContractError(std::string(what) + " must be positive semidefinite");
}

/// Symmetric PSD square root with tiny negative eigenvalues clamped to zero.
Matrix symmetric_sqrt(const Matrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(0.5 * (sigma + sigma.transpose()));
    if (eigen.info() != Eigen::Success)
        throw NumericalError("square-root eigendecomposition failed");
    Vector values = eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eigen.eigenvectors() * values.asDiagonal() * eigen.eigenvectors().transpose();
}

}  // namespace

ScaledErrorSeries scaled_errors(const RunTrace& trace, const SwarmVector& theta_star,
                                std::size_t burn_in) {
    if (burn_in >= trace.length())
        throw ContractError("burn-in must be smaller than the trace length");
    const double epsilon = trace.params.epsilon;
    const double scale = std::sqrt(epsilon);

    ScaledErrorSeries series;
    series.epsilon = epsilon;
    series.burn_in = burn_in;
    series.z.reserve(trace.length() - burn_in);
    for (std::size_t n = burn_in; n < trace.length(); ++n)
        series.z.push_back((trace.states[n] - theta_star.stacked()) / scale);
    return series;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& sigma) {
    if (a.rows() != a.cols()) throw ContractError("drift matrix must be square");
    if (sigma.rows() != a.rows() || sigma.cols() != a.cols())
        throw ContractError("sigma must match the drift matrix shape");
    require_symmetric_psd(sigma, "sigma");
    if (!check_stability(a).stable)
        throw ContractError("Lyapunov solve requires a stable drift matrix");

    // Vectorized form: (I (x) a + a (x) I) vec(Xi) = -vec(sigma),
    // with column-major vec. Dense LU is exact enough at these sizes.
    const auto n = a.rows();
    Matrix system = Matrix::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        system.block(j * n, j * n, n, n) += a;  // I (x) a
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            system.block(i * n, j * n, n, n) +=
                a(i, j) * Matrix::Identity(n, n);  // a (x) I

    Vector rhs(n * n);
    Eigen::Map<Matrix>(rhs.data(), n, n) = -sigma;

    Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible())
        throw NumericalError("Lyapunov system is singular");
    const Vector solution = lu.solve(rhs);

    Matrix xi = Eigen::Map<const Matrix>(solution.data(), n, n);
    xi = 0.5 * (xi + xi.transpose());

    const double residual = max_abs(a * xi + xi * a.transpose() + sigma);
    if (residual > 1e-10 * std::max(1.0, max_abs(sigma)))
        throw NumericalError("Lyapunov residual above tolerance: " +
                             std::to_string(residual));
    return xi;
}

DiffusionModel make_diffusion_model(Matrix a, Matrix sigma) {
    Matrix xi = solve_lyapunov(a, sigma);
    require_symmetric_psd(xi, "stationary covariance");
    return DiffusionModel{std::move(a), std::move(sigma), std::move(xi)};
}

Matrix estimate_sigma(const SwarmVector& theta_star, const GpsoParams& params,
                      const AttractorModel& attractors, std::size_t n_draws,
                      int max_lag, std::uint64_t seed) {
    if (n_draws < 2) throw ContractError("estimate_sigma needs n_draws >= 2");
    if (max_lag < 0) throw ContractError("max_lag must be >= 0");
    if (static_cast<std::size_t>(max_lag) >= n_draws)
        throw ContractError("max_lag must be smaller than n_draws");

    const int size = theta_star.size();
    const RandomSource rng(seed);

    // Ring buffer of the last max_lag+1 draws for the cross terms.
    std::vector<Vector> window(static_cast<std::size_t>(max_lag) + 1);
    Matrix lag0 = Matrix::Zero(size, size);
    std::vector<Matrix> lagged(max_lag, Matrix::Zero(size, size));

    for (std::size_t k = 0; k < n_draws; ++k) {
        Vector draw = centered_perturbation_draw(theta_star, params, attractors, rng, k);
        window[k % window.size()] = std::move(draw);
        const Vector& current = window[k % window.size()];
        lag0 += current * current.transpose();
        for (int lag = 1; lag <= max_lag; ++lag) {
            if (k < static_cast<std::size_t>(lag)) break;
            const Vector& past = window[(k - lag) % window.size()];
            lagged[lag - 1] += past * current.transpose();
        }
    }

    Matrix sigma = lag0 / static_cast<double>(n_draws);
    for (int lag = 1; lag <= max_lag; ++lag) {
        const auto pairs = static_cast<double>(n_draws - static_cast<std::size_t>(lag));
        const Matrix cross = lagged[lag - 1] / pairs;
        sigma += cross + cross.transpose();
    }
    return 0.5 * (sigma + sigma.transpose());
}

Matrix sigma_iid_closed_form(const SwarmVector& theta_star, const GpsoParams& params,
                             const AttractorModel& attractors) {
    if (attractors.mode() != AttractorMode::ClosedForm)
        throw ContractError("analytic sigma needs closed-form attractors");
    const NoiseModel& noise = attractors.noise();
    if (noise.kind() == NoiseKind::Custom)
        throw ContractError("analytic sigma covers i.i.d. Gaussian or no noise only");

    const int half = theta_star.half();
    const auto [pr_star, pg_star] = attractors.mean(theta_star);
    const Vector dr = pr_star - theta_star.x();
    const Vector dg = pg_star - theta_star.x();

    Matrix cov_rr = Matrix::Zero(half, half);
    Matrix cov_rg = Matrix::Zero(half, half);
    Matrix cov_gg = Matrix::Zero(half, half);
    if (noise.kind() == NoiseKind::IidGaussian) {
        if (noise.mean().size() != 2 * half)
            throw ContractError("noise dimension does not match the state");
        if (noise.mean().cwiseAbs().maxCoeff() > 0.0)
            throw ContractError("analytic sigma requires centered noise");
        const Matrix& cov = noise.covariance();
        cov_rr = cov.topLeftCorner(half, half);
        cov_rg = cov.topRightCorner(half, half);
        cov_gg = cov.bottomRightCorner(half, half);
    }

    const double c1 = params.c1;
    const double c2 = params.c2;

    // Shared-block covariance: the mean-attraction noise contributes the
    // 0.25 quadratic; each centered uniform contributes Var(r) = 1/12 times
    // the diagonal of the second moment of its attractor offset.
    Matrix s = 0.25 * (c1 * c1 * cov_rr + c1 * c2 * (cov_rg + cov_rg.transpose()) +
                       c2 * c2 * cov_gg);
    const Vector br_diag = dr.cwiseProduct(dr) + cov_rr.diagonal();
    const Vector bg_diag = dg.cwiseProduct(dg) + cov_gg.diagonal();
    s += (c1 * c1 / 12.0) * Matrix(br_diag.asDiagonal());
    s += (c2 * c2 / 12.0) * Matrix(bg_diag.asDiagonal());
    s *= params.chi * params.chi;

    Matrix sigma(2 * half, 2 * half);
    sigma << s, s, s, s;
    return sigma;
}

ReplicationStudy run_replication_study(const ReplicationConfig& config, int n_reps,
                                       std::size_t burn_in, int thin, int jobs) {
    if (n_reps < 1) throw ContractError("replication study needs n_reps >= 1");
    if (thin < 1) throw ContractError("thin must be >= 1");
    if (burn_in >= config.n_steps)
        throw ContractError("burn-in must be smaller than n_steps");
    if (config.attractors.mode() != AttractorMode::ClosedForm)
        throw ContractError("replication study needs closed-form attractors");

    const int size = config.theta_star.size();

    struct RepResult {
        Matrix second_moment;
        Vector sum;
        std::size_t count = 0;
        bool diverged = false;
        std::vector<Vector> kept;
    };
    std::vector<RepResult> results(static_cast<std::size_t>(n_reps));

    const RandomSource root(config.seed);
    auto run_one = [&](int rep) {
        RepResult out;
        out.second_moment = Matrix::Zero(size, size);
        out.sum = Vector::Zero(size);
        const std::uint64_t rep_seed = root.fork(static_cast<std::uint64_t>(rep)).seed();
        const RunTrace trace = run_gpso(config.theta0, config.params, config.attractors,
                                        "", config.n_steps, rep_seed);
        if (trace.diverged) {
            out.diverged = true;
            return out;
        }
        const ScaledErrorSeries series = scaled_errors(trace, config.theta_star, burn_in);
        for (std::size_t i = 0; i < series.z.size(); ++i) {
            const Vector& z = series.z[i];
            out.second_moment += z * z.transpose();
            out.sum += z;
            ++out.count;
            if (i % static_cast<std::size_t>(thin) == 0) out.kept.push_back(z);
        }
        return out;
    };

    const int workers = std::max(1, std::min(jobs, n_reps));
    if (workers == 1) {
        for (int rep = 0; rep < n_reps; ++rep)
            results[static_cast<std::size_t>(rep)] = run_one(rep);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int rep = next.fetch_add(1); rep < n_reps; rep = next.fetch_add(1))
                results[static_cast<std::size_t>(rep)] = run_one(rep);
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    // Merge in replication order: results do not depend on scheduling.
    ReplicationStudy study;
    Matrix second_moment = Matrix::Zero(size, size);
    Vector sum = Vector::Zero(size);
    for (int rep = 0; rep < n_reps; ++rep) {
        auto& result = results[static_cast<std::size_t>(rep)];
        if (result.diverged) {
            ++study.divergent;
            continue;
        }
        second_moment += result.second_moment;
        sum += result.sum;
        study.samples += result.count;
        study.pooled_z.insert(study.pooled_z.end(),
                              std::make_move_iterator(result.kept.begin()),
                              std::make_move_iterator(result.kept.end()));
    }
    study.replications = n_reps - study.divergent;

    if (study.divergent * 100 > n_reps)
        throw DivergenceError("more than 1% of replications tripped the divergence guard (" +
                              std::to_string(study.divergent) + "/" +
                              std::to_string(n_reps) + ")");
    if (study.samples == 0)
        throw NumericalError("replication study produced no samples");

    study.mean = sum / static_cast<double>(study.samples);
    Matrix covariance = second_moment / static_cast<double>(study.samples) -
                        study.mean * study.mean.transpose();
    study.covariance = 0.5 * (covariance + covariance.transpose());
    return study;
}

Matrix empirical_stationary_covariance(int n_reps, const ReplicationConfig& config,
                                       std::size_t burn_in, int jobs) {
    return run_replication_study(config, n_reps, burn_in, /*thin=*/1, jobs).covariance;
}

Matrix SdePathSet::covariance_from(double t_min) const {
    const auto dim = paths.empty() || paths.front().empty()
                         ? Eigen::Index(0)
                         : paths.front().front().size();
    Matrix second_moment = Matrix::Zero(dim, dim);
    Vector sum = Vector::Zero(dim);
    std::size_t count = 0;
    for (const auto& path : paths) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (times[i] < t_min) continue;
            second_moment += path[i] * path[i].transpose();
            sum += path[i];
            ++count;
        }
    }
    if (count == 0) throw ContractError("no recorded SDE states past t_min");
    const Vector mean = sum / static_cast<double>(count);
    Matrix covariance =
        second_moment / static_cast<double>(count) - mean * mean.transpose();
    return 0.5 * (covariance + covariance.transpose());
}

SdePathSet simulate_limit_sde(const DiffusionModel& model, double t_final, double step,
                              int n_paths, std::uint64_t seed, int record_every,
                              Vector z0) {
    if (!(step > 0.0) || !(step <= t_final))
        throw ContractError("simulate_limit_sde needs 0 < step <= t_final");
    if (n_paths < 1) throw ContractError("n_paths must be >= 1");
    if (record_every < 1) throw ContractError("record_every must be >= 1");

    const auto dim = model.a.rows();
    if (z0.size() == 0) z0 = Vector::Zero(dim);
    if (z0.size() != dim) throw ContractError("z0 dimension mismatch");

    const auto n_steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(t_final / step)));
    const double h = t_final / static_cast<double>(n_steps);
    const double sqrt_h = std::sqrt(h);
    const Matrix diffusion = symmetric_sqrt(model.sigma);
    const Matrix propagator = Matrix::Identity(dim, dim) + h * model.a;

    SdePathSet set;
    set.step = h;
    for (std::size_t i = record_every; i <= n_steps;
         i += static_cast<std::size_t>(record_every))
        set.times.push_back(h * static_cast<double>(i));
    if (set.times.empty() || set.times.back() < t_final - 0.5 * h)
        set.times.push_back(t_final);

    const RandomSource rng(seed);
    set.paths.resize(static_cast<std::size_t>(n_paths));
    Vector state(dim);
    Vector noise(dim);
    for (int p = 0; p < n_paths; ++p) {
        Substream stream = rng.stream(static_cast<std::uint64_t>(p), 0, Role::Path);
        auto& recorded = set.paths[static_cast<std::size_t>(p)];
        recorded.reserve(set.times.size());
        state = z0;
        std::size_t next_record = 0;
        for (std::size_t i = 1; i <= n_steps; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) noise[j] = stream.gaussian();
            state = propagator * state + sqrt_h * (diffusion * noise);
            const double t = h * static_cast<double>(i);
            if (next_record < set.times.size() &&
                t >= set.times[next_record] - 0.5 * h) {
                recorded.push_back(state);
                ++next_record;
            }
        }
        while (recorded.size() < set.times.size()) recorded.push_back(state);
    }
    return set;
}

// --- chi-square utilities ---------------------------------------------------

namespace {

/// Regularized lower incomplete gamma P(s, x), series + continued fraction.
double gamma_p(double s, double x) {
    if (!(s > 0.0) || x < 0.0) throw ContractError("gamma_p domain error");
    if (x == 0.0) return 0.0;

    const double log_prefactor = s * std::log(x) - x - std::lgamma(s);
    if (x < s + 1.0) {
        // Series: P = x^s e^-x / Gamma(s) * sum x^k / (s (s+1) ... (s+k)).
        double term = 1.0 / s;
        double sum = term;
        for (int k = 1; k < 500; ++k) {
            term *= x / (s + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return std::exp(log_prefactor) * sum;
    }
    // Continued fraction for Q (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k < 500; ++k) {
        const double an = -static_cast<double>(k) * (static_cast<double>(k) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefactor) * f;
}

}  // namespace

double chi_square_cdf(int dof, double x) {
    if (dof < 1) throw ContractError("chi-square dof must be >= 1");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(int dof, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ContractError("quantile needs p in (0, 1)");
    double lo = 0.0;
    double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 50.0;
    while (chi_square_cdf(dof, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi_square_cdf(dof, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

NormalityReport normality_diagnostic(const std::vector<Vector>& pooled_z, const Matrix& xi) {
    if (pooled_z.size() < 500)
        throw ContractError("normality diagnostic needs at least 500 pooled samples");
    Eigen::FullPivLU<Matrix> lu(xi);
    if (!lu.isInvertible())
        throw ContractError("singular covariance rejected by the normality diagnostic");

    const int dof = static_cast<int>(xi.rows());
    double sum = 0.0;
    double sum_sq = 0.0;
    const double q95 = chi_square_quantile(dof, 0.95);
    const double q99 = chi_square_quantile(dof, 0.99);
    std::size_t above95 = 0;
    std::size_t above99 = 0;
    for (const Vector& z : pooled_z) {
        const double d2 = z.dot(lu.solve(z));
        sum += d2;
        sum_sq += d2 * d2;
        if (d2 > q95) ++above95;
        if (d2 > q99) ++above99;
    }

    NormalityReport report;
    report.samples = pooled_z.size();
    report.dof = dof;
    const auto n = static_cast<double>(pooled_z.size());
    report.mean_d2 = sum / n;
    report.var_d2 = (sum_sq - n * report.mean_d2 * report.mean_d2) / (n - 1.0);
    report.mean_ratio = report.mean_d2 / static_cast<double>(dof);
    report.var_ratio = report.var_d2 / (2.0 * static_cast<double>(dof));
    report.tail05_observed = static_cast<double>(above95) / n;
    report.tail01_observed = static_cast<double>(above99) / n;
    report.consistent = report.mean_ratio >= 0.85 && report.mean_ratio <= 1.15;
    return report;
}

}  // namespace psolim
