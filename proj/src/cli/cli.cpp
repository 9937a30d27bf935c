#include "psolim/cli/cli.hpp"

#include "psolim/classic/classic.hpp"
#include "psolim/core/attractors.hpp"
#include "psolim/core/objective.hpp"
#include "psolim/gpso/gpso.hpp"
#include "psolim/io/config.hpp"
#include "psolim/io/csv.hpp"
#include "psolim/ode/ode.hpp"
#include "psolim/rate/rate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace psolim::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json matrix_to_json(const Matrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    j["data"] = std::move(data);  // row-major
    return j;
}

json vector_to_json(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

fs::path prepare_out_dir(const ExperimentConfig& config) {
    fs::path dir(config.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir.string());
    return dir;
}

/// Zero velocities, positions uniform in [-init_range, init_range].
SwarmVector initial_state(const ExperimentConfig& config) {
    const int half = config.params.swarm_size();
    Vector x(half);
    Substream stream = RandomSource(config.seed).stream(0, 0, Role::Init);
    for (int j = 0; j < half; ++j)
        x[j] = (2.0 * stream.uniform() - 1.0) * config.init_range;
    return SwarmVector(Vector::Zero(half), x);
}

AttractorModel make_attractors(const ExperimentConfig& config) {
    NoiseModel noise = config.make_noise_model();
    if (config.mode == "analysis") {
        const int half = config.params.swarm_size();
        return AttractorModel::constant(Vector::Constant(half, config.pr_star),
                                        Vector::Constant(half, config.pg_star),
                                        std::move(noise));
    }
    return AttractorModel::tracked(config.params.particles, config.params.dim,
                                   Topology::global(), std::move(noise));
}

ClassicVariant parse_variant(const std::string& text) {
    if (text == "basic") return ClassicVariant::basic();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const double coeff = std::stod(text.substr(colon + 1));
    if (head == "inertia") return ClassicVariant::inertia(coeff);
    if (head == "constriction") return ClassicVariant::constriction(coeff);
    throw ConfigError("not a classic variant: " + text);
}

double collapse_diameter(const Vector& stacked, int particles, int dim) {
    const SwarmVector state = SwarmVector::from_stacked(stacked);
    double diameter = 0.0;
    for (int i = 0; i < particles; ++i)
        for (int j = i + 1; j < particles; ++j) {
            const double distance =
                (state.x().segment(i * dim, dim) - state.x().segment(j * dim, dim))
                    .norm();
            diameter = std::max(diameter, distance);
        }
    return diameter;
}

// --- subcommands ------------------------------------------------------------

int cmd_run(const ExperimentConfig& config) {
    const fs::path dir = prepare_out_dir(config);
    const SwarmVector theta0 = initial_state(config);
    AttractorModel attractors = make_attractors(config);

    RunTrace trace;
    if (config.variant == "gpso") {
        trace = run_gpso(theta0, config.params, std::move(attractors), config.objective,
                         config.steps, config.seed);
    } else {
        trace = run_classic(theta0, parse_variant(config.variant), config.params,
                            std::move(attractors), config.objective, config.steps,
                            config.seed);
    }

    emit_trace_csv(trace, (dir / "trace.csv").string());
    write_text(dir / "config_used.txt", config.to_key_value());

    json summary;
    summary["kind"] = trace.kind;
    summary["steps"] = trace.length() - 1;
    summary["diverged"] = trace.diverged;
    if (trace.diverged) summary["diagnostic"] = trace.diagnostic;
    summary["final_collapse_diameter"] = collapse_diameter(
        trace.states.back(), config.params.particles, config.params.dim);
    write_json(dir / "run_summary.json", summary);

    std::cout << "trace written to " << (dir / "trace.csv").string() << "\n";
    if (trace.diverged) {
        std::cerr << "run diverged: " << trace.diagnostic << "\n";
        return 2;
    }
    return 0;
}

int cmd_ode(const ExperimentConfig& config, double t_final, double h) {
    const fs::path dir = prepare_out_dir(config);
    if (t_final <= 0.0) t_final = config.params.epsilon * static_cast<double>(config.steps);

    ExperimentConfig analysis = config;
    analysis.mode = "analysis";
    analysis.noise = "none";
    const AttractorModel attractors = make_attractors(analysis);
    const MeanField model = make_mean_field(config.params, attractors);

    const OdeTrajectory trajectory =
        integrate_ode(initial_state(config), model, t_final, h);
    emit_trace_csv(trajectory, (dir / "ode.csv").string());
    write_text(dir / "config_used.txt", config.to_key_value());
    std::cout << "trajectory written to " << (dir / "ode.csv").string() << "\n";
    return 0;
}

int cmd_lyapunov(const ExperimentConfig& config, const std::string& sigma_kind) {
    const int half = config.params.swarm_size();
    const Vector pr_star = Vector::Constant(half, config.pr_star);
    const Vector pg_star = Vector::Constant(half, config.pg_star);
    const AttractorModel attractors = AttractorModel::constant(
        pr_star, pg_star, config.make_noise_model());

    const MeanField model = make_mean_field(config.params, attractors);
    const SwarmVector theta_star = equilibrium(config.params, pr_star, pg_star);
    const Matrix a = model.m + jacobian_pbar(model, theta_star);

    Matrix sigma;
    if (sigma_kind == "identity") {
        sigma = Matrix::Identity(2 * half, 2 * half);
    } else if (sigma_kind == "analytic") {
        sigma = sigma_iid_closed_form(theta_star, config.params, attractors);
    } else if (sigma_kind == "estimate") {
        sigma = estimate_sigma(theta_star, config.params, attractors, 100000, 0,
                               config.seed + 0x5157ull);
    } else {
        throw ConfigError("--sigma must be identity | analytic | estimate");
    }

    const Matrix xi = solve_lyapunov(a, sigma);
    const double residual =
        (a * xi + xi * a.transpose() + sigma).cwiseAbs().maxCoeff();

    json out;
    out["a"] = matrix_to_json(a);
    out["sigma"] = matrix_to_json(sigma);
    out["xi"] = matrix_to_json(xi);
    out["residual_max_norm"] = residual;
    std::cout << out.dump(2) << "\n";

    if (!config.out.empty() && config.out != "out") {
        const fs::path dir = prepare_out_dir(config);
        write_json(dir / "lyapunov.json", out);
    }
    return 0;
}

int cmd_rate(const ExperimentConfig& config, int sde_paths, double sde_t, double sde_h) {
    if (config.mode != "analysis")
        throw ConfigError("the rate study needs mode=analysis (closed-form attractors)");
    const fs::path dir = prepare_out_dir(config);

    const int half = config.params.swarm_size();
    const Vector pr_star = Vector::Constant(half, config.pr_star);
    const Vector pg_star = Vector::Constant(half, config.pg_star);
    const AttractorModel attractors = make_attractors(config);
    const SwarmVector theta_star = equilibrium(config.params, pr_star, pg_star);

    const MeanField model = make_mean_field(config.params, attractors);
    const Matrix a = model.m + jacobian_pbar(model, theta_star);

    const Matrix sigma = estimate_sigma(theta_star, config.params, attractors, 100000,
                                        0, config.seed + 0x5157ull);
    const DiffusionModel diffusion = make_diffusion_model(a, sigma);

    ReplicationConfig rep_config;
    rep_config.params = config.params;
    rep_config.attractors = attractors;
    rep_config.theta0 = theta_star;
    rep_config.theta_star = theta_star;
    rep_config.n_steps = config.steps;
    rep_config.seed = config.seed;

    const std::size_t burn = config.effective_burn_in();
    const std::size_t per_rep = config.steps > burn ? config.steps - burn : 0;
    const std::size_t target_kept = 200000;
    const int thin = static_cast<int>(std::max<std::size_t>(
        1, per_rep * static_cast<std::size_t>(config.reps) / target_kept));

    const ReplicationStudy study =
        run_replication_study(rep_config, config.reps, burn, thin, config.jobs);

    const SdePathSet sde = simulate_limit_sde(diffusion, sde_t, sde_h, sde_paths,
                                              config.seed + 0xEDEull,
                                              std::max(1, static_cast<int>(1.0 / sde_h)));
    const Matrix sde_cov = sde.covariance_from(sde_t / 2.0);

    const NormalityReport normality = normality_diagnostic(study.pooled_z, diffusion.xi);

    const double xi_norm = diffusion.xi.norm();
    json out;
    out["sigma_estimate"] = matrix_to_json(sigma);
    if (attractors.noise().kind() != NoiseKind::Custom) {
        const Matrix sigma_analytic =
            sigma_iid_closed_form(theta_star, config.params, attractors);
        out["sigma_analytic"] = matrix_to_json(sigma_analytic);
        out["sigma_estimate_vs_analytic_rel_frobenius"] =
            sigma_analytic.norm() > 0.0
                ? (sigma - sigma_analytic).norm() / sigma_analytic.norm()
                : (sigma - sigma_analytic).norm();
    }
    out["a"] = matrix_to_json(a);
    out["xi"] = matrix_to_json(diffusion.xi);
    out["empirical_covariance"] = matrix_to_json(study.covariance);
    out["empirical_vs_xi_rel_frobenius"] = (study.covariance - diffusion.xi).norm() / xi_norm;
    out["sde_covariance"] = matrix_to_json(sde_cov);
    out["sde_vs_xi_rel_frobenius"] = (sde_cov - diffusion.xi).norm() / xi_norm;
    out["replications"] = study.replications;
    out["divergent"] = study.divergent;
    out["pooled_samples"] = study.samples;
    out["burn_in"] = burn;
    out["normality"] = {
        {"samples", normality.samples},
        {"dof", normality.dof},
        {"mean_d2", normality.mean_d2},
        {"var_d2", normality.var_d2},
        {"mean_ratio", normality.mean_ratio},
        {"var_ratio", normality.var_ratio},
        {"tail05_observed", normality.tail05_observed},
        {"tail01_observed", normality.tail01_observed},
        {"consistent", normality.consistent},
    };
    write_json(dir / "rate_summary.json", out);
    emit_samples_csv(study.pooled_z, (dir / "z_samples.csv").string());
    write_text(dir / "config_used.txt", config.to_key_value());

    std::cout << "rate study written to " << (dir / "rate_summary.json").string()
              << "\n  empirical vs xi rel Frobenius: "
              << out["empirical_vs_xi_rel_frobenius"].get<double>()
              << "\n  sde vs xi rel Frobenius:       "
              << out["sde_vs_xi_rel_frobenius"].get<double>()
              << "\n  normality mean(d2)/dof:        " << normality.mean_ratio << "\n";
    return 0;
}

int cmd_bench(const ExperimentConfig& config, const std::string& objectives_flag) {
    const fs::path dir = prepare_out_dir(config);

    std::vector<std::string> ids;
    if (objectives_flag.empty() || objectives_flag == "all") {
        ids = ObjectiveRegistry::instance().ids();
    } else {
        std::istringstream list(objectives_flag);
        std::string id;
        while (std::getline(list, id, ',')) ids.push_back(id);
    }

    std::ostringstream csv;
    csv << "objective,reps,steps,mean_final_best,min_final_best,mean_collapse_diameter,"
           "divergent\n";
    json summary = json::array();
    for (const std::string& id : ids) {
        const ObjectiveFn objective = ObjectiveRegistry::instance().find(id);
        double best_sum = 0.0;
        double best_min = std::numeric_limits<double>::infinity();
        double diameter_sum = 0.0;
        int divergent = 0;
        const RandomSource root(config.seed);
        for (int rep = 0; rep < config.reps; ++rep) {
            ExperimentConfig rep_config = config;
            rep_config.objective = id;
            rep_config.seed = root.fork(static_cast<std::uint64_t>(rep)).seed();
            const SwarmVector theta0 = initial_state(rep_config);
            AttractorModel attractors = make_attractors(rep_config);
            const RunTrace trace = run_gpso(theta0, rep_config.params, attractors, id,
                                            rep_config.steps, rep_config.seed);
            if (trace.diverged) {
                ++divergent;
                continue;
            }
            // Best objective value over final positions.
            const SwarmVector final_state = SwarmVector::from_stacked(trace.states.back());
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rep_config.params.particles; ++i)
                best = std::min(best, objective(final_state.x().segment(
                                          i * rep_config.params.dim,
                                          rep_config.params.dim)));
            best_sum += best;
            best_min = std::min(best_min, best);
            diameter_sum += collapse_diameter(trace.states.back(),
                                              rep_config.params.particles,
                                              rep_config.params.dim);
        }
        const int completed = config.reps - divergent;
        const double mean_best = completed > 0 ? best_sum / completed : 0.0;
        const double mean_diameter = completed > 0 ? diameter_sum / completed : 0.0;
        csv << id << ',' << config.reps << ',' << config.steps << ','
            << format_double(mean_best) << ',' << format_double(best_min) << ','
            << format_double(mean_diameter) << ',' << divergent << '\n';
        summary.push_back({{"objective", id},
                           {"mean_final_best", mean_best},
                           {"min_final_best", best_min},
                           {"mean_collapse_diameter", mean_diameter},
                           {"divergent", divergent}});
        std::cout << id << ": mean final best " << mean_best << ", min " << best_min
                  << ", mean collapse diameter " << mean_diameter << "\n";
    }
    write_text(dir / "bench.csv", csv.str());
    write_json(dir / "bench.json", summary);
    return 0;
}

/// Trace of one run with per-step attractor history, for figure output.
struct FigureRun {
    RunTrace trace;
    std::vector<Vector> pr_history;        // r*D per step
    std::vector<Vector> pg_history;        // r*D per step
    std::vector<Vector> pr_value_history;  // r per step
    std::vector<Vector> pg_value_history;  // r per step
    AttractorModel final_attractors;
};

FigureRun run_with_attractor_history(const ExperimentConfig& config) {
    const SwarmVector theta0 = initial_state(config);
    AttractorModel attractors = make_attractors(config);
    const ObjectiveFn objective = ObjectiveRegistry::instance().find(config.objective);
    attractors.observe(theta0, objective);

    FigureRun out;
    out.trace.params = config.params;
    out.trace.seed = config.seed;
    out.trace.kind = "gpso";

    auto record = [&] {
        out.pr_history.push_back(attractors.personal_best());
        out.pg_history.push_back(attractors.neighborhood_best());
        out.pr_value_history.push_back(attractors.personal_best_values());
        out.pg_value_history.push_back(attractors.neighborhood_best_values());
    };

    const RandomSource rng(config.seed);
    SwarmVector theta = theta0;
    out.trace.states.push_back(theta.stacked());
    record();
    for (std::uint64_t n = 0; n < config.steps; ++n) {
        auto [next, parts] = step_gpso(theta, config.params, attractors, rng, n);
        (void)parts;
        if (!is_finite_and_bounded(next)) {
            out.trace.diverged = true;
            out.trace.divergence_step = n + 1;
            out.trace.diagnostic = "divergence guard tripped at step " + std::to_string(n + 1);
            break;
        }
        theta = std::move(next);
        attractors.observe(theta, objective);
        out.trace.states.push_back(theta.stacked());
        record();
    }
    out.final_attractors = attractors;
    return out;
}

void write_attractor_csv(const FigureRun& run, const fs::path& path, double epsilon) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    const auto half = run.pr_history.front().size();
    const auto particles = run.pr_value_history.front().size();
    out << "n,t";
    for (Eigen::Index j = 0; j < half; ++j) out << ",pr_" << j;
    for (Eigen::Index j = 0; j < half; ++j) out << ",pg_" << j;
    for (Eigen::Index i = 0; i < particles; ++i) out << ",f_pr_" << i;
    for (Eigen::Index i = 0; i < particles; ++i) out << ",f_pg_" << i;
    out << '\n';
    for (std::size_t n = 0; n < run.pr_history.size(); ++n) {
        out << n << ',' << format_double(epsilon * static_cast<double>(n));
        for (Eigen::Index j = 0; j < half; ++j)
            out << ',' << format_double(run.pr_history[n][j]);
        for (Eigen::Index j = 0; j < half; ++j)
            out << ',' << format_double(run.pg_history[n][j]);
        for (Eigen::Index i = 0; i < particles; ++i)
            out << ',' << format_double(run.pr_value_history[n][i]);
        for (Eigen::Index i = 0; i < particles; ++i)
            out << ',' << format_double(run.pg_value_history[n][i]);
        out << '\n';
    }
}

int cmd_repro_paper(const ExperimentConfig& base, std::uint64_t collapse_steps,
                    std::uint64_t figure_steps) {
    const fs::path dir = prepare_out_dir(base);
    json summary = json::array();
    std::ostringstream gnuplot;
    gnuplot << "# gnuplot script for the experiment figures\n"
            << "set datafile separator ','\n"
            << "set key off\n";

    for (const std::string objective : {"sphere", "rastrigin"}) {
        for (int dim : {1, 2}) {
            ExperimentConfig config = base;
            config.objective = objective;
            config.params.dim = dim;
            config.mode = "optimize";
            const std::string tag = objective + "_d" + std::to_string(dim);

            // Noise-free long run: swarm collapse measurement.
            ExperimentConfig quiet = config;
            quiet.noise = "none";
            quiet.steps = collapse_steps;
            const RunTrace long_run =
                run_gpso(initial_state(quiet), quiet.params, make_attractors(quiet),
                         quiet.objective, quiet.steps, quiet.seed);
            const double diameter = collapse_diameter(
                long_run.states.back(), quiet.params.particles, quiet.params.dim);

            // Noisy figure run with attractor history.
            ExperimentConfig noisy = config;
            if (noisy.noise == "none") noisy.noise = "gauss:1";
            noisy.steps = figure_steps;
            const FigureRun figure = run_with_attractor_history(noisy);

            emit_trace_csv(figure.trace,
                           (dir / ("fig_" + tag + "_trajectories.csv")).string());
            write_attractor_csv(figure, dir / ("fig_" + tag + "_attractors.csv"),
                                noisy.params.epsilon);

            // Scaled errors around the equilibrium implied by the final bests.
            const auto& attractors = figure.final_attractors;
            const SwarmVector theta_hat = equilibrium(noisy.params,
                                                      attractors.personal_best(),
                                                      attractors.neighborhood_best());
            const ScaledErrorSeries series = scaled_errors(figure.trace, theta_hat, 0);
            emit_samples_csv(series.z,
                             (dir / ("fig_" + tag + "_scaled_errors.csv")).string());

            const double best_f = figure.final_attractors.neighborhood_best_values()
                                      .minCoeff();
            summary.push_back({{"objective", objective},
                               {"dim", dim},
                               {"collapse_steps", collapse_steps},
                               {"collapse_diameter", diameter},
                               {"noisefree_diverged", long_run.diverged},
                               {"noisy_diverged", figure.trace.diverged},
                               {"noisy_best_f", best_f}});

            gnuplot << "set terminal pngcairo size 800,600\n"
                    << "set output 'fig_" << tag << "_trajectories.png'\n"
                    << "plot for [col=3:" << (2 + 2 * config.params.swarm_size())
                    << "] 'fig_" << tag
                    << "_trajectories.csv' using 2:col with lines\n"
                    << "set output 'fig_" << tag << "_scaled_errors.png'\n"
                    << "plot 'fig_" << tag << "_scaled_errors.csv' using 1:2 with lines\n"
                    << "set output 'fig_" << tag << "_attractors.png'\n"
                    << "plot for [col=3:" << (2 + 2 * config.params.swarm_size())
                    << "] 'fig_" << tag << "_attractors.csv' using 2:col with lines\n";

            std::cout << tag << ": collapse diameter " << diameter
                      << (long_run.diverged ? " (diverged!)" : "") << ", noisy best F "
                      << best_f << "\n";
        }
    }
    write_json(dir / "repro_summary.json", summary);
    write_text(dir / "plot_figures.gp", gnuplot.str());
    write_text(dir / "config_used.txt", base.to_key_value());
    std::cout << "figure data written to " << dir.string() << "\n";
    return 0;
}

// --- option plumbing ----------------------------------------------------------

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> steps;
    std::optional<int> reps;
    std::optional<std::string> objective;
    std::optional<int> dim;
    std::optional<int> particles;
    std::optional<std::string> noise;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::string> variant;
    std::optional<std::string> mode;
    std::optional<long> burn_in;
    std::optional<double> chi;
    std::optional<double> kappa1;
    std::optional<double> kappa2;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<double> pr_star;
    std::optional<double> pg_star;
    std::optional<double> init_range;

    void add_to(CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--seed", seed, "root RNG seed");
        sub->add_option("--epsilon", epsilon, "step size");
        sub->add_option("--steps", steps, "iterations per run");
        sub->add_option("--reps", reps, "replication count");
        sub->add_option("--objective", objective, "objective id");
        sub->add_option("--dim", dim, "particle dimension");
        sub->add_option("--particles", particles, "swarm size");
        sub->add_option("--noise", noise, "none | gauss:<sigma>");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--jobs", jobs, "parallel replications");
        sub->add_option("--variant", variant,
                        "gpso | basic | inertia:<w> | constriction:<chi>");
        sub->add_option("--mode", mode, "optimize | analysis");
        sub->add_option("--burn-in", burn_in, "burn-in iterations (-1 = default)");
        sub->add_option("--chi", chi, "chi coefficient");
        sub->add_option("--kappa1", kappa1, "kappa1 coefficient");
        sub->add_option("--kappa2", kappa2, "kappa2 coefficient");
        sub->add_option("--c1", c1, "cognitive acceleration");
        sub->add_option("--c2", c2, "social acceleration");
        sub->add_option("--pr-star", pr_star, "analysis-mode personal-best mean");
        sub->add_option("--pg-star", pg_star, "analysis-mode neighborhood-best mean");
        sub->add_option("--init-range", init_range, "initial position range");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig config;
        if (config_path) config = parse_config_file(*config_path);
        if (seed) config.seed = *seed;
        if (epsilon) config.params.epsilon = *epsilon;
        if (steps) config.steps = *steps;
        if (reps) config.reps = *reps;
        if (objective) config.objective = *objective;
        if (dim) config.params.dim = *dim;
        if (particles) config.params.particles = *particles;
        if (noise) config.noise = *noise;
        if (out) config.out = *out;
        if (jobs) config.jobs = *jobs;
        if (variant) config.variant = *variant;
        if (mode) config.mode = *mode;
        if (burn_in) config.burn_in = *burn_in;
        if (chi) config.params.chi = *chi;
        if (kappa1) config.params.kappa1 = *kappa1;
        if (kappa2) config.params.kappa2 = *kappa2;
        if (c1) config.params.c1 = *c1;
        if (c2) config.params.c2 = *c2;
        if (pr_star) config.pr_star = *pr_star;
        if (pg_star) config.pg_star = *pg_star;
        if (init_range) config.init_range = *init_range;
        config.validate();
        return config;
    }
};

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"generalized particle swarm runs, mean-field limits, and "
                 "rate-of-convergence studies"};
    app.require_subcommand(1);

    CommonFlags run_flags, ode_flags, rate_flags, lyap_flags, bench_flags, repro_flags;

    CLI::App* run_cmd = app.add_subcommand("run", "single trace");
    run_flags.add_to(run_cmd);

    CLI::App* ode_cmd = app.add_subcommand("ode", "integrate the mean-field limit");
    ode_flags.add_to(ode_cmd);
    double t_final = 0.0;
    double h_ode = 1e-3;
    ode_cmd->add_option("--t-final", t_final, "horizon (default epsilon*steps)");
    ode_cmd->add_option("--h-ode", h_ode, "integrator step");

    CLI::App* rate_cmd = app.add_subcommand("rate", "replicated rate-of-convergence study");
    rate_flags.add_to(rate_cmd);
    int sde_paths = 1000;
    double sde_t = 30.0;
    double sde_h = 1e-3;
    rate_cmd->add_option("--sde-paths", sde_paths, "limit-SDE sample paths");
    rate_cmd->add_option("--sde-t", sde_t, "limit-SDE horizon");
    rate_cmd->add_option("--sde-h", sde_h, "limit-SDE step");

    CLI::App* lyap_cmd = app.add_subcommand("lyapunov", "stationary covariance solve");
    lyap_flags.add_to(lyap_cmd);
    std::string sigma_kind = "identity";
    lyap_cmd->add_option("--sigma", sigma_kind, "identity | analytic | estimate");

    CLI::App* bench_cmd = app.add_subcommand("bench", "objective sweep");
    bench_flags.add_to(bench_cmd);
    std::string bench_objectives;
    bench_cmd->add_option("--objectives", bench_objectives,
                          "comma list or 'all' (default all)");

    CLI::App* repro_cmd = app.add_subcommand("repro-paper", "full experiment suite");
    repro_flags.add_to(repro_cmd);
    std::uint64_t collapse_steps = 100000;
    std::uint64_t figure_steps = 3000;
    repro_cmd->add_option("--collapse-steps", collapse_steps, "noise-free run length");
    repro_cmd->add_option("--figure-steps", figure_steps, "noisy figure run length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_flags.resolve());
        if (ode_cmd->parsed()) return cmd_ode(ode_flags.resolve(), t_final, h_ode);
        if (rate_cmd->parsed()) {
            ExperimentConfig config = rate_flags.resolve();
            if (!rate_flags.mode) config.mode = "analysis";
            if (!rate_flags.noise && config.noise == "none") config.noise = "gauss:1";
            if (!rate_flags.steps) config.steps = config.effective_burn_in() + 1500;
            if (!rate_flags.reps) config.reps = 2000;
            config.validate();
            return cmd_rate(config, sde_paths, sde_t, sde_h);
        }
        if (lyap_cmd->parsed()) return cmd_lyapunov(lyap_flags.resolve(), sigma_kind);
        if (bench_cmd->parsed()) return cmd_bench(bench_flags.resolve(), bench_objectives);
        if (repro_cmd->parsed())
            return cmd_repro_paper(repro_flags.resolve(), collapse_steps, figure_steps);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace psolim::cli
