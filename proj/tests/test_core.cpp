#include "psolim/core/attractors.hpp"
#include "psolim/core/noise.hpp"
#include "psolim/core/objective.hpp"
#include "psolim/core/random.hpp"
#include "psolim/core/types.hpp"

#include "support/compare.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace psolim;
using psolim::testsupport::exact_equal;

TEST_CASE("objective registry evaluates the built-in functions") {
    Vector origin2 = Vector::Zero(2);
    CHECK(evaluate_objective("sphere", origin2) == 0.0);
    CHECK(evaluate_objective("rastrigin", origin2) == 0.0);

    // Hand evaluation: 10 + 0.25 - 10*cos(pi) = 20.25.
    Vector half = Vector::Constant(1, 0.5);
    CHECK(evaluate_objective("rastrigin", half) == doctest::Approx(20.25).epsilon(1e-12));

    Vector probe = Vector::Constant(3, 1.5);
    CHECK(evaluate_objective("sphere", probe) == doctest::Approx(3 * 2.25));
}

TEST_CASE("non-finite input is rejected with a divergence error") {
    Vector bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(evaluate_objective("sphere", bad), DivergenceError);
    CHECK_THROWS_AS(ensure_finite(bad), DivergenceError);

    Vector huge = Vector::Constant(2, 2e12);
    CHECK_THROWS_AS(ensure_finite(huge), DivergenceError);
    CHECK(!is_finite_and_bounded(huge));
}

TEST_CASE("custom objectives can be registered") {
    ObjectiveRegistry::instance().register_objective(
        "shifted_sphere", [](const Eigen::Ref<const Vector>& x) {
            return (x.array() - 1.0).matrix().squaredNorm();
        });
    Vector ones = Vector::Ones(4);
    CHECK(evaluate_objective("shifted_sphere", ones) == 0.0);
    CHECK_THROWS_AS(evaluate_objective("no_such_objective", ones), ConfigError);
}

TEST_CASE("swarm vector stacks velocities first") {
    Vector v(2), x(2);
    v << 1.0, 2.0;
    x << 3.0, 4.0;
    SwarmVector state(v, x);
    CHECK(state.stacked()[0] == 1.0);
    CHECK(state.stacked()[2] == 3.0);
    CHECK(state.v()[1] == 2.0);
    CHECK(state.x()[1] == 4.0);

    CHECK_THROWS_AS(SwarmVector::from_stacked(Vector::Zero(3)), ContractError);
}

TEST_CASE("parameter validation rejects out-of-range fields") {
    GpsoParams params;
    CHECK_NOTHROW(params.validate());

    GpsoParams bad = params;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = params;
    bad.c1 = 0.0;
    bad.c2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = params;
    bad.particles = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = params;
    bad.c1 = -0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("identical seed and stream id give bit-identical draws") {
    RandomSource a(42);
    RandomSource b(42);
    Substream sa = a.stream(7, 3, Role::R1);
    Substream sb = b.stream(7, 3, Role::R1);
    for (int i = 0; i < 100; ++i) CHECK(sa.uniform() == sb.uniform());

    // Distinct roles or particles decorrelate.
    Substream sc = a.stream(7, 3, Role::R2);
    Substream sd = a.stream(7, 4, Role::R1);
    Substream se = a.stream(7, 3, Role::R1);
    CHECK(sc.uniform() != se.uniform());
    CHECK(sd.uniform() != sa.uniform());

    RandomSource other(43);
    Substream sf = other.stream(7, 3, Role::R1);
    Substream sg = a.stream(7, 3, Role::R1);
    CHECK(sf.uniform() != sg.uniform());
}

TEST_CASE("uniform draws live in (0,1) and have the right mean") {
    const int n = 200000;
    Substream stream = RandomSource(2024).stream(0, 0, Role::Generic);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = stream.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    const double bound = 4.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(double(n));
    CHECK(std::abs(sum / n - 0.5) < bound);
}

TEST_CASE("gaussian draws have unit scale") {
    const int n = 200000;
    Substream stream = RandomSource(99).stream(1, 0, Role::Generic);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = stream.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(double(n)));
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sweep draws are shared across callers") {
    RandomSource rng(7);
    const SweepDraws first = draw_sweep_uniforms(rng, 11, 6);
    const SweepDraws second = draw_sweep_uniforms(rng, 11, 6);
    CHECK(exact_equal(first.r1, second.r1));
    CHECK(exact_equal(first.r2, second.r2));
    CHECK(!exact_equal(first.r1, first.r2));
}

TEST_CASE("noise model draws match the requested moments") {
    const int size = 4;
    SUBCASE("none is exactly zero") {
        NoiseModel model = NoiseModel::none();
        CHECK(model.draw(RandomSource(1), 0, size).isZero());
        CHECK(!model.active());
    }
    SUBCASE("iid gaussian CLT bound") {
        NoiseModel model = NoiseModel::iid_gaussian(1.0, size);
        RandomSource rng(5);
        const int n = 100000;
        Vector mean = Vector::Zero(size);
        for (int k = 0; k < n; ++k) mean += model.draw(rng, k, size);
        mean /= double(n);
        for (int j = 0; j < size; ++j)
            CHECK(std::abs(mean[j]) < 4.0 / std::sqrt(double(n)));
    }
    SUBCASE("draws are independent of the r1/r2 streams") {
        NoiseModel model = NoiseModel::iid_gaussian(1.0, size);
        RandomSource rng(5);
        const Vector eta = model.draw(rng, 3, size);
        const SweepDraws draws = draw_sweep_uniforms(rng, 3, size / 2);
        const Vector eta_again = model.draw(rng, 3, size);
        CHECK(exact_equal(eta, eta_again));  // sweep consumption does not disturb noise
        CHECK(draws.r1.size() == size / 2);
    }
    SUBCASE("asymmetric covariance is rejected") {
        Matrix cov(2, 2);
        cov << 1.0, 0.5, -0.5, 1.0;
        CHECK_THROWS_AS(NoiseModel::iid_gaussian(Vector::Zero(2), cov), ConfigError);
    }
    SUBCASE("indefinite covariance is rejected") {
        Matrix cov(2, 2);
        cov << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(NoiseModel::iid_gaussian(Vector::Zero(2), cov), ConfigError);
    }
    SUBCASE("custom stream hook") {
        NoiseModel model = NoiseModel::custom(
            [](Substream&, std::uint64_t iteration, int n) {
                return Vector::Constant(n, double(iteration));
            });
        CHECK(exact_equal(model.draw(RandomSource(1), 7, 3), Vector::Constant(3, 7.0)));
    }
}

TEST_CASE("first observation seeds the personal bests") {
    AttractorModel model = AttractorModel::tracked(3, 2);
    Vector v = Vector::Zero(6);
    Vector x(6);
    x << 1, 2, 3, 4, 5, 6;
    model.observe(SwarmVector(v, x), sphere);
    CHECK(exact_equal(model.personal_best(), x));
}

TEST_CASE("global neighborhood best is the argmin of the personal bests") {
    // Objective crafted so F(Pr) = [3, 1, 2] across the three particles.
    AttractorModel model = AttractorModel::tracked(3, 1);
    Vector x(3);
    x << 3.0, 1.0, 2.0;
    model.observe(SwarmVector(Vector::Zero(3), x),
                  [](const Eigen::Ref<const Vector>& p) { return p[0]; });
    for (int i = 0; i < 3; ++i) {
        CHECK(model.neighborhood_best()[i] == 1.0);
        CHECK(model.neighborhood_best_values()[i] == 1.0);
    }
}

TEST_CASE("argmin ties keep the earliest index and incumbent") {
    AttractorModel model = AttractorModel::tracked(3, 1);
    auto value_of = [](const Eigen::Ref<const Vector>& p) { return std::abs(p[0]); };

    Vector x(3);
    x << -2.0, 2.0, 5.0;  // particles 0 and 1 tie in F
    model.observe(SwarmVector(Vector::Zero(3), x), value_of);
    CHECK(model.neighborhood_best()[2] == -2.0);  // earliest index wins the tie

    // A later equal-value improvement elsewhere must not displace it.
    x << -2.0, 2.0, -2.0;
    model.observe(SwarmVector(Vector::Zero(3), x), value_of);
    CHECK(model.neighborhood_best()[2] == -2.0);

    // Personal bests only move on strict improvement.
    CHECK(model.personal_best()[1] == 2.0);
}

TEST_CASE("tracked bests match a brute-force scan of the history") {
    const int particles = 5;
    const int steps = 100;
    AttractorModel model = AttractorModel::tracked(particles, 1);
    Substream stream = RandomSource(31415).stream(0, 0, Role::Generic);

    std::vector<Vector> history;
    Vector x = stream.gaussian_vector(particles) * 3.0;
    model.observe(SwarmVector(Vector::Zero(particles), x), sphere);
    history.push_back(x);
    for (int n = 0; n < steps; ++n) {
        x += stream.gaussian_vector(particles) * 0.5;  // random walk positions
        model.observe(SwarmVector(Vector::Zero(particles), x), sphere);
        history.push_back(x);
    }

    for (int i = 0; i < particles; ++i) {
        double best = std::numeric_limits<double>::infinity();
        double best_pos = 0.0;
        for (const Vector& positions : history) {
            const double value = positions[i] * positions[i];
            if (value < best) {
                best = value;
                best_pos = positions[i];
            }
        }
        CHECK(model.personal_best()[i] == best_pos);
        CHECK(model.personal_best_values()[i] == best);
    }
    // Global best equals the argmin over every recorded position.
    double overall = std::numeric_limits<double>::infinity();
    double overall_pos = 0.0;
    for (const Vector& positions : history)
        for (int i = 0; i < particles; ++i)
            if (positions[i] * positions[i] < overall) {
                overall = positions[i] * positions[i];
                overall_pos = positions[i];
            }
    CHECK(model.neighborhood_best()[0] == overall_pos);
}

TEST_CASE("noise-free tracked best values never increase") {
    AttractorModel model = AttractorModel::tracked(4, 2);
    Substream stream = RandomSource(8).stream(0, 0, Role::Generic);
    Vector x = stream.gaussian_vector(8) * 2.0;
    model.observe(SwarmVector(Vector::Zero(8), x), rastrigin);
    Vector previous = model.personal_best_values();
    Vector previous_pg = model.neighborhood_best_values();
    for (int n = 0; n < 200; ++n) {
        x += stream.gaussian_vector(8) * 0.3;
        model.observe(SwarmVector(Vector::Zero(8), x), rastrigin);
        for (int i = 0; i < 4; ++i) {
            CHECK(model.personal_best_values()[i] <= previous[i]);
            CHECK(model.neighborhood_best_values()[i] <= previous_pg[i]);
        }
        previous = model.personal_best_values();
        previous_pg = model.neighborhood_best_values();
    }
}

TEST_CASE("ring topology takes the neighborhood minimum exactly") {
    const int particles = 6;
    AttractorModel model = AttractorModel::tracked(particles, 1, Topology::ring(1));
    Vector x(particles);
    x << 5.0, 1.0, 4.0, 2.0, 6.0, 3.0;
    auto value_of = [](const Eigen::Ref<const Vector>& p) { return p[0]; };
    model.observe(SwarmVector(Vector::Zero(particles), x), value_of);

    for (int i = 0; i < particles; ++i) {
        double expected = std::numeric_limits<double>::infinity();
        for (int offset = -1; offset <= 1; ++offset) {
            const int j = ((i + offset) % particles + particles) % particles;
            expected = std::min(expected, x[j]);
        }
        CHECK(model.neighborhood_best_values()[i] == expected);
    }
}

TEST_CASE("closed-form queries return the mean functions without noise") {
    const int half = 3;
    AttractorModel model = AttractorModel::constant(Vector::Zero(half), Vector::Zero(half));
    SwarmVector theta = SwarmVector::zero(3, 1);
    const auto [pr, pg] = query_attractors(model, theta, RandomSource(1), 0);
    CHECK(pr.isZero());
    CHECK(pg.isZero());
}

TEST_CASE("closed-form query noise has the CLT-bounded sample mean") {
    const int half = 2;
    AttractorModel model = AttractorModel::constant(
        Vector::Zero(half), Vector::Zero(half), NoiseModel::iid_gaussian(1.0, 2 * half));
    SwarmVector theta = SwarmVector::zero(2, 1);
    RandomSource rng(17);
    const int n = 100000;
    Vector mean_pr = Vector::Zero(half);
    for (int k = 0; k < n; ++k) {
        const auto [pr, pg] = query_attractors(model, theta, rng, k);
        mean_pr += pr;
    }
    mean_pr /= double(n);
    for (int j = 0; j < half; ++j)
        CHECK(std::abs(mean_pr[j]) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("tracked queries pass the stored attractors through verbatim") {
    AttractorModel model = AttractorModel::tracked(2, 1);
    Vector x(2);
    x << 0.5, -0.25;
    model.observe(SwarmVector(Vector::Zero(2), x), sphere);
    const auto [pr, pg] = query_attractors(model, SwarmVector(Vector::Zero(2), x),
                                           RandomSource(3), 5);
    CHECK(exact_equal(pr, x));
    CHECK(exact_equal(pg, Vector::Constant(2, -0.25)));
}

TEST_CASE("update_attractors rejects closed-form models") {
    AttractorModel model = AttractorModel::constant(Vector::Zero(2), Vector::Zero(2));
    CHECK_THROWS_AS(update_attractors(SwarmVector::zero(2, 1), model, sphere),
                    ContractError);
}
