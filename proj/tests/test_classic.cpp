#include "psolim/classic/classic.hpp"

#include "psolim/core/objective.hpp"
#include "psolim/gpso/gpso.hpp"
#include "support/compare.hpp"

#include <doctest.h>

#include <cmath>

using namespace psolim;
using psolim::testsupport::exact_equal;

namespace {

SwarmVector random_state(int particles, int dim, std::uint64_t seed, double scale) {
    Substream stream = RandomSource(seed).stream(0, 0, Role::Init);
    const int half = particles * dim;
    return SwarmVector(stream.gaussian_vector(half) * (0.2 * scale),
                       stream.gaussian_vector(half) * scale);
}

}  // namespace

TEST_CASE("inertia with zero accelerations is ballistic") {
    Vector v = Vector::Ones(1);
    Vector x = Vector::Zero(1);
    AttractorModel attractors = AttractorModel::constant(Vector::Zero(1), Vector::Zero(1));
    const SwarmVector next = step_classic(SwarmVector(v, x), ClassicVariant::inertia(1.0),
                                          0.0, 0.0, attractors, RandomSource(1), 0);
    CHECK(next.v()[0] == 1.0);
    CHECK(next.x()[0] == 1.0);
}

TEST_CASE("zero constriction freezes the swarm") {
    SwarmVector state = random_state(3, 2, 5, 2.0);
    AttractorModel attractors = AttractorModel::tracked(3, 2);
    attractors.observe(state, sphere);
    const Vector before = state.x();
    SwarmVector theta = state;
    for (int n = 0; n < 5; ++n) {
        theta = step_classic(theta, ClassicVariant::constriction(0.0), 1.5, 1.5,
                             attractors, RandomSource(2), n);
        CHECK(theta.v().isZero());
        CHECK(exact_equal(theta.x(), before));
    }
}

TEST_CASE("position moves by exactly the new velocity") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SwarmVector state = random_state(4, 2, 100 + seed, 3.0);
        AttractorModel attractors = AttractorModel::tracked(4, 2);
        attractors.observe(state, rastrigin);
        for (const ClassicVariant& variant :
             {ClassicVariant::basic(), ClassicVariant::inertia(0.7),
              ClassicVariant::constriction(0.729)}) {
            const SwarmVector next = step_classic(state, variant, 1.7, 1.3, attractors,
                                                  RandomSource(seed), 0);
            CHECK(exact_equal(next.x() - state.x(), next.v()));
        }
    }
}

TEST_CASE("basic equals inertia(1) under identical draws") {
    const SwarmVector state = random_state(5, 1, 77, 2.5);
    AttractorModel attractors = AttractorModel::tracked(5, 1);
    attractors.observe(state, sphere);
    const SwarmVector a = step_classic(state, ClassicVariant::basic(), 1.5, 1.5,
                                       attractors, RandomSource(9), 4);
    const SwarmVector b = step_classic(state, ClassicVariant::inertia(1.0), 1.5, 1.5,
                                       attractors, RandomSource(9), 4);
    CHECK(exact_equal(a.stacked(), b.stacked()));
}

TEST_CASE("generalized recursion reproduces constriction trajectories") {
    // eps=0.01, chi=72.9, kappa1=-27.1, kappa2=72.9 embeds constriction(0.729):
    // eps*chi = 0.729, 1 + eps*kappa1 = 0.729, eps*kappa2 = 0.729.
    GpsoParams params;
    params.epsilon = 0.01;
    params.chi = 72.9;
    params.kappa1 = -27.1;
    params.kappa2 = 72.9;
    params.c1 = params.c2 = 1.5;
    params.particles = 5;
    params.dim = 1;

    const std::uint64_t seed = 2026;
    const SwarmVector theta0 = random_state(5, 1, seed, 4.0);

    const RunTrace gpso_trace =
        run_gpso(theta0, params, AttractorModel::tracked(5, 1), "sphere", 200, seed);
    const RunTrace classic_trace =
        run_classic(theta0, ClassicVariant::constriction(0.729), params,
                    AttractorModel::tracked(5, 1), "sphere", 200, seed);

    REQUIRE(gpso_trace.length() == classic_trace.length());
    double max_diff = 0.0;
    for (std::size_t n = 0; n < gpso_trace.length(); ++n)
        max_diff = std::max(max_diff,
                            (gpso_trace.states[n] - classic_trace.states[n])
                                .cwiseAbs()
                                .maxCoeff());
    CHECK(max_diff < 1e-12);
}

TEST_CASE("classic runner truncates diverging runs") {
    // Inertia far above 1 blows the velocity up geometrically.
    GpsoParams params;
    params.c1 = params.c2 = 0.1;
    Vector v = Vector::Ones(2) * 10.0;
    Vector x = Vector::Ones(2);
    const RunTrace trace =
        run_classic(SwarmVector(v, x), ClassicVariant::inertia(50.0), params,
                    AttractorModel::tracked(2, 1), "sphere", 1000, 3);
    CHECK(trace.diverged);
    CHECK(trace.length() < 1001);
    CHECK(!trace.diagnostic.empty());
}
