#include "psolim/core/random.hpp"

#include <cmath>
#include <numbers>

namespace psolim {

namespace {

// splitmix64 finalizer: full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Folds one word into the key with a full mix in between, so distinct
// (seed, a, b, c) tuples map to well-separated stream keys.
inline std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
    return mix64(key + kGolden + word);
}

}  // namespace

std::uint64_t Substream::next_raw() {
    state_ += kGolden;
    return mix64(state_);
}

double Substream::uniform() {
    // 53 random bits centered inside (0, 1); never 0 or 1, so logs are safe.
    const std::uint64_t bits = next_raw() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Substream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector Substream::uniform_vector(int n) {
    Vector out(n);
    for (int i = 0; i < n; ++i) out[i] = uniform();
    return out;
}

Vector Substream::gaussian_vector(int n) {
    Vector out(n);
    for (int i = 0; i < n; ++i) out[i] = gaussian();
    return out;
}

Substream RandomSource::stream(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    std::uint64_t key = mix64(seed_ + kGolden);
    key = absorb(key, a);
    key = absorb(key, b);
    key = absorb(key, c);
    return Substream(key);
}

Substream RandomSource::stream(std::uint64_t iteration, std::uint64_t particle, Role role) const {
    return stream(iteration, particle, static_cast<std::uint64_t>(role));
}

RandomSource RandomSource::fork(std::uint64_t index) const {
    std::uint64_t key = mix64(seed_ + kGolden);
    key = absorb(key, 0x666F726Bull);  // domain separation from stream()
    key = absorb(key, index);
    return RandomSource(key);
}

SweepDraws draw_sweep_uniforms(const RandomSource& rng, std::uint64_t iteration,
                               int components) {
    SweepDraws draws{Vector(components), Vector(components)};
    for (int j = 0; j < components; ++j)
        draws.r1[j] = rng.stream(iteration, static_cast<std::uint64_t>(j), Role::R1).uniform();
    for (int j = 0; j < components; ++j)
        draws.r2[j] = rng.stream(iteration, static_cast<std::uint64_t>(j), Role::R2).uniform();
    return draws;
}

}  // namespace psolim
