#pragma once

#include "psolim/core/types.hpp"

#include <cstdint>

namespace psolim {

/// Role tag of a substream. Classic and generalized steps share the same
/// keying, so both consume identical values for identical (iteration,
/// particle, role) triples.
enum class Role : std::uint64_t {
    R1 = 1,      ///< cognitive uniforms
    R2 = 2,      ///< social uniforms
    Noise = 3,   ///< attractor noise
    Init = 4,    ///< initial positions
    Path = 5,    ///< SDE / Monte Carlo paths
    Generic = 6,
};

/// Sequential deterministic stream of uniforms and gaussians. The sequence
/// is a pure function of the 64-bit key it was created from.
class Substream {
public:
    explicit Substream(std::uint64_t key) : state_(key) {}

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Standard normal via Box-Muller; pairs are cached, so consecutive
    /// calls cost one transcendental set per two values.
    double gaussian();

    Vector uniform_vector(int n);
    Vector gaussian_vector(int n);

    std::uint64_t next_raw();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Seeded root of all randomness in a run. Stateless: substreams are keyed
/// by (iteration, particle, role), and identical seed + key always yields a
/// bit-identical sequence.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    Substream stream(std::uint64_t iteration, std::uint64_t particle, Role role) const;
    Substream stream(std::uint64_t a, std::uint64_t b, std::uint64_t c) const;

    /// Independent source for replication `index`; parallel replications
    /// never share draws.
    RandomSource fork(std::uint64_t index) const;

private:
    std::uint64_t seed_;
};

/// One sweep worth of cognitive/social uniforms: r1 then r2, each laid out
/// particle-major, dimension-minor and keyed per flat component. The single
/// source of draw order for every swarm update rule, so classic and
/// generalized steps consume identical values under a shared seed.
struct SweepDraws {
    Vector r1;
    Vector r2;
};
SweepDraws draw_sweep_uniforms(const RandomSource& rng, std::uint64_t iteration,
                               int components);

}  // namespace psolim
