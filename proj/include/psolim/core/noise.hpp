#pragma once

#include "psolim/core/random.hpp"
#include "psolim/core/types.hpp"

#include <functional>
#include <memory>

namespace psolim {

enum class NoiseKind { None, IidGaussian, Custom };

/// Additive perturbation applied to queried attractors. The stacked noise
/// vector has length 2*r*D: the first half lands on the personal-best block,
/// the second half on the neighborhood-best block. Draws are keyed by
/// iteration and are independent of the r1/r2 streams.
class NoiseModel {
public:
    /// Custom generators receive a dedicated substream per iteration and
    /// must return a vector of the requested size.
    using CustomFn = std::function<Vector(Substream&, std::uint64_t iteration, int size)>;

    NoiseModel() = default;  ///< defaults to no noise

    static NoiseModel none();
    static NoiseModel iid_gaussian(Vector mean, Matrix covariance, std::uint64_t stream_tag = 0);
    /// Isotropic helper: mean 0, covariance sigma^2 * I of dimension `size`.
    static NoiseModel iid_gaussian(double sigma, int size, std::uint64_t stream_tag = 0);
    static NoiseModel custom(CustomFn fn, std::uint64_t stream_tag = 0);

    NoiseKind kind() const { return kind_; }
    bool active() const { return kind_ != NoiseKind::None; }

    /// Fresh draw for the given iteration; zero vector when kind is None.
    Vector draw(const RandomSource& rng, std::uint64_t iteration, int size) const;

    const Vector& mean() const { return mean_; }
    const Matrix& covariance() const { return covariance_; }

private:
    NoiseKind kind_ = NoiseKind::None;
    std::uint64_t stream_tag_ = 0;
    Vector mean_;
    Matrix covariance_;
    Matrix transform_;  // symmetric square root of the covariance
    CustomFn custom_;
};

}  // namespace psolim
