#include "psolim/core/noise.hpp"

#include <utility>

namespace psolim {

NoiseModel NoiseModel::none() {
    return NoiseModel{};
}

NoiseModel NoiseModel::iid_gaussian(Vector mean, Matrix covariance, std::uint64_t stream_tag) {
    const auto n = mean.size();
    if (covariance.rows() != n || covariance.cols() != n)
        throw ConfigError("noise covariance shape does not match the mean vector");
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
        throw ConfigError("noise covariance must be symmetric");

    NoiseModel model;
    model.kind_ = NoiseKind::IidGaussian;
    model.stream_tag_ = stream_tag;
    model.mean_ = std::move(mean);
    model.covariance_ = std::move(covariance);

    // Symmetric PSD square root; tolerates semidefinite covariances.
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(model.covariance_);
    if (eigen.info() != Eigen::Success)
        throw NumericalError("noise covariance eigendecomposition failed");
    Vector values = eigen.eigenvalues();
    const double tolerance = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < -tolerance)
            throw ConfigError("noise covariance must be positive semidefinite");
        values[i] = values[i] > 0.0 ? std::sqrt(values[i]) : 0.0;
    }
    model.transform_ = eigen.eigenvectors() * values.asDiagonal() *
                       eigen.eigenvectors().transpose();
    return model;
}

NoiseModel NoiseModel::iid_gaussian(double sigma, int size, std::uint64_t stream_tag) {
    if (sigma < 0.0) throw ConfigError("noise sigma must be nonnegative");
    return iid_gaussian(Vector::Zero(size),
                        Matrix::Identity(size, size) * (sigma * sigma), stream_tag);
}

NoiseModel NoiseModel::custom(CustomFn fn, std::uint64_t stream_tag) {
    if (!fn) throw ConfigError("custom noise function must not be empty");
    NoiseModel model;
    model.kind_ = NoiseKind::Custom;
    model.stream_tag_ = stream_tag;
    model.custom_ = std::move(fn);
    return model;
}

Vector NoiseModel::draw(const RandomSource& rng, std::uint64_t iteration, int size) const {
    switch (kind_) {
        case NoiseKind::None:
            return Vector::Zero(size);
        case NoiseKind::IidGaussian: {
            if (mean_.size() != size)
                throw ConfigError("noise dimension does not match the attractor stack");
            Substream stream = rng.stream(iteration, stream_tag_, Role::Noise);
            return mean_ + transform_ * stream.gaussian_vector(size);
        }
        case NoiseKind::Custom: {
            Substream stream = rng.stream(iteration, stream_tag_, Role::Noise);
            Vector value = custom_(stream, iteration, size);
            if (value.size() != size)
                throw ConfigError("custom noise returned a vector of the wrong size");
            return value;
        }
    }
    throw ContractError("unreachable noise kind");
}

}  // namespace psolim
