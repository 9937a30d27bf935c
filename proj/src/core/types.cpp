#include "psolim/core/types.hpp"

#include <cmath>
#include <sstream>

namespace psolim {

void GpsoParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid parameters: " + msg); };
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be positive");
    if (!std::isfinite(kappa1) || !std::isfinite(kappa2)) fail("kappa1/kappa2 must be finite");
    if (!std::isfinite(chi)) fail("chi must be finite");
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) fail("c1 and c2 must be nonnegative");
    if (!(c1 + c2 > 0.0)) fail("c1 + c2 must be positive");
    if (particles < 1) fail("particles must be >= 1");
    if (dim < 1) fail("dim must be >= 1");
}

SwarmVector::SwarmVector(const Vector& velocities, const Vector& positions) {
    if (velocities.size() != positions.size())
        throw ContractError("velocity and position blocks must have equal length");
    data_.resize(velocities.size() + positions.size());
    data_ << velocities, positions;
}

SwarmVector SwarmVector::from_stacked(Vector stacked) {
    if (stacked.size() % 2 != 0)
        throw ContractError("stacked state length must be even");
    return SwarmVector(std::move(stacked));
}

SwarmVector SwarmVector::zero(int particles, int dim) {
    if (particles < 1 || dim < 1)
        throw ContractError("particles and dim must be >= 1");
    return SwarmVector(Vector::Zero(2 * particles * dim));
}

bool is_finite_and_bounded(const Vector& stacked) {
    if (!stacked.allFinite()) return false;
    return stacked.lpNorm<Eigen::Infinity>() <= kDivergenceNormBound;
}

void ensure_finite(const Vector& stacked, std::size_t step) {
    if (is_finite_and_bounded(stacked)) return;
    std::ostringstream msg;
    if (!stacked.allFinite()) {
        msg << "state contains non-finite entries";
    } else {
        msg << "state norm " << stacked.lpNorm<Eigen::Infinity>() << " exceeds guard bound "
            << kDivergenceNormBound;
    }
    msg << " at step " << step;
    throw DivergenceError(msg.str(), step);
}

}  // namespace psolim
