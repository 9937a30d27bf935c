#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psolim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid configuration or user input (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// API used outside its stated preconditions.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// State left the admissible region: non-finite entries or norm beyond the
/// guard bound (CLI exit code 2).
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what, std::size_t step = 0)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Linear-algebra or solver failure (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coefficients of the generalized swarm recursion plus swarm geometry.
struct GpsoParams {
    double epsilon = 0.01;  ///< step size, > 0
    double kappa1 = -0.271;
    double kappa2 = 1.0;
    double chi = 1.0;
    double c1 = 1.5;  ///< cognitive acceleration, >= 0
    double c2 = 1.5;  ///< social acceleration, >= 0
    int particles = 5;
    int dim = 1;

    /// Number of scalar position (or velocity) components: particles * dim.
    int swarm_size() const { return particles * dim; }
    /// Full stacked state dimension: 2 * particles * dim.
    int state_size() const { return 2 * particles * dim; }

    /// Throws ConfigError if any field is out of range.
    void validate() const;
};

/// Stacked swarm state [v; x]: velocities first, positions second, each
/// block laid out particle-major, dimension-minor.
class SwarmVector {
public:
    SwarmVector() = default;

    SwarmVector(const Vector& velocities, const Vector& positions);

    /// Wraps an already-stacked vector; length must be even.
    static SwarmVector from_stacked(Vector stacked);

    static SwarmVector zero(int particles, int dim);

    int half() const { return static_cast<int>(data_.size()) / 2; }
    int size() const { return static_cast<int>(data_.size()); }

    Eigen::VectorBlock<const Vector> v() const { return data_.head(half()); }
    Eigen::VectorBlock<const Vector> x() const { return data_.tail(half()); }
    Eigen::VectorBlock<Vector> v() { return data_.head(half()); }
    Eigen::VectorBlock<Vector> x() { return data_.tail(half()); }

    const Vector& stacked() const { return data_; }
    Vector& stacked() { return data_; }

private:
    explicit SwarmVector(Vector stacked) : data_(std::move(stacked)) {}

    Vector data_;
};

/// States with sup-norm beyond this bound are treated as divergent.
inline constexpr double kDivergenceNormBound = 1e12;

bool is_finite_and_bounded(const Vector& stacked);
inline bool is_finite_and_bounded(const SwarmVector& state) {
    return is_finite_and_bounded(state.stacked());
}

/// Throws DivergenceError when the guard trips.
void ensure_finite(const Vector& stacked, std::size_t step = 0);
inline void ensure_finite(const SwarmVector& state, std::size_t step = 0) {
    ensure_finite(state.stacked(), step);
}

/// Time-indexed record of a single run: stacked states theta_0..theta_N plus
/// everything needed for bit-exact replay. If the divergence guard tripped,
/// `states` holds the prefix up to the last finite state.
struct RunTrace {
    GpsoParams params;
    std::uint64_t seed = 0;
    std::string kind = "gpso";  ///< CSV kind column: "gpso" or "classic"
    std::vector<Vector> states;
    bool diverged = false;
    std::size_t divergence_step = 0;
    std::string diagnostic;

    std::size_t length() const { return states.size(); }
};

}  // namespace psolim
