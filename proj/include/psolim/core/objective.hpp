#pragma once

#include "psolim/core/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace psolim {

using ObjectiveFn = std::function<double(const Eigen::Ref<const Vector>&)>;

/// F1: sum of squares, global optimum at the origin.
double sphere(const Eigen::Ref<const Vector>& x);

/// F2: 10*D + sum(x_i^2 - 10*cos(2*pi*x_i)), highly multimodal, global
/// optimum at the origin.
double rastrigin(const Eigen::Ref<const Vector>& x);

/// String-keyed objective lookup. "sphere" and "rastrigin" are built in;
/// custom objectives are registered programmatically.
class ObjectiveRegistry {
public:
    static ObjectiveRegistry& instance();

    void register_objective(const std::string& id, ObjectiveFn fn);
    ObjectiveFn find(const std::string& id) const;  ///< throws ConfigError if unknown
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    ObjectiveRegistry();
    std::vector<std::pair<std::string, ObjectiveFn>> entries_;
};

/// Evaluates a registered objective. Non-finite input is rejected with
/// DivergenceError.
double evaluate_objective(const std::string& id, const Eigen::Ref<const Vector>& x);

}  // namespace psolim
