#include "psolim/core/objective.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

namespace psolim {

double sphere(const Eigen::Ref<const Vector>& x) {
    return x.squaredNorm();
}

double rastrigin(const Eigen::Ref<const Vector>& x) {
    double sum = 10.0 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        sum += x[i] * x[i] - 10.0 * std::cos(2.0 * std::numbers::pi * x[i]);
    return sum;
}

namespace {
std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

ObjectiveRegistry::ObjectiveRegistry() {
    entries_.emplace_back("sphere", ObjectiveFn(sphere));
    entries_.emplace_back("rastrigin", ObjectiveFn(rastrigin));
}

ObjectiveRegistry& ObjectiveRegistry::instance() {
    static ObjectiveRegistry registry;
    return registry;
}

void ObjectiveRegistry::register_objective(const std::string& id, ObjectiveFn fn) {
    std::lock_guard lock(registry_mutex());
    for (auto& [key, value] : entries_) {
        if (key == id) {
            value = std::move(fn);
            return;
        }
    }
    entries_.emplace_back(id, std::move(fn));
}

ObjectiveFn ObjectiveRegistry::find(const std::string& id) const {
    std::lock_guard lock(registry_mutex());
    for (const auto& [key, value] : entries_)
        if (key == id) return value;
    throw ConfigError("unknown objective id: " + id);
}

bool ObjectiveRegistry::contains(const std::string& id) const {
    std::lock_guard lock(registry_mutex());
    for (const auto& [key, value] : entries_)
        if (key == id) return true;
    return false;
}

std::vector<std::string> ObjectiveRegistry::ids() const {
    std::lock_guard lock(registry_mutex());
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [key, value] : entries_) out.push_back(key);
    return out;
}

double evaluate_objective(const std::string& id, const Eigen::Ref<const Vector>& x) {
    if (!x.allFinite())
        throw DivergenceError("objective evaluated at non-finite point");
    return ObjectiveRegistry::instance().find(id)(x);
}

}  // namespace psolim
