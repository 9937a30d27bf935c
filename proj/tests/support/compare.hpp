#pragma once

#include <Eigen/Dense>

namespace psolim::testsupport {

inline bool exact_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.array() == b.array()).all();
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& reference) {
    return (a - reference).norm() / reference.norm();
}

}  // namespace psolim::testsupport
