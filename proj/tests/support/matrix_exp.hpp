#pragma once

// Scaling-and-squaring matrix exponential with a Pade(13) core. Test-only
// oracle for linear-system endpoints; independent of the integrators under
// test.

#include <Eigen/Dense>

#include <cmath>

namespace psolim::testsupport {

inline Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a) {
    using Matrix = Eigen::MatrixXd;
    const auto n = a.rows();

    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    // theta_13 for double precision Pade approximation.
    const double theta = 5.371920351148152;
    if (norm > theta)
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta)));
    const Matrix scaled = a / std::pow(2.0, squarings);

    static const double b[] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};

    const Matrix identity = Matrix::Identity(n, n);
    const Matrix a2 = scaled * scaled;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;

    const Matrix u = scaled * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                               b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * identity);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * identity;

    Matrix result = (v - u).partialPivLu().solve(v + u);
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

}  // namespace psolim::testsupport
