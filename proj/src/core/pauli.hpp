#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace axy {

inline Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

inline Eigen::Matrix2cd sigma_y() {
    Eigen::Matrix2cd m;
    m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
    return m;
}

inline Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

// rotation axis in the transverse plane: cos(phi) sigma_x + sin(phi) sigma_y
inline Eigen::Matrix2cd sigma_phi(double phi) {
    return std::cos(phi) * sigma_x() + std::sin(phi) * sigma_y();
}

}  // namespace axy
