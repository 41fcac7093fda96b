#pragma once

#include <complex>

#include <Eigen/Dense>

namespace steer {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Spinor = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

// Smallest admissible level splitting (units of energy, hbar = 1).
inline constexpr double kGapFloor = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;

namespace pauli {

inline Mat2 identity() { return Mat2::Identity(); }

inline Mat2 sigma_x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat2 sigma_y() {
    Mat2 m;
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

inline Mat2 sigma_z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// b . sigma
inline Mat2 dot(const Vec3& b) {
    return b.x() * sigma_x() + b.y() * sigma_y() + b.z() * sigma_z();
}

} // namespace pauli

inline bool is_hermitian(const Mat2& m, double tol = 1e-14) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

} // namespace steer
