#pragma once

#include <Eigen/Dense>

namespace kinetics {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// Boltzmann constant (J/K). Temperatures throughout the library are in kelvin.
inline constexpr double kBoltzmann = 1.380649e-23;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace kinetics
