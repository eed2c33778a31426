#pragma once

#include <Eigen/Dense>
#include <numbers>

namespace ptc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace ptc
