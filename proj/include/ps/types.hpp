#pragma once

#include <Eigen/Dense>

namespace ps {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;

} // namespace ps
