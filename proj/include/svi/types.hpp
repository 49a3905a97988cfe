#pragma once

#include <Eigen/Dense>

namespace svi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace svi
