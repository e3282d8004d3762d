#pragma once
#include <Eigen/Dense>

namespace corpusgan {
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
}  // namespace corpusgan
