#pragma once

#include <Eigen/Dense>

namespace sparsemine {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// M x L matrix of range profiles; every column is one signal.
using SignalMatrix = Matrix;

}  // namespace sparsemine
