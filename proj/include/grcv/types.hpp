#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace grcv {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<Index>;

}  // namespace grcv
