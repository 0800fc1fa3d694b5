#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ddpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Sorted list of inequality-row indices (an active set).
using IndexSet = std::vector<Index>;

} // namespace ddpc
