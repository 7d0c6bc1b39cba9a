#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace signet {

using NodeId = std::int32_t;
using TopicId = std::int32_t;

// Embedding tables are indexed row-wise in the hot loops.
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace signet
