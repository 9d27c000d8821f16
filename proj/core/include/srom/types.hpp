#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace srom {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using ConstMatrixRef = Eigen::Ref<const Matrix>;
using ConstVectorRef = Eigen::Ref<const Vector>;
using ConstRowRef = Eigen::Ref<const RowVector>;

}  // namespace srom
