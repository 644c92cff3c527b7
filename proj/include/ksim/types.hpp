#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>

namespace ksim {

using Scalar = double;
using Complex = std::complex<Scalar>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

} // namespace ksim
