#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mdt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-stochastic tolerance applied to constructed operators.
inline constexpr double kStochasticTol = 1e-12;

}  // namespace mdt
