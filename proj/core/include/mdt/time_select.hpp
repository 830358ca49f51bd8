#pragma once

#include "mdt/common.hpp"
#include "mdt/operator_space.hpp"

#include <span>
#include <vector>

namespace mdt {

/// Shannon entropy (natural log) of the singular values normalized to sum 1.
double singular_entropy(const Matrix& w);

struct ElbowResult {
  std::size_t index = 0;  // position in the input arrays
  double x = 0.0;
  bool fallback = false;  // Kneedle found no knee; discrete curvature used
};

/// Kneedle for decreasing convex curves with sensitivity S. When no knee is
/// found, falls back to the argmax of the discrete second difference, or to
/// the first point when the curve has no positive curvature at all.
ElbowResult elbow_detect(std::span<const double> xs, std::span<const double> ys,
                         double sensitivity = 1.0);

struct EntropyCurve {
  std::vector<int> times;
  std::vector<double> entropies;
  int elbow = 1;
  bool fallback = false;
};

inline constexpr int kDefaultTMax = 30;

/// Entropies of M^t for t = 1..t_max and their elbow.
EntropyCurve entropy_curve_of(const Matrix& mean_operator, int t_max = kDefaultTMax);

/// Curve of the expected operator (sum_p mu_p P_p)^t; empty mu means uniform.
EntropyCurve entropy_curve(const OperatorSet& set, std::span<const double> mu, int t_max = kDefaultTMax);

}  // namespace mdt
