#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mdt {

/// DIRECT (DIviding RECTangles) global minimization over the unit box [0,1]^dim.
///
/// Deterministic. Every iteration selects the potentially optimal
/// hyper-rectangles (lower-right convex hull of size vs. center value, with
/// the usual epsilon = 1e-4 improvement condition) and trisects each along
/// its longest sides, ordered by the best value sampled along that side.
/// Sample points of one iteration are evaluated as a batch and may run on
/// several threads; results do not depend on the thread count.
struct DirectOptions {
  int budget = 100;          // maximum objective evaluations
  double epsilon = 1e-4;
  std::size_t threads = 1;
};

struct DirectResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  std::vector<std::pair<std::vector<double>, double>> trace;  // in evaluation order
};

using BoxObjective = std::function<double(std::span<const double>)>;

/// Minimizes `f`. Non-finite values (or exceptions) are treated as +infinity.
DirectResult direct_minimize(std::size_t dim, const BoxObjective& f, const DirectOptions& options);

}  // namespace mdt
