#include "mdt/time_select.hpp"

#include "mdt/trajectory.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace mdt {
namespace {

std::vector<double> normalize(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

std::optional<std::size_t> kneedle(std::span<const double> xs, std::span<const double> ys,
                                   double sensitivity) {
  const std::size_t n = xs.size();
  const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  if (!(*yhi > *ylo)) return std::nullopt;

  const std::vector<double> xn = normalize(xs);
  std::vector<double> yn = normalize(ys);
  // Decreasing convex: flip vertically so the elbow becomes a knee.
  for (double& y : yn) y = 1.0 - y;

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = yn[i] - xn[i];

  auto at = [&](std::ptrdiff_t i) {
    return diff[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1))];
  };
  std::vector<bool> is_max(n), is_min(n);
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    is_max[i] = diff[i] >= at(k - 1) && diff[i] >= at(k + 1);
    is_min[i] = diff[i] <= at(k - 1) && diff[i] <= at(k + 1);
    if (is_max[i]) maxima.push_back(i);
  }

  double mean_step = 0.0;
  for (std::size_t i = 1; i < n; ++i) mean_step += xn[i] - xn[i - 1];
  mean_step = std::abs(mean_step / static_cast<double>(n - 1));

  double threshold = 0.0;
  std::size_t threshold_index = maxima.front();
  for (std::size_t i = maxima.front(); i + 1 < n; ++i) {
    if (is_max[i]) {
      threshold = diff[i] - sensitivity * mean_step;
      threshold_index = i;
    }
    if (is_min[i]) threshold = 0.0;
    if (diff[i + 1] < threshold) return threshold_index;
  }
  return std::nullopt;
}

}  // namespace

double singular_entropy(const Matrix& w) {
  if (w.size() == 0) throw Error("singular entropy of an empty matrix");
  Eigen::BDCSVD<Matrix> svd(w);
  const Vector s = svd.singularValues();
  const double total = s.sum();
  if (!(total > 0.0)) throw Error("singular entropy of an all-zero matrix");
  double h = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    const double p = s(i) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

ElbowResult elbow_detect(std::span<const double> xs, std::span<const double> ys, double sensitivity) {
  if (xs.size() != ys.size()) throw Error("elbow_detect: xs and ys differ in length");
  if (xs.size() < 3) throw Error("elbow_detect needs at least 3 points");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error("elbow_detect: xs must be strictly increasing");
  }

  if (const auto knee = kneedle(xs, ys, sensitivity)) {
    return ElbowResult{*knee, xs[*knee], false};
  }

  // Fallback: sharpest convex bend of the discrete curve.
  double scale = 0.0;
  for (double y : ys) scale = std::max(scale, std::abs(y));
  std::size_t best = 0;
  double best_curv = 1e-12 * scale;
  for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
    const double curv = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
    if (curv > best_curv) {
      best_curv = curv;
      best = i;
    }
  }
  return ElbowResult{best, xs[best], true};
}

EntropyCurve entropy_curve_of(const Matrix& mean_operator, int t_max) {
  if (t_max < 3) throw Error("entropy curve needs t_max >= 3");
  EntropyCurve curve;
  Matrix power = mean_operator;
  for (int t = 1; t <= t_max; ++t) {
    if (t > 1) power = mean_operator * power;
    curve.times.push_back(t);
    curve.entropies.push_back(singular_entropy(power));
  }
  std::vector<double> xs(curve.times.begin(), curve.times.end());
  const ElbowResult elbow = elbow_detect(xs, curve.entropies);
  curve.elbow = curve.times[elbow.index];
  curve.fallback = elbow.fallback;
  return curve;
}

EntropyCurve entropy_curve(const OperatorSet& set, std::span<const double> mu, int t_max) {
  return entropy_curve_of(expected_operator(set, mu, 1), t_max);
}

}  // namespace mdt
