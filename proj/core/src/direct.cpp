#include "mdt/direct.hpp"

#include "mdt/common.hpp"
#include "mdt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mdt {
namespace {

// Stand-in for +infinity in slope computations.
constexpr double kHuge = 1e300;
constexpr int kMaxLevel = 30;

struct Rect {
  std::vector<double> center;
  std::vector<int> level;  // side length along dim i is 3^-level[i]
  double f;
};

double rect_size(const Rect& r) {
  double s = 0.0;
  for (int l : r.level) s += std::pow(9.0, -l);
  return 0.5 * std::sqrt(s);
}

double safe_eval(const BoxObjective& f, std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<std::size_t> potentially_optimal(const std::vector<Rect>& rects, double epsilon) {
  // Best rectangle per size class; the class key is the sorted level vector.
  std::map<std::vector<int>, std::size_t> best;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    if (*std::min_element(rects[i].level.begin(), rects[i].level.end()) >= kMaxLevel) continue;
    std::vector<int> key = rects[i].level;
    std::sort(key.begin(), key.end());
    auto it = best.find(key);
    if (it == best.end() || rects[i].f < rects[it->second].f) best[key] = i;
  }
  struct Candidate {
    std::size_t index;
    double d;
    double f;
  };
  std::vector<Candidate> cands;
  double fmin = kHuge;
  for (const auto& [key, idx] : best) {
    const double f = std::min(rects[idx].f, kHuge);
    cands.push_back({idx, rect_size(rects[idx]), f});
    fmin = std::min(fmin, f);
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.d < b.d || (a.d == b.d && a.index < b.index);
  });

  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    double k_low = -std::numeric_limits<double>::infinity();
    double k_up = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (cands[i].d < cands[j].d) {
        k_low = std::max(k_low, (cands[j].f - cands[i].f) / (cands[j].d - cands[i].d));
      } else if (cands[i].d > cands[j].d) {
        k_up = std::min(k_up, (cands[i].f - cands[j].f) / (cands[i].d - cands[j].d));
      }
    }
    if (!(k_up > 0.0) || k_low > k_up) continue;
    if (std::isfinite(k_up) &&
        cands[j].f - k_up * cands[j].d > fmin - epsilon * std::abs(fmin)) {
      continue;
    }
    out.push_back(cands[j].index);
  }
  return out;
}

}  // namespace

DirectResult direct_minimize(std::size_t dim, const BoxObjective& f, const DirectOptions& options) {
  if (options.budget < 1) throw Error("DIRECT budget must be >= 1");
  DirectResult result;
  auto record = [&](const std::vector<double>& x, double v) {
    result.trace.emplace_back(x, v);
    ++result.evaluations;
    if (result.evaluations == 1 || v < result.best_value) {
      result.best_value = v;
      result.best_x = x;
    }
  };

  std::vector<Rect> rects;
  {
    std::vector<double> c(dim, 0.5);
    const double v = safe_eval(f, c);
    record(c, v);
    rects.push_back(Rect{c, std::vector<int>(dim, 0), v});
  }
  if (dim == 0) return result;

  while (result.evaluations < options.budget) {
    const auto selected = potentially_optimal(rects, options.epsilon);

    // Plan the divisions that fit into the remaining budget.
    struct Plan {
      std::size_t rect;
      std::vector<std::size_t> dims;
      std::size_t first_point;
    };
    std::vector<Plan> plans;
    std::vector<std::vector<double>> points;
    int planned = result.evaluations;
    for (std::size_t idx : selected) {
      const Rect& r = rects[idx];
      const int min_level = *std::min_element(r.level.begin(), r.level.end());
      std::vector<std::size_t> dims;
      for (std::size_t i = 0; i < dim; ++i) {
        if (r.level[i] == min_level) dims.push_back(i);
      }
      const int needed = static_cast<int>(2 * dims.size());
      if (planned + needed > options.budget) break;
      planned += needed;
      const double delta = std::pow(3.0, -(min_level + 1));
      plans.push_back(Plan{idx, dims, points.size()});
      for (std::size_t d : dims) {
        std::vector<double> plus = r.center;
        std::vector<double> minus = r.center;
        plus[d] += delta;
        minus[d] -= delta;
        points.push_back(std::move(plus));
        points.push_back(std::move(minus));
      }
    }
    if (plans.empty()) break;

    std::vector<double> values(points.size());
    parallel_for(points.size(), options.threads, [&](std::size_t i) { values[i] = safe_eval(f, points[i]); });
    for (std::size_t i = 0; i < points.size(); ++i) record(points[i], values[i]);

    for (const Plan& plan : plans) {
      std::vector<std::size_t> order(plan.dims.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      auto side_best = [&](std::size_t k) {
        return std::min(values[plan.first_point + 2 * k], values[plan.first_point + 2 * k + 1]);
      };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return side_best(a) < side_best(b); });
      for (std::size_t k : order) {
        const std::size_t d = plan.dims[k];
        rects[plan.rect].level[d] += 1;
        const std::vector<int> child_level = rects[plan.rect].level;
        rects.push_back(Rect{points[plan.first_point + 2 * k], child_level, values[plan.first_point + 2 * k]});
        rects.push_back(Rect{points[plan.first_point + 2 * k + 1], child_level, values[plan.first_point + 2 * k + 1]});
      }
    }
    ++result.iterations;
  }
  return result;
}

}  // namespace mdt
