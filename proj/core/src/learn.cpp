#include "mdt/learn.hpp"

#include "mdt/direct.hpp"
#include "mdt/parallel.hpp"
#include "mdt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

namespace mdt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> softmax_row(const Matrix& logits, Index row) {
  const double m = logits.row(row).maxCoeff();
  std::vector<double> w(static_cast<std::size_t>(logits.cols()));
  double sum = 0.0;
  for (Index s = 0; s < logits.cols(); ++s) {
    w[static_cast<std::size_t>(s)] = std::exp(logits(row, s) - m);
    sum += w[static_cast<std::size_t>(s)];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<double> resolve_lambdas(std::span<const double> lambdas, std::size_t views) {
  if (lambdas.empty()) return std::vector<double>(views, 1.0 / static_cast<double>(views));
  return {lambdas.begin(), lambdas.end()};
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Rand: return "rand";
    case Strategy::CvxRand: return "cvx_rand";
    case Strategy::Beam: return "beam";
    case Strategy::Direct: return "direct";
    case Strategy::Contrastive: return "contrastive";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "rand") return Strategy::Rand;
  if (n == "cvx_rand") return Strategy::CvxRand;
  if (n == "beam") return Strategy::Beam;
  if (n == "direct") return Strategy::Direct;
  if (n == "contrastive") return Strategy::Contrastive;
  throw Error("unknown strategy '" + name + "' (expected rand, cvx_rand, beam, direct, contrastive)");
}

void SearchConfig::validate() const {
  if (budget < 1) throw Error("search budget must be >= 1");
  if (beam_width < 1) throw Error("beam width must be >= 1");
  if (t && *t < 1) throw Error("trajectory length t must be >= 1");
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (t_max < 3) throw Error("t_max must be >= 3");
}

SearchConfig SearchConfig::from_json(const nlohmann::json& j) {
  SearchConfig c;
  if (j.contains("strategy")) c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  if (j.contains("t") && !j.at("t").is_null()) c.t = j.at("t").get<int>();
  if (j.contains("beam_width")) c.beam_width = j.at("beam_width").get<int>();
  if (j.contains("budget")) c.budget = j.at("budget").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
  if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
  if (j.contains("t_max")) c.t_max = j.at("t_max").get<int>();
  if (j.contains("set")) c.set = SetConfig::from_json(j.at("set"));
  if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
  c.validate();
  return c;
}

nlohmann::json SearchConfig::to_json() const {
  return nlohmann::json{{"strategy", to_string(strategy)},
                        {"t", t ? nlohmann::json(*t) : nlohmann::json(nullptr)},
                        {"beam_width", beam_width},
                        {"budget", budget},
                        {"seed", seed},
                        {"learning_rate", learning_rate},
                        {"iterations", iterations},
                        {"t_max", t_max},
                        {"set", set.to_json()},
                        {"lambdas", lambdas}};
}

nlohmann::json SearchResult::to_json() const {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& e : trace) tr.push_back({{"trajectory", e.trajectory.to_json()}, {"score", num(e.score)}});
  return nlohmann::json{{"trajectory", trajectory.to_json()},
                        {"score", num(score)},
                        {"evaluations", evaluations},
                        {"trace", tr},
                        {"warnings", warnings}};
}

std::uint64_t q_ch_seed(std::uint64_t seed) { return derive_seed(seed, "q_ch"); }

Trajectory sample_random_trajectory(std::size_t set_size, std::span<const double> mu, int t, std::uint64_t seed) {
  if (set_size == 0) throw Error("operator set is empty");
  if (t < 1) throw Error("trajectory length t must be >= 1");
  std::vector<double> probs = mu.empty() ? uniform_distribution(set_size) : std::vector<double>(mu.begin(), mu.end());
  if (probs.size() != set_size) throw Error("mu must have one entry per operator");
  SimplexWeights check(probs);  // validates mu
  std::vector<double> cumulative(set_size);
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());

  Rng rng = make_rng(seed, "random-trajectory");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> steps;
  for (int s = 0; s < t; ++s) {
    const double u = unif(rng) * cumulative.back();
    std::size_t idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    idx = std::min(idx, set_size - 1);
    while (probs[idx] == 0.0 && idx > 0) --idx;  // never land on a zero-mass atom
    steps.push_back(idx);
  }
  return Trajectory::discrete(std::move(steps));
}

Trajectory sample_random_convex_trajectory(std::size_t set_size, int t, std::uint64_t seed) {
  if (set_size == 0) throw Error("operator set is empty");
  if (t < 1) throw Error("trajectory length t must be >= 1");
  Rng rng = make_rng(seed, "random-convex-trajectory");
  std::exponential_distribution<double> expo(1.0);
  std::vector<SimplexWeights> steps;
  for (int s = 0; s < t; ++s) {
    std::vector<double> w(set_size);
    double sum = 0.0;
    for (double& x : w) {
      x = expo(rng);
      sum += x;
    }
    for (double& x : w) x /= sum;
    steps.emplace_back(std::move(w));
  }
  return Trajectory::convex(std::move(steps));
}

SearchResult beam_search(std::size_t set_size, const TrajectoryObjective& objective, int depth_max, int width,
                         int budget, std::size_t threads) {
  if (set_size == 0) throw Error("operator set is empty");
  if (depth_max < 1) throw Error("beam search depth must be >= 1");
  if (width < 1) throw Error("beam width must be >= 1");
  if (budget < 1) throw Error("search budget must be >= 1");

  SearchResult result{Trajectory::discrete({0}), -std::numeric_limits<double>::infinity(), 0, {}, {}};
  bool found = false;
  std::unordered_map<std::string, double> cache;
  std::vector<std::vector<std::size_t>> beams{{}};

  for (int depth = 1; depth <= depth_max; ++depth) {
    std::vector<std::vector<std::size_t>> children;
    for (const auto& b : beams) {
      for (std::size_t p = 0; p < set_size; ++p) {
        auto c = b;
        c.push_back(p);
        children.push_back(std::move(c));
      }
    }

    // Evaluate cache misses in order until the budget runs out.
    std::vector<std::size_t> pending;
    std::vector<std::string> keys(children.size());
    bool truncated = false;
    for (std::size_t i = 0; i < children.size(); ++i) {
      keys[i] = Trajectory::discrete(children[i]).key();
      if (cache.contains(keys[i])) continue;
      if (result.evaluations + static_cast<int>(pending.size()) >= budget) {
        truncated = true;
        break;
      }
      pending.push_back(i);
    }
    std::vector<double> values(pending.size(), kNaN);
    std::vector<std::string> errors(pending.size());
    parallel_for(pending.size(), threads, [&](std::size_t i) {
      try {
        values[i] = objective(Trajectory::discrete(children[pending[i]]));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto traj = Trajectory::discrete(children[pending[i]]);
      ++result.evaluations;
      if (!std::isfinite(values[i])) {
        result.warnings.push_back("candidate " + traj.key() + " discarded: " +
                                  (errors[i].empty() ? std::string("non-finite objective") : errors[i]));
        values[i] = kNaN;
      }
      cache[keys[pending[i]]] = values[i];
      result.trace.push_back({traj, values[i]});
    }

    // Rank the scored children of this depth; unevaluated or failed ones drop out.
    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < children.size(); ++i) {
      auto it = cache.find(keys[i]);
      if (it != cache.end() && !std::isnan(it->second)) ranked.push_back(i);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) { return cache[keys[a]] > cache[keys[b]]; });
    std::vector<std::vector<std::size_t>> next;
    for (std::size_t r = 0; r < ranked.size() && static_cast<int>(next.size()) < width; ++r) {
      next.push_back(children[ranked[r]]);
    }
    if (!ranked.empty()) {
      const double best = cache[keys[ranked.front()]];
      if (!found || best > result.score) {
        result.score = best;
        result.trajectory = Trajectory::discrete(children[ranked.front()]);
        found = true;
      }
    }
    beams = std::move(next);
    if (truncated || beams.empty()) break;
  }
  if (!found) throw Error("beam search: every candidate failed to evaluate");
  return result;
}

SimplexWeights stick_breaking(std::span<const double> box) {
  std::vector<double> w;
  double remaining = 1.0;
  for (double x : box) {
    const double a = remaining * std::clamp(x, 0.0, 1.0);
    w.push_back(a);
    remaining -= a;
  }
  w.push_back(std::max(remaining, 0.0));
  return SimplexWeights(std::move(w));
}

Trajectory box_to_trajectory(std::span<const double> box, std::size_t set_size, int t) {
  const std::size_t per_step = set_size - 1;
  if (box.size() != per_step * static_cast<std::size_t>(t)) throw Error("box dimension does not match t (S - 1)");
  std::vector<SimplexWeights> steps;
  for (int s = 0; s < t; ++s) steps.push_back(stick_breaking(box.subspan(static_cast<std::size_t>(s) * per_step, per_step)));
  return Trajectory::convex(std::move(steps));
}

SearchResult direct_optimize(std::size_t set_size, int t, const TrajectoryObjective& objective, int budget,
                             std::size_t threads) {
  if (set_size == 0) throw Error("operator set is empty");
  if (t < 1) throw Error("trajectory length t must be >= 1");
  if (budget < 1) throw Error("search budget must be >= 1");
  const std::size_t dim = static_cast<std::size_t>(t) * (set_size - 1);

  std::vector<std::string> errors;
  const BoxObjective f = [&](std::span<const double> x) { return -objective(box_to_trajectory(x, set_size, t)); };
  DirectOptions options;
  options.budget = budget;
  options.threads = threads;
  const DirectResult dr = direct_minimize(dim, f, options);

  SearchResult result{box_to_trajectory(dr.best_x, set_size, t), -dr.best_value, dr.evaluations, {}, {}};
  for (const auto& [x, v] : dr.trace) {
    const double score = std::isfinite(v) ? -v : kNaN;
    result.trace.push_back({box_to_trajectory(x, set_size, t), score});
    if (!std::isfinite(v)) result.warnings.push_back("candidate " + result.trace.back().trajectory.key() + " discarded: objective failed");
  }
  if (!std::isfinite(dr.best_value)) throw Error("DIRECT: every candidate failed to evaluate");
  return result;
}

Trajectory logits_to_trajectory(const Matrix& logits) {
  std::vector<SimplexWeights> steps;
  for (Index k = 0; k < logits.rows(); ++k) steps.emplace_back(softmax_row(logits, k));
  return Trajectory::convex(std::move(steps));
}

double contrastive_objective(const OperatorSet& set, const Matrix& logits, const NeighborSets& neigh,
                             std::span<const double> lambdas, Matrix* grad) {
  const Index t = logits.rows();
  const Index s_count = logits.cols();
  if (t < 1 || static_cast<std::size_t>(s_count) != set.size()) throw Error("logits must be t x |set|");
  const Index n = set.dim();

  std::vector<std::vector<double>> weights;
  std::vector<Matrix> steps;
  std::vector<Matrix> partial{Matrix::Identity(n, n)};  // partial[k] = W_k ... W_1
  for (Index k = 0; k < t; ++k) {
    weights.push_back(softmax_row(logits, k));
    steps.push_back(convex_combine_matrix(set, weights.back()));
    partial.push_back(steps.back() * partial.back());
  }
  const Matrix& w = partial.back();
  const double loss = contrastive_loss(w, neigh, lambdas);
  if (grad == nullptr) return loss;

  grad->setZero(t, s_count);
  Matrix back = contrastive_loss_gradient(w, neigh, lambdas);  // d loss / d (W_t ... W_{k+1} W_k ... W_1)
  for (Index k = t - 1; k >= 0; --k) {
    const Matrix d_step = back * partial[static_cast<std::size_t>(k)].transpose();
    std::vector<double> g(static_cast<std::size_t>(s_count));
    double mean = 0.0;
    for (Index s = 0; s < s_count; ++s) {
      g[static_cast<std::size_t>(s)] = d_step.cwiseProduct(set[static_cast<std::size_t>(s)].values()).sum();
      mean += weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] * g[static_cast<std::size_t>(s)];
    }
    for (Index s = 0; s < s_count; ++s) {
      const double a = weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
      (*grad)(k, s) = a * (g[static_cast<std::size_t>(s)] - mean);
    }
    if (k > 0) back = steps[static_cast<std::size_t>(k)].transpose() * back;
  }
  return loss;
}

SearchResult adam_optimize_contrastive(const OperatorSet& set, int t, const NeighborSets& neigh,
                                       std::span<const double> lambdas, double learning_rate, int iterations,
                                       std::uint64_t seed) {
  if (t < 1) throw Error("trajectory length t must be >= 1");
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  const std::vector<double> lam = resolve_lambdas(lambdas, neigh.view_count());
  const Index s_count = static_cast<Index>(set.size());

  Rng rng = make_rng(seed, "adam-init");
  std::normal_distribution<double> jitter(0.0, 0.01);
  Matrix theta(t, s_count);
  for (Index k = 0; k < t; ++k) {
    for (Index s = 0; s < s_count; ++s) theta(k, s) = jitter(rng);
  }

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  constexpr int kMaxRestarts = 3;
  Matrix m = Matrix::Zero(t, s_count);
  Matrix v = Matrix::Zero(t, s_count);
  Matrix last_finite = theta;
  Matrix best_theta = theta;
  double best_loss = std::numeric_limits<double>::infinity();
  double lr = learning_rate;
  int restarts = 0;
  int step = 0;

  SearchResult result{logits_to_trajectory(theta), 0.0, 0, {}, {}};
  Matrix grad;
  for (int it = 0; it < iterations; ++it) {
    const double loss = contrastive_objective(set, theta, neigh, lam, &grad);
    ++result.evaluations;
    if (!std::isfinite(loss) || !grad.allFinite()) {
      if (++restarts > kMaxRestarts) throw Error("contrastive optimization diverged after 3 restarts");
      lr *= 0.5;
      theta = last_finite;
      m.setZero();
      v.setZero();
      step = 0;
      result.warnings.push_back("non-finite loss; learning rate halved to " + std::to_string(lr));
      continue;
    }
    result.trace.push_back({logits_to_trajectory(theta), loss});
    last_finite = theta;
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = theta;
    }
    ++step;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, step);
    const double c2 = 1.0 - std::pow(beta2, step);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
  if (!std::isfinite(best_loss)) throw Error("contrastive optimization produced no finite loss");
  result.trajectory = logits_to_trajectory(best_theta);
  // Report the loss of the returned trajectory as composed from its weights.
  result.score = contrastive_loss(compose(set, result.trajectory).matrix, neigh, lam);
  return result;
}

VariantResult run_variant(const MultiViewDataset& data, const ViewOperators& ops, const SearchConfig& config, int k,
                          Index l) {
  config.validate();
  const OperatorSet set = enrich_set(ops.operators, config.set);
  VariantResult out{};
  int t = 0;
  if (config.t) {
    t = *config.t;
  } else {
    t = entropy_curve(set, {}, config.t_max).elbow;
    out.t_from_elbow = true;
  }

  const std::uint64_t qseed = q_ch_seed(config.seed);
  const TrajectoryObjective q = [&](const Trajectory& tau) { return q_ch(tau, data, set, k, {}, qseed); };

  switch (config.strategy) {
    case Strategy::Rand:
      out.search.trajectory = sample_random_trajectory(set.size(), {}, t, config.seed);
      out.search.score = kNaN;
      break;
    case Strategy::CvxRand:
      out.search.trajectory = sample_random_convex_trajectory(set.size(), t, config.seed);
      out.search.score = kNaN;
      break;
    case Strategy::Beam: {
      // Without an explicit horizon the depth limit is twice the elbow.
      const int depth = config.t ? t : 2 * t;
      out.search = beam_search(set.size(), q, depth, config.beam_width, config.budget, config.threads);
      t = depth;
      break;
    }
    case Strategy::Direct:
      out.search = direct_optimize(set.size(), t, q, config.budget, config.threads);
      break;
    case Strategy::Contrastive: {
      const NeighborSets neigh = neighbor_sets(ops.kernels);
      const int iters = std::min(config.iterations, config.budget);
      out.search = adam_optimize_contrastive(set, t, neigh, config.lambdas, config.learning_rate, iters, config.seed);
      break;
    }
  }
  out.resolved_t = t;
  out.map = diffusion_map(compose(set, out.search.trajectory), l);
  out.map.source = out.search.trajectory;
  return out;
}

}  // namespace mdt
