#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"
#include "mdt/operator_space.hpp"
#include "mdt/quality.hpp"
#include "mdt/time_select.hpp"
#include "mdt/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdt {

enum class Strategy { Rand, CvxRand, Beam, Direct, Contrastive };

std::string to_string(Strategy s);
/// Accepts "rand", "cvx_rand", "beam", "direct", "contrastive" ('-' or '_').
Strategy strategy_from_string(const std::string& name);

struct SearchConfig {
  Strategy strategy = Strategy::Rand;
  std::optional<int> t;        // horizon; beam: maximum depth. Elbow when unset.
  int beam_width = 5;
  int budget = 100;            // objective evaluations
  std::uint64_t seed = 0;
  double learning_rate = 0.05;
  int iterations = 200;
  std::size_t threads = 1;
  int t_max = kDefaultTMax;
  SetConfig set;
  /// Contrastive view weights; empty means 1/V.
  std::vector<double> lambdas;

  void validate() const;
  static SearchConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TraceEntry {
  Trajectory trajectory;
  double score;
};

/// Outcome of a search. `score` is the objective of `trajectory`: Q_CH
/// (higher is better) for beam and direct, the contrastive loss (lower is
/// better) for contrastive, and NaN for the random strategies, which do not
/// evaluate any objective.
struct SearchResult {
  Trajectory trajectory = Trajectory::discrete({0});
  double score = 0.0;
  int evaluations = 0;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// k-means seed used by Q_CH inside searches started with `seed`.
std::uint64_t q_ch_seed(std::uint64_t seed);

/// Maximized. May throw; throwing candidates are discarded by the searches.
using TrajectoryObjective = std::function<double(const Trajectory&)>;

/// t i.i.d. draws from mu over [0, set_size); empty mu means uniform.
Trajectory sample_random_trajectory(std::size_t set_size, std::span<const double> mu, int t,
                                    std::uint64_t seed);

/// t independent draws from the symmetric Dirichlet(1) on the simplex.
Trajectory sample_random_convex_trajectory(std::size_t set_size, int t, std::uint64_t seed);

/// Beam search over discrete trajectories of length 1..depth_max. Keeps the
/// `width` best children per depth and returns the best trajectory seen at
/// any depth (ties keep the earlier one). Objective values are cached by
/// trajectory key and candidates of one depth are evaluated in parallel.
SearchResult beam_search(std::size_t set_size, const TrajectoryObjective& objective, int depth_max,
                         int width, int budget, std::size_t threads = 1);

/// Stick-breaking map from [0,1]^{S-1} to the simplex in R^S.
SimplexWeights stick_breaking(std::span<const double> box);

/// Convex trajectory of t steps decoded from a point of [0,1]^{t(S-1)}.
Trajectory box_to_trajectory(std::span<const double> box, std::size_t set_size, int t);

/// DIRECT over the stick-breaking box of convex trajectories of length t.
SearchResult direct_optimize(std::size_t set_size, int t, const TrajectoryObjective& objective, int budget,
                             std::size_t threads = 1);

/// Contrastive loss of the convex trajectory with per-step weights
/// softmax(logits.row(k)). When `grad` is given it receives d loss / d logits,
/// back-propagated through the product chain.
double contrastive_objective(const OperatorSet& set, const Matrix& logits, const NeighborSets& neigh,
                             std::span<const double> lambdas, Matrix* grad = nullptr);

/// Softmax of each row of `logits` as a convex trajectory.
Trajectory logits_to_trajectory(const Matrix& logits);

/// ADAM on the step logits. Returns the iterate with the lowest loss seen.
SearchResult adam_optimize_contrastive(const OperatorSet& set, int t, const NeighborSets& neigh,
                                       std::span<const double> lambdas, double learning_rate, int iterations,
                                       std::uint64_t seed);

struct VariantResult {
  SearchResult search;
  DiffusionMap map;
  int resolved_t = 0;
  bool t_from_elbow = false;
};

/// End-to-end: enrich the operator set, resolve t, search, compose the winner
/// and embed it in l dimensions. k is the cluster count used by Q_CH.
VariantResult run_variant(const MultiViewDataset& data, const ViewOperators& ops, const SearchConfig& config, int k,
                          Index l);

}  // namespace mdt
