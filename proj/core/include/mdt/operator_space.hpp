#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdt {

/// Describes where a member of an operator set came from.
struct OperatorTag {
  enum class Kind { View, Identity, PageRank, Smoothed };

  Kind kind = Kind::View;
  int view = -1;        // 0-based source view, -1 for the identity
  double alpha = 1.0;   // PageRank mixing weight
  int power = 1;        // smoothing power t'
  bool smoothed_mixer = false;

  /// Short label used in path strings: "P1", "I", "PR1", "S1".
  std::string label() const;
};

/// Finite, non-empty list of N x N transition matrices (the discrete set).
class OperatorSet {
 public:
  OperatorSet(std::vector<TransitionMatrix> operators, std::vector<OperatorTag> tags);

  /// Canonical set: one operator per view, tagged by view index.
  static OperatorSet canonical(std::vector<TransitionMatrix> operators);

  std::size_t size() const { return operators_.size(); }
  Index dim() const { return operators_.front().size(); }
  const TransitionMatrix& operator[](std::size_t i) const { return operators_.at(i); }
  const std::vector<TransitionMatrix>& operators() const { return operators_; }
  const OperatorTag& tag(std::size_t i) const { return tags_.at(i); }

 private:
  std::vector<TransitionMatrix> operators_;
  std::vector<OperatorTag> tags_;
};

/// Point of the probability simplex: nonnegative weights summing to one.
class SimplexWeights {
 public:
  explicit SimplexWeights(std::vector<double> weights);

  const std::vector<double>& values() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  static SimplexWeights vertex(std::size_t size, std::size_t index);
  static SimplexWeights uniform(std::size_t size);

 private:
  std::vector<double> weights_;
};

TransitionMatrix identity_operator(Index n);

/// Rank-one teleport (1/N) 11^T. Not a valid set member on its own.
Matrix uniform_operator(Index n);

/// alpha * P + (1 - alpha) * mixer, for alpha in (0, 1].
TransitionMatrix pagerank_operator(const TransitionMatrix& p, double alpha, const Matrix& mixer);

/// P^{t'} by repeated multiplication.
TransitionMatrix smoothing_operator(const TransitionMatrix& p, int t_prime);

TransitionMatrix convex_combine(const OperatorSet& set, const SimplexWeights& w);

/// Raw weighted sum without re-validating; used in inner loops.
Matrix convex_combine_matrix(const OperatorSet& set, std::span<const double> w);

struct SetConfig {
  enum class Mixer { Uniform, Smoothed };

  bool include_identity = false;
  std::optional<double> pagerank_alpha;
  std::optional<int> smoothing_power;
  /// PageRank mixer: the uniform teleport, or the view's own smoothing
  /// operator P_v^{t'} (t' = smoothing_power, default 2).
  Mixer pagerank_mixer = Mixer::Uniform;

  static SetConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

inline constexpr double kDefaultPagerankAlpha = 0.85;
inline constexpr int kDefaultSmoothingPower = 2;

/// Canonical operators, then optionally I_N, per-view PageRank operators and
/// per-view smoothing operators, in that order.
OperatorSet enrich_set(const std::vector<TransitionMatrix>& canonical, const SetConfig& config);

}  // namespace mdt
