#include "mdt/operator_space.hpp"

#include <cmath>
#include <numeric>

namespace mdt {

std::string OperatorTag::label() const {
  switch (kind) {
    case Kind::View: return "P" + std::to_string(view + 1);
    case Kind::Identity: return "I";
    case Kind::PageRank: return "PR" + std::to_string(view + 1);
    case Kind::Smoothed: return "S" + std::to_string(view + 1);
  }
  return "?";
}

OperatorSet::OperatorSet(std::vector<TransitionMatrix> operators, std::vector<OperatorTag> tags)
    : operators_(std::move(operators)), tags_(std::move(tags)) {
  if (operators_.empty()) throw Error("operator set must be non-empty");
  if (tags_.size() != operators_.size()) throw Error("operator set needs one tag per operator");
  const Index n = operators_.front().size();
  for (const auto& op : operators_) {
    if (op.size() != n) throw Error("all operators in a set must share the same N");
  }
}

OperatorSet OperatorSet::canonical(std::vector<TransitionMatrix> operators) {
  std::vector<OperatorTag> tags;
  for (std::size_t v = 0; v < operators.size(); ++v) {
    tags.push_back(OperatorTag{OperatorTag::Kind::View, static_cast<int>(v)});
  }
  return OperatorSet(std::move(operators), std::move(tags));
}

SimplexWeights::SimplexWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error("simplex weights must be non-empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("simplex weights must be finite and nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    throw Error("simplex weights sum to " + std::to_string(sum) + ", not 1");
  }
}

SimplexWeights SimplexWeights::vertex(std::size_t size, std::size_t index) {
  std::vector<double> w(size, 0.0);
  w.at(index) = 1.0;
  return SimplexWeights(std::move(w));
}

SimplexWeights SimplexWeights::uniform(std::size_t size) {
  return SimplexWeights(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

TransitionMatrix identity_operator(Index n) {
  if (n < 1) throw Error("identity operator needs N >= 1");
  return TransitionMatrix(Matrix::Identity(n, n));
}

Matrix uniform_operator(Index n) {
  if (n < 1) throw Error("uniform operator needs N >= 1");
  return Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

TransitionMatrix pagerank_operator(const TransitionMatrix& p, double alpha, const Matrix& mixer) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("PageRank alpha must lie in (0, 1]");
  if (mixer.rows() != p.size() || mixer.cols() != p.size()) throw Error("PageRank mixer has wrong shape");
  for (Index i = 0; i < mixer.rows(); ++i) {
    if (std::abs(mixer.row(i).sum() - 1.0) > kStochasticTol || mixer.row(i).minCoeff() < 0.0) {
      throw Error("PageRank mixer must be row-stochastic");
    }
  }
  if (alpha == 1.0) return p;
  return TransitionMatrix(alpha * p.values() + (1.0 - alpha) * mixer);
}

TransitionMatrix smoothing_operator(const TransitionMatrix& p, int t_prime) {
  if (t_prime < 1) throw Error("smoothing power must be >= 1");
  Matrix acc = p.values();
  for (int i = 1; i < t_prime; ++i) acc = p.values() * acc;
  return TransitionMatrix(std::move(acc));
}

Matrix convex_combine_matrix(const OperatorSet& set, std::span<const double> w) {
  if (w.size() != set.size()) {
    throw Error("weight vector has " + std::to_string(w.size()) + " entries for a set of " +
                std::to_string(set.size()));
  }
  Matrix out = Matrix::Zero(set.dim(), set.dim());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) out.noalias() += w[i] * set[i].values();
  }
  return out;
}

TransitionMatrix convex_combine(const OperatorSet& set, const SimplexWeights& w) {
  // A vertex returns the member itself, bit for bit.
  for (std::size_t i = 0; i < w.size() && w.size() == set.size(); ++i) {
    if (w[i] == 1.0) return set[i];
  }
  return TransitionMatrix(convex_combine_matrix(set, w.values()));
}

SetConfig SetConfig::from_json(const nlohmann::json& j) {
  SetConfig c;
  if (j.contains("include_identity")) c.include_identity = j.at("include_identity").get<bool>();
  if (j.contains("pagerank_alpha") && !j.at("pagerank_alpha").is_null()) {
    c.pagerank_alpha = j.at("pagerank_alpha").get<double>();
  }
  if (j.contains("smoothing_power") && !j.at("smoothing_power").is_null()) {
    c.smoothing_power = j.at("smoothing_power").get<int>();
  }
  if (j.contains("pagerank_mixer")) {
    const auto m = j.at("pagerank_mixer").get<std::string>();
    if (m == "uniform") {
      c.pagerank_mixer = Mixer::Uniform;
    } else if (m == "smoothed") {
      c.pagerank_mixer = Mixer::Smoothed;
    } else {
      throw Error("pagerank_mixer must be 'uniform' or 'smoothed'");
    }
  }
  return c;
}

nlohmann::json SetConfig::to_json() const {
  nlohmann::json j;
  j["include_identity"] = include_identity;
  j["pagerank_alpha"] = pagerank_alpha ? nlohmann::json(*pagerank_alpha) : nlohmann::json(nullptr);
  j["smoothing_power"] = smoothing_power ? nlohmann::json(*smoothing_power) : nlohmann::json(nullptr);
  j["pagerank_mixer"] = pagerank_mixer == Mixer::Uniform ? "uniform" : "smoothed";
  return j;
}

OperatorSet enrich_set(const std::vector<TransitionMatrix>& canonical, const SetConfig& config) {
  if (canonical.empty()) throw Error("canonical set must be non-empty");
  std::vector<TransitionMatrix> ops = canonical;
  std::vector<OperatorTag> tags;
  for (std::size_t v = 0; v < canonical.size(); ++v) {
    tags.push_back(OperatorTag{OperatorTag::Kind::View, static_cast<int>(v)});
  }
  const Index n = canonical.front().size();
  if (config.include_identity) {
    ops.push_back(identity_operator(n));
    tags.push_back(OperatorTag{OperatorTag::Kind::Identity, -1});
  }
  const int power = config.smoothing_power.value_or(kDefaultSmoothingPower);
  if (config.pagerank_alpha) {
    const Matrix uniform = uniform_operator(n);
    for (std::size_t v = 0; v < canonical.size(); ++v) {
      const bool smoothed = config.pagerank_mixer == SetConfig::Mixer::Smoothed;
      const Matrix mixer = smoothed ? smoothing_operator(canonical[v], power).values() : uniform;
      ops.push_back(pagerank_operator(canonical[v], *config.pagerank_alpha, mixer));
      OperatorTag tag{OperatorTag::Kind::PageRank, static_cast<int>(v)};
      tag.alpha = *config.pagerank_alpha;
      tag.smoothed_mixer = smoothed;
      tags.push_back(tag);
    }
  }
  if (config.smoothing_power) {
    for (std::size_t v = 0; v < canonical.size(); ++v) {
      ops.push_back(smoothing_operator(canonical[v], *config.smoothing_power));
      OperatorTag tag{OperatorTag::Kind::Smoothed, static_cast<int>(v)};
      tag.power = *config.smoothing_power;
      tags.push_back(tag);
    }
  }
  return OperatorSet(std::move(ops), std::move(tags));
}

}  // namespace mdt
