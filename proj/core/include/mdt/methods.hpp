#pragma once

#include "mdt/baselines.hpp"
#include "mdt/common.hpp"
#include "mdt/kernels.hpp"
#include "mdt/learn.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mdt {

/// Names accepted by embed(): the MDT variants and the baselines.
const std::vector<std::string>& method_names();

/// One embedding method with its parameters.
///
/// JSON: {"method": "mdt-direct", "t": 4, "powers": [2, 3], "budget": 100, ...}.
/// Keys other than method/t/powers/crdiff_variant are read as SearchConfig.
struct MethodConfig {
  std::string method = "mdt-rand";
  std::optional<int> t;
  std::optional<std::vector<int>> powers;  // id only
  CrossDiffusionVariant crdiff_variant = CrossDiffusionVariant::Symmetric;
  SearchConfig search;

  bool is_mdt() const;
  /// True for the variants that draw a fresh trajectory per seed.
  bool stochastic() const;
  void validate() const;

  static MethodConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MethodEmbedding {
  Matrix embedding;         // N x l
  Vector spectrum;          // singular or eigenvalues scaling the columns
  std::optional<Trajectory> trajectory;
  std::optional<int> resolved_t;
  std::optional<SearchResult> search;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// Runs `config` on the prepared operators. `seed` overrides config.search.seed;
/// k is the cluster count used by the CH objective.
MethodEmbedding embed(const MultiViewDataset& data, const ViewOperators& ops, const MethodConfig& config, Index l,
                      int k, std::uint64_t seed, std::size_t threads = 1);

}  // namespace mdt
