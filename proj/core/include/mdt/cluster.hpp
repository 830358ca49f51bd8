#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"
#include "mdt/quality.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdt {

struct MethodConfig;

struct KMeansResult {
  PartitionLabels labels;
  Matrix centroids;  // k x l
  double inertia;
  int iterations;
};

inline constexpr int kDefaultKMeansInits = 10;

/// k-means++ seeding followed by Lloyd iterations until the largest centroid
/// move is below 1e-9 (at most 300 iterations). An emptied cluster takes the
/// point farthest from its centroid. Keeps the lowest-inertia run of
/// `n_init` restarts, each drawn from its own derived stream.
KMeansResult kmeans(const Matrix& e, int k, std::uint64_t seed, int n_init = kDefaultKMeansInits);

struct ClusterRunReport {
  std::string method;
  double ami_mean = 0.0;
  double ami_std = 0.0;       // population standard deviation over runs
  std::vector<double> ch_per_view;  // mean over runs
  int runs = 0;
  std::optional<int> resolved_t;
  std::uint64_t seed_base = 0;
  std::vector<double> run_ami;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Embeds with l = k and clusters `runs` times with seeds seed_base + r.
/// Deterministic methods embed once; stochastic MDT variants draw a new
/// trajectory per run. Runs may execute in parallel with identical results.
ClusterRunReport cluster_pipeline(const MultiViewDataset& data, const ViewOperators& ops, const MethodConfig& method,
                                  int k, int runs, std::uint64_t seed_base, std::size_t threads = 1);

}  // namespace mdt
