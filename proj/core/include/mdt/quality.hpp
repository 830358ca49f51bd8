#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"
#include "mdt/trajectory.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mdt {

/// Hard partition with labels in [0, k) and every cluster non-empty.
class PartitionLabels {
 public:
  PartitionLabels(std::vector<int> labels, int k);

  /// Relabels arbitrary integer labels to [0, k) in order of first appearance.
  static PartitionLabels from_raw(std::span<const int> raw);

  const std::vector<int>& labels() const { return labels_; }
  int k() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }

 private:
  std::vector<int> labels_;
  int k_;
};

/// Calinski-Harabasz index. Returns +infinity when the within-cluster
/// dispersion is zero.
double ch_index(const Matrix& x, const PartitionLabels& labels);

/// Per-view neighbor lists: neighbors[v][i] = kernel-graph neighbors of i.
struct NeighborSets {
  std::vector<std::vector<std::vector<Index>>> neighbors;

  std::size_t view_count() const { return neighbors.size(); }
};

/// Off-diagonal support of each (sparsified) kernel.
NeighborSets neighbor_sets(const std::vector<KernelMatrix>& kernels);

/// Weighted sum over views of sum_i sum_{j in N_i} -log softmax_{k != i}(W_i.)_j.
/// Lower is better.
double contrastive_loss(const Matrix& w, const NeighborSets& neigh, std::span<const double> lambdas);

/// Gradient of contrastive_loss with respect to the entries of W.
Matrix contrastive_loss_gradient(const Matrix& w, const NeighborSets& neigh,
                                 std::span<const double> lambdas);

/// Adjusted mutual information with arithmetic-mean normalization and the
/// hypergeometric expected mutual information.
double ami(const PartitionLabels& a, const PartitionLabels& b);

/// AMI of each method divided by the random-trajectory baseline AMI.
std::map<std::string, double> prr(const std::map<std::string, double>& scores, double baseline);

/// Weighted sum of per-view CH indices of the raw features under the k-means
/// partition of the trajectory's diffusion map (l = k). Empty weights mean 1/V.
double q_ch(const Trajectory& tau, const MultiViewDataset& data, const OperatorSet& operators, int k,
            std::span<const double> weights = {}, std::uint64_t kmeans_seed = 0);

struct QchEvaluation {
  double score;
  PartitionLabels partition;
};

/// Q_CH of a composed operator together with the k-means partition it used.
QchEvaluation q_ch_evaluate(const MDTOperator& w, const MultiViewDataset& data, int k,
                            std::span<const double> weights = {}, std::uint64_t kmeans_seed = 0);

/// Same objective on an already composed operator.
double q_ch_of(const MDTOperator& w, const MultiViewDataset& data, int k,
               std::span<const double> weights = {}, std::uint64_t kmeans_seed = 0);

}  // namespace mdt
