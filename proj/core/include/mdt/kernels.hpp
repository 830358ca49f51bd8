#pragma once

#include "mdt/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdt {

/// One view of the data: N points in R^d, rows are datapoints.
class ViewDataset {
 public:
  ViewDataset(Matrix points, int view_id = 0);

  const Matrix& points() const { return points_; }
  int view_id() const { return view_id_; }
  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }

 private:
  Matrix points_;
  int view_id_;
};

/// Views sharing the same N datapoints in the same order, with optional
/// ground-truth labels and optional latent coordinates from a generator.
class MultiViewDataset {
 public:
  explicit MultiViewDataset(std::vector<ViewDataset> views,
                            std::optional<std::vector<int>> labels = std::nullopt,
                            Matrix latent = {});

  const std::vector<ViewDataset>& views() const { return views_; }
  const ViewDataset& view(std::size_t v) const { return views_.at(v); }
  std::size_t view_count() const { return views_.size(); }
  Index size() const { return views_.front().size(); }

  const std::optional<std::vector<int>>& labels() const { return labels_; }
  const Matrix& latent() const { return latent_; }

 private:
  std::vector<ViewDataset> views_;
  std::optional<std::vector<int>> labels_;
  Matrix latent_;
};

/// Symmetric nonnegative affinity matrix with a strictly positive diagonal.
class KernelMatrix {
 public:
  /// Validates the invariants; symmetry must hold exactly.
  KernelMatrix(Matrix values, double bandwidth);

  const Matrix& values() const { return values_; }
  double bandwidth() const { return bandwidth_; }
  Index size() const { return values_.rows(); }

 private:
  Matrix values_;
  double bandwidth_;
};

/// Row-stochastic matrix with entries in [0,1] and a strictly positive
/// diagonal. Irreducibility of the support graph is computed at construction
/// and exposed; it is not enforced since the identity operator is a valid
/// member of an operator set.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index size() const { return values_.rows(); }
  bool irreducible() const { return irreducible_; }

 private:
  Matrix values_;
  bool irreducible_ = false;
};

/// True if the directed graph with an edge i->j whenever m(i,j) > 0 is
/// strongly connected.
bool strongly_connected(const Matrix& m);

/// Throws unless `m` is square, row-stochastic within `tol`, has entries in
/// [0,1] and a strictly positive diagonal.
void check_stochastic(const Matrix& m, double tol = kStochasticTol);

double maxmin_bandwidth(const ViewDataset& x);

KernelMatrix gaussian_kernel(const ViewDataset& x, std::optional<double> sigma = std::nullopt);

/// Keeps the k_nn largest off-diagonal entries per row plus the diagonal,
/// then symmetrizes by element-wise maximum with the transpose. Ties go to
/// the lower column index.
KernelMatrix knn_sparsify(const KernelMatrix& k, int k_nn);

/// ceil(ln N), clamped to [1, N-1].
int default_knn(Index n);

TransitionMatrix row_normalize(const KernelMatrix& k);

struct CanonicalConfig {
  std::optional<int> k_nn;
  std::vector<std::optional<double>> sigma_per_view;
  std::size_t threads = 1;
};

/// Per-view kernels (after sparsification) and their diffusion operators.
struct ViewOperators {
  std::vector<KernelMatrix> kernels;
  std::vector<TransitionMatrix> operators;
  std::vector<std::string> warnings;
};

/// Blend weight of the uniform teleport used to repair a disconnected view.
inline constexpr double kTeleportWeight = 0.01;

/// gaussian_kernel -> knn_sparsify -> row_normalize for each view. A view whose
/// graph is disconnected is repaired with a uniform teleport floor and a
/// warning naming it is recorded.
ViewOperators build_canonical_set(const MultiViewDataset& data, const CanonicalConfig& config = {});

/// Same pipeline starting from precomputed kernels (e.g. several kernels on one
/// point cloud).
ViewOperators operators_from_kernels(std::vector<KernelMatrix> kernels, std::optional<int> k_nn);

}  // namespace mdt
