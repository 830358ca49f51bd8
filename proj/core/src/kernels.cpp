#include "mdt/kernels.hpp"

#include "mdt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdt {
namespace {

void validate_labels_and_latent(const std::optional<std::vector<int>>& labels,
                                const Matrix& latent, Index n) {
  if (labels && static_cast<Index>(labels->size()) != n) {
    throw Error("labels have length " + std::to_string(labels->size()) + ", expected " +
                std::to_string(n));
  }
  if (latent.size() != 0 && latent.rows() != n) {
    throw Error("latent coordinates have " + std::to_string(latent.rows()) + " rows, expected " +
                std::to_string(n));
  }
}

std::vector<bool> reachable(const Matrix& m, bool transpose) {
  const Index n = m.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      const double w = transpose ? m(j, i) : m(i, j);
      if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

Matrix normalize_rows(const Matrix& k) {
  const Vector degree = k.rowwise().sum();
  Matrix p = k;
  for (Index i = 0; i < p.rows(); ++i) p.row(i) /= degree(i);
  return p;
}

Matrix pairwise_sq_distances(const Matrix& x) {
  const Index n = x.rows();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

TransitionMatrix normalize_with_repair(const KernelMatrix& k, int view, std::vector<std::string>& warnings) {
  Matrix p = normalize_rows(k.values());
  if (!strongly_connected(p)) {
    const double n = static_cast<double>(p.rows());
    p = (1.0 - kTeleportWeight) * p + Matrix::Constant(p.rows(), p.cols(), kTeleportWeight / n);
    warnings.push_back("view " + std::to_string(view) +
                       ": kernel graph is disconnected; applied uniform teleport floor " +
                       std::to_string(kTeleportWeight));
  }
  return TransitionMatrix(std::move(p));
}

}  // namespace

ViewDataset::ViewDataset(Matrix points, int view_id) : points_(std::move(points)), view_id_(view_id) {
  if (points_.rows() < 2) throw Error("view " + std::to_string(view_id_) + ": need at least 2 points");
  if (points_.cols() < 1) throw Error("view " + std::to_string(view_id_) + ": need at least 1 feature");
  if (!points_.allFinite()) throw Error("view " + std::to_string(view_id_) + ": non-finite entries");
}

MultiViewDataset::MultiViewDataset(std::vector<ViewDataset> views,
                                   std::optional<std::vector<int>> labels, Matrix latent)
    : views_(std::move(views)), labels_(std::move(labels)), latent_(std::move(latent)) {
  if (views_.empty()) throw Error("a multi-view dataset needs at least one view");
  const Index n = views_.front().size();
  for (const auto& v : views_) {
    if (v.size() != n) {
      throw Error("view " + std::to_string(v.view_id()) + " has " + std::to_string(v.size()) +
                  " points, expected " + std::to_string(n));
    }
  }
  validate_labels_and_latent(labels_, latent_, n);
}

KernelMatrix::KernelMatrix(Matrix values, double bandwidth)
    : values_(std::move(values)), bandwidth_(bandwidth) {
  if (values_.rows() != values_.cols()) throw Error("kernel matrix must be square");
  if (!(bandwidth_ > 0.0)) throw Error("kernel bandwidth must be positive");
  if (!values_.allFinite()) throw Error("kernel matrix has non-finite entries");
  for (Index i = 0; i < values_.rows(); ++i) {
    if (!(values_(i, i) > 0.0)) throw Error("kernel diagonal must be strictly positive");
    for (Index j = 0; j < values_.cols(); ++j) {
      if (values_(i, j) < 0.0) throw Error("kernel entries must be nonnegative");
      if (values_(i, j) != values_(j, i)) throw Error("kernel matrix must be exactly symmetric");
    }
  }
}

void check_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error("transition matrix must be square and non-empty");
  if (!m.allFinite()) throw Error("transition matrix has non-finite entries");
  for (Index i = 0; i < m.rows(); ++i) {
    const double s = m.row(i).sum();
    if (std::abs(s - 1.0) > tol) {
      throw Error("row " + std::to_string(i) + " sums to " + std::to_string(s) + ", not 1");
    }
    if (!(m(i, i) > 0.0)) throw Error("transition matrix diagonal must be strictly positive");
    if (m.row(i).minCoeff() < 0.0 || m.row(i).maxCoeff() > 1.0 + tol) {
      throw Error("transition matrix entries must lie in [0,1]");
    }
  }
}

TransitionMatrix::TransitionMatrix(Matrix values) : values_(std::move(values)) {
  check_stochastic(values_);
  irreducible_ = strongly_connected(values_);
}

bool strongly_connected(const Matrix& m) {
  if (m.rows() <= 1) return true;
  const auto fwd = reachable(m, false);
  const auto bwd = reachable(m, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

double maxmin_bandwidth(const ViewDataset& x) {
  const Matrix d2 = pairwise_sq_distances(x.points());
  const Index n = d2.rows();
  double sigma = 0.0;
  for (Index j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (i != j && d2(i, j) > 0.0) nearest = std::min(nearest, d2(i, j));
    }
    // Points with only duplicates around them contribute nothing.
    if (std::isfinite(nearest)) sigma = std::max(sigma, std::sqrt(nearest));
  }
  if (!(sigma > 0.0)) throw Error("degenerate bandwidth: all pairwise distances are zero");
  return sigma;
}

KernelMatrix gaussian_kernel(const ViewDataset& x, std::optional<double> sigma) {
  const double s = sigma ? *sigma : maxmin_bandwidth(x);
  if (!(s > 0.0) || !std::isfinite(s)) throw Error("kernel bandwidth must be positive and finite");
  const Matrix d2 = pairwise_sq_distances(x.points());
  const double scale = 1.0 / (2.0 * s * s);
  Matrix k(d2.rows(), d2.cols());
  for (Index i = 0; i < k.rows(); ++i) {
    k(i, i) = 1.0;
    for (Index j = i + 1; j < k.cols(); ++j) {
      const double v = std::exp(-d2(i, j) * scale);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return KernelMatrix(std::move(k), s);
}

KernelMatrix knn_sparsify(const KernelMatrix& k, int k_nn) {
  const Index n = k.size();
  if (k_nn < 1 || k_nn > n - 1) {
    throw Error("k_nn must lie in [1, N-1], got " + std::to_string(k_nn));
  }
  const Matrix& values = k.values();
  Matrix kept = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) order[pos++] = j;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values(i, a) > values(i, b); });
    kept(i, i) = values(i, i);
    for (int r = 0; r < k_nn; ++r) {
      const Index j = order[static_cast<std::size_t>(r)];
      kept(i, j) = values(i, j);
    }
  }
  Matrix sym = kept.cwiseMax(kept.transpose());
  return KernelMatrix(std::move(sym), k.bandwidth());
}

int default_knn(Index n) {
  const int k = static_cast<int>(std::ceil(std::log(static_cast<double>(n))));
  return std::clamp(k, 1, static_cast<int>(std::max<Index>(n - 1, 1)));
}

TransitionMatrix row_normalize(const KernelMatrix& k) { return TransitionMatrix(normalize_rows(k.values())); }

ViewOperators build_canonical_set(const MultiViewDataset& data, const CanonicalConfig& config) {
  const std::size_t v_count = data.view_count();
  if (!config.sigma_per_view.empty() && config.sigma_per_view.size() != v_count) {
    throw Error("sigma_per_view has " + std::to_string(config.sigma_per_view.size()) +
                " entries for " + std::to_string(v_count) + " views");
  }
  const int k_nn = config.k_nn ? *config.k_nn : default_knn(data.size());

  std::vector<std::optional<KernelMatrix>> kernels(v_count);
  std::vector<std::optional<TransitionMatrix>> ops(v_count);
  std::vector<std::vector<std::string>> warnings(v_count);
  parallel_for(v_count, config.threads, [&](std::size_t v) {
    const auto& view = data.view(v);
    try {
      const auto sigma = config.sigma_per_view.empty() ? std::nullopt : config.sigma_per_view[v];
      KernelMatrix sparse = knn_sparsify(gaussian_kernel(view, sigma), k_nn);
      ops[v] = normalize_with_repair(sparse, view.view_id(), warnings[v]);
      kernels[v] = std::move(sparse);
    } catch (const Error& e) {
      throw Error("view " + std::to_string(view.view_id()) + ": " + e.what());
    }
  });

  ViewOperators out;
  for (std::size_t v = 0; v < v_count; ++v) {
    out.kernels.push_back(std::move(*kernels[v]));
    out.operators.push_back(std::move(*ops[v]));
    for (auto& w : warnings[v]) out.warnings.push_back(std::move(w));
  }
  return out;
}

ViewOperators operators_from_kernels(std::vector<KernelMatrix> kernels, std::optional<int> k_nn) {
  if (kernels.empty()) throw Error("need at least one kernel");
  const Index n = kernels.front().size();
  const int k = k_nn ? *k_nn : default_knn(n);
  ViewOperators out;
  for (std::size_t v = 0; v < kernels.size(); ++v) {
    if (kernels[v].size() != n) throw Error("kernel " + std::to_string(v + 1) + " has mismatched size");
    KernelMatrix sparse = knn_sparsify(kernels[v], k);
    out.operators.push_back(normalize_with_repair(sparse, static_cast<int>(v + 1), out.warnings));
    out.kernels.push_back(std::move(sparse));
  }
  return out;
}

}  // namespace mdt
