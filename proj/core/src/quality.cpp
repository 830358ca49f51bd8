#include "mdt/quality.hpp"

#include "mdt/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace mdt {
namespace {

// Per-row log-sum-exp over k != i, shifted by the row maximum.
Vector row_lse_excluding_diagonal(const Matrix& w) {
  const Index n = w.rows();
  Vector lse(n);
  for (Index i = 0; i < n; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
      if (k != i) m = std::max(m, w(i, k));
    }
    double s = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k != i) s += std::exp(w(i, k) - m);
    }
    lse(i) = m + std::log(s);
  }
  return lse;
}

void check_contrastive_inputs(const Matrix& w, const NeighborSets& neigh, std::span<const double> lambdas) {
  if (w.rows() != w.cols() || w.rows() < 2) throw Error("contrastive loss needs a square matrix with N >= 2");
  if (lambdas.size() != neigh.view_count()) {
    throw Error("contrastive loss: " + std::to_string(lambdas.size()) + " weights for " +
                std::to_string(neigh.view_count()) + " views");
  }
  for (std::size_t v = 0; v < neigh.view_count(); ++v) {
    if (lambdas[v] < 0.0) throw Error("contrastive loss weights must be nonnegative");
    if (static_cast<Index>(neigh.neighbors[v].size()) != w.rows()) {
      throw Error("neighbor sets of view " + std::to_string(v + 1) + " do not match N");
    }
    for (std::size_t i = 0; i < neigh.neighbors[v].size(); ++i) {
      if (neigh.neighbors[v][i].empty()) {
        throw Error("empty neighbor set for point " + std::to_string(i) + " in view " + std::to_string(v + 1));
      }
    }
  }
}

double entropy_of_counts(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

bool same_partition(const PartitionLabels& a, const PartitionLabels& b) {
  if (a.k() != b.k()) return false;
  std::vector<int> map_ab(static_cast<std::size_t>(a.k()), -1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    int& m = map_ab[static_cast<std::size_t>(a[i])];
    if (m == -1) m = b[i];
    if (m != b[i]) return false;
  }
  return true;
}

double expected_mutual_information(const std::vector<double>& rows, const std::vector<double>& cols, double n) {
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (double ai : rows) {
    for (double bj : cols) {
      const double lo = std::max(1.0, ai + bj - n);
      const double hi = std::min(ai, bj);
      const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) + std::lgamma(n - ai + 1.0) +
                           std::lgamma(n - bj + 1.0) - lg_n;
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double log_p = fixed - std::lgamma(nij + 1.0) - std::lgamma(ai - nij + 1.0) -
                             std::lgamma(bj - nij + 1.0) - std::lgamma(n - ai - bj + nij + 1.0);
        emi += (nij / n) * std::log(n * nij / (ai * bj)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

}  // namespace

PartitionLabels::PartitionLabels(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw Error("partition needs k >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(k_), false);
  for (int l : labels_) {
    if (l < 0 || l >= k_) throw Error("partition label " + std::to_string(l) + " outside [0, k)");
    seen[static_cast<std::size_t>(l)] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
    throw Error("partition has an empty cluster");
  }
}

PartitionLabels PartitionLabels::from_raw(std::span<const int> raw) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(raw.size());
  for (int r : raw) {
    auto [it, inserted] = remap.try_emplace(r, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  const int k = static_cast<int>(remap.size());
  return PartitionLabels(std::move(out), k);
}

double ch_index(const Matrix& x, const PartitionLabels& labels) {
  const Index n = x.rows();
  const int k = labels.k();
  if (static_cast<Index>(labels.size()) != n) throw Error("CH index: label count does not match N");
  if (k < 2 || k > n - 1) throw Error("CH index needs 2 <= k <= N-1, got k=" + std::to_string(k));

  const Eigen::RowVectorXd mean = x.colwise().mean();
  Matrix centroids = Matrix::Zero(k, x.cols());
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (Index i = 0; i < n; ++i) {
    centroids.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
  }
  double between = 0.0;
  for (int c = 0; c < k; ++c) {
    centroids.row(c) /= counts[static_cast<std::size_t>(c)];
    between += counts[static_cast<std::size_t>(c)] * (centroids.row(c) - mean).squaredNorm();
  }
  double within = 0.0;
  for (Index i = 0; i < n; ++i) {
    within += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  }
  if (within == 0.0) return std::numeric_limits<double>::infinity();
  return (between / within) * (static_cast<double>(n - k) / static_cast<double>(k - 1));
}

NeighborSets neighbor_sets(const std::vector<KernelMatrix>& kernels) {
  NeighborSets out;
  for (const auto& kernel : kernels) {
    const Matrix& k = kernel.values();
    std::vector<std::vector<Index>> view(static_cast<std::size_t>(k.rows()));
    for (Index i = 0; i < k.rows(); ++i) {
      for (Index j = 0; j < k.cols(); ++j) {
        if (j != i && k(i, j) > 0.0) view[static_cast<std::size_t>(i)].push_back(j);
      }
    }
    out.neighbors.push_back(std::move(view));
  }
  return out;
}

double contrastive_loss(const Matrix& w, const NeighborSets& neigh, std::span<const double> lambdas) {
  check_contrastive_inputs(w, neigh, lambdas);
  const Vector lse = row_lse_excluding_diagonal(w);
  double total = 0.0;
  for (std::size_t v = 0; v < neigh.view_count(); ++v) {
    if (lambdas[v] == 0.0) continue;
    double view_loss = 0.0;
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j : neigh.neighbors[v][static_cast<std::size_t>(i)]) view_loss += lse(i) - w(i, j);
    }
    total += lambdas[v] * view_loss;
  }
  return total;
}

Matrix contrastive_loss_gradient(const Matrix& w, const NeighborSets& neigh, std::span<const double> lambdas) {
  check_contrastive_inputs(w, neigh, lambdas);
  const Index n = w.rows();
  const Vector lse = row_lse_excluding_diagonal(w);
  // Per row: weight on the softmax term and direct neighbor indicators.
  Vector softmax_weight = Vector::Zero(n);
  Matrix g = Matrix::Zero(n, n);
  for (std::size_t v = 0; v < neigh.view_count(); ++v) {
    for (Index i = 0; i < n; ++i) {
      const auto& nb = neigh.neighbors[v][static_cast<std::size_t>(i)];
      softmax_weight(i) += lambdas[v] * static_cast<double>(nb.size());
      for (Index j : nb) g(i, j) -= lambdas[v];
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < n; ++k) {
      if (k != i) g(i, k) += softmax_weight(i) * std::exp(w(i, k) - lse(i));
    }
  }
  return g;
}

double ami(const PartitionLabels& a, const PartitionLabels& b) {
  if (a.size() != b.size()) throw Error("AMI: partitions have different sizes");
  if (a.size() == 0) throw Error("AMI of empty partitions");
  const bool identical = same_partition(a, b);
  const double n = static_cast<double>(a.size());

  std::vector<double> rows(static_cast<std::size_t>(a.k()), 0.0);
  std::vector<double> cols(static_cast<std::size_t>(b.k()), 0.0);
  Matrix table = Matrix::Zero(a.k(), b.k());
  for (std::size_t i = 0; i < a.size(); ++i) {
    table(a[i], b[i]) += 1.0;
    rows[static_cast<std::size_t>(a[i])] += 1.0;
    cols[static_cast<std::size_t>(b[i])] += 1.0;
  }
  double mi = 0.0;
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      const double nij = table(i, j);
      if (nij > 0.0) {
        mi += (nij / n) * std::log(n * nij / (rows[static_cast<std::size_t>(i)] * cols[static_cast<std::size_t>(j)]));
      }
    }
  }
  const double emi = expected_mutual_information(rows, cols, n);
  const double normalizer = 0.5 * (entropy_of_counts(rows, n) + entropy_of_counts(cols, n));
  const double denominator = normalizer - emi;
  if (std::abs(denominator) <= 1e-15) return identical ? 1.0 : 0.0;
  if (identical) return 1.0;
  return (mi - emi) / denominator;
}

std::map<std::string, double> prr(const std::map<std::string, double>& scores, double baseline) {
  if (!(baseline > 0.0)) throw Error("PRR baseline AMI must be positive");
  std::map<std::string, double> out;
  for (const auto& [method, score] : scores) out[method] = score / baseline;
  return out;
}

QchEvaluation q_ch_evaluate(const MDTOperator& w, const MultiViewDataset& data, int k,
                            std::span<const double> weights, std::uint64_t kmeans_seed) {
  if (k < 2) throw Error("Q_CH needs k >= 2");
  const std::size_t v_count = data.view_count();
  std::vector<double> wts = weights.empty() ? std::vector<double>(v_count, 1.0 / static_cast<double>(v_count))
                                            : std::vector<double>(weights.begin(), weights.end());
  if (wts.size() != v_count) throw Error("Q_CH: one weight per view required");
  const DiffusionMap map = diffusion_map(w, k);
  const PartitionLabels partition = kmeans(map.embedding, k, kmeans_seed).labels;
  double score = 0.0;
  for (std::size_t v = 0; v < v_count; ++v) {
    if (wts[v] != 0.0) score += wts[v] * ch_index(data.view(v).points(), partition);
  }
  return QchEvaluation{score, partition};
}

double q_ch_of(const MDTOperator& w, const MultiViewDataset& data, int k, std::span<const double> weights,
               std::uint64_t kmeans_seed) {
  return q_ch_evaluate(w, data, k, weights, kmeans_seed).score;
}

double q_ch(const Trajectory& tau, const MultiViewDataset& data, const OperatorSet& operators, int k,
            std::span<const double> weights, std::uint64_t kmeans_seed) {
  return q_ch_of(compose(operators, tau), data, k, weights, kmeans_seed);
}

}  // namespace mdt
