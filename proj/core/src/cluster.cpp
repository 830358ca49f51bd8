#include "mdt/cluster.hpp"

#include "mdt/methods.hpp"
#include "mdt/parallel.hpp"
#include "mdt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mdt {
namespace {

constexpr int kMaxLloydIterations = 300;
constexpr double kMoveTol = 1e-9;

Index distinct_rows(const Matrix& e) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(e.rows()));
  for (Index i = 0; i < e.rows(); ++i) rows[static_cast<std::size_t>(i)].assign(e.row(i).begin(), e.row(i).end());
  std::sort(rows.begin(), rows.end());
  return static_cast<Index>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

Matrix plus_plus_init(const Matrix& e, int k, Rng& rng) {
  const Index n = e.rows();
  Matrix c(k, e.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  c.row(0) = e.row(first(rng));
  Vector d2 = (e.rowwise() - c.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    const double target = unif(rng) * total;
    double acc = 0.0;
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (d2(i) <= 0.0) continue;
      acc += d2(i);
      pick = i;
      if (acc > target) break;
    }
    c.row(j) = e.row(pick);
    d2 = d2.cwiseMin((e.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

// Nearest centroid per point (ties to the lower index) and its squared distance.
void assign(const Matrix& e, const Matrix& c, std::vector<int>& labels, Vector& dist) {
  for (Index i = 0; i < e.rows(); ++i) {
    int best = 0;
    double bd = (e.row(i) - c.row(0)).squaredNorm();
    for (Index j = 1; j < c.rows(); ++j) {
      const double d = (e.row(i) - c.row(j)).squaredNorm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist(i) = bd;
  }
}

KMeansResult lloyd(const Matrix& e, int k, Rng& rng) {
  const Index n = e.rows();
  Matrix c = plus_plus_init(e, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Vector dist(n);
  int it = 0;
  for (; it < kMaxLloydIterations; ++it) {
    assign(e, c, labels, dist);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      // Move the point farthest from its centroid (in a cluster of size > 1).
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || dist(i) > dist(far)) far = i;
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      dist(far) = 0.0;
      c.row(j) = e.row(far);
    }
    Matrix next = Matrix::Zero(k, e.cols());
    for (Index i = 0; i < n; ++i) next.row(labels[static_cast<std::size_t>(i)]) += e.row(i);
    for (int j = 0; j < k; ++j) next.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
    const double move = (next - c).rowwise().norm().maxCoeff();
    c = std::move(next);
    if (move < kMoveTol) {
      ++it;
      break;
    }
  }
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i) inertia += (e.row(i) - c.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return KMeansResult{PartitionLabels(std::move(labels), k), std::move(c), inertia, it};
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

KMeansResult kmeans(const Matrix& e, int k, std::uint64_t seed, int n_init) {
  if (k < 2 || k > e.rows()) throw Error("k-means needs 2 <= k <= N, got k=" + std::to_string(k));
  if (n_init < 1) throw Error("k-means needs n_init >= 1");
  if (!e.allFinite()) throw Error("k-means input contains non-finite values");
  const Index distinct = distinct_rows(e);
  if (k > distinct) {
    throw Error("k-means: k=" + std::to_string(k) + " exceeds the " + std::to_string(distinct) + " distinct rows");
  }
  std::optional<KMeansResult> best;
  for (int r = 0; r < n_init; ++r) {
    Rng rng = make_rng(seed, "kmeans-init", static_cast<std::uint64_t>(r));
    KMeansResult res = lloyd(e, k, rng);
    if (!best || res.inertia < best->inertia) best = std::move(res);
  }
  return std::move(*best);
}

nlohmann::json ClusterRunReport::to_json() const {
  return nlohmann::json{{"method", method},
                        {"ami_mean", ami_mean},
                        {"ami_std", ami_std},
                        {"ch", ch_per_view},
                        {"runs", runs},
                        {"resolved_t", resolved_t ? nlohmann::json(*resolved_t) : nlohmann::json(nullptr)},
                        {"seed_base", seed_base},
                        {"run_ami", run_ami},
                        {"warnings", warnings}};
}

ClusterRunReport cluster_pipeline(const MultiViewDataset& data, const ViewOperators& ops, const MethodConfig& method,
                                  int k, int runs, std::uint64_t seed_base, std::size_t threads) {
  if (runs < 1) throw Error("cluster pipeline needs runs >= 1");
  if (!data.labels()) throw Error("cluster pipeline needs ground-truth labels");
  const PartitionLabels truth = PartitionLabels::from_raw(*data.labels());
  const std::size_t r_count = static_cast<std::size_t>(runs);

  std::vector<MethodEmbedding> embeddings;
  if (method.stochastic()) {
    embeddings.resize(r_count);
    parallel_for(r_count, threads, [&](std::size_t r) {
      embeddings[r] = embed(data, ops, method, k, k, seed_base + r, 1);
    });
  } else {
    embeddings.push_back(embed(data, ops, method, k, k, seed_base, threads));
  }

  std::vector<double> amis(r_count);
  std::vector<std::vector<double>> ch(r_count);
  parallel_for(r_count, threads, [&](std::size_t r) {
    const MethodEmbedding& emb = embeddings[method.stochastic() ? r : 0];
    if (emb.embedding.cols() != k) throw Error("embedding dimension differs from k");
    const KMeansResult km = kmeans(emb.embedding, k, derive_seed(seed_base + r, "kmeans"));
    amis[r] = ami(truth, km.labels);
    for (const auto& view : data.views()) ch[r].push_back(ch_index(view.points(), km.labels));
  });

  ClusterRunReport report;
  report.method = method.method;
  report.runs = runs;
  report.seed_base = seed_base;
  report.run_ami = amis;
  report.ami_mean = mean(amis);
  double var = 0.0;
  for (double a : amis) var += (a - report.ami_mean) * (a - report.ami_mean);
  report.ami_std = std::sqrt(var / static_cast<double>(runs));
  for (std::size_t v = 0; v < data.view_count(); ++v) {
    std::vector<double> col;
    for (const auto& row : ch) col.push_back(row[v]);
    report.ch_per_view.push_back(mean(col));
  }
  report.resolved_t = embeddings.front().resolved_t;
  for (const auto& e : embeddings) {
    for (const auto& w : e.warnings) {
      if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end()) {
        report.warnings.push_back(w);
      }
    }
  }
  for (const auto& w : ops.warnings) report.warnings.push_back(w);
  return report;
}

}  // namespace mdt
