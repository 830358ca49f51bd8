#include "mdt/datasets.hpp"

#include "mdt/io.hpp"
#include "mdt/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mdt {
namespace {

constexpr double kPi = std::numbers::pi;

void check_n(Index n) {
  if (n < 10) throw Error("generators need n >= 10, got " + std::to_string(n));
}

Matrix helix_latent(Index n) {
  Matrix latent(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double x1 = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    latent(i, 0) = x1;
    latent(i, 1) = std::fmod(x1 + kPi / 2.0, 2.0 * kPi);
  }
  return latent;
}

template <class Phi>
MultiViewDataset helix(Index n, Phi phi) {
  check_n(n);
  const Matrix latent = helix_latent(n);
  Matrix v1(n, 3);
  Matrix v2(n, 3);
  for (Index i = 0; i < n; ++i) {
    v1.row(i) = phi(latent(i, 0));
    v2.row(i) = phi(latent(i, 1));
  }
  return MultiViewDataset({ViewDataset(std::move(v1), 1), ViewDataset(std::move(v2), 2)}, std::nullopt, latent);
}

}  // namespace

MultiViewDataset gen_helix_a(Index n) {
  return helix(n, [](double x) {
    return Eigen::RowVector3d(4.0 * std::cos(0.9 * x) + 0.3 * std::cos(20.0 * x),
                              4.0 * std::sin(0.9 * x) + 0.3 * std::sin(20.0 * x),
                              0.1 * (6.3 * x * x - x * x * x));
  });
}

MultiViewDataset gen_helix_b(Index n) {
  return helix(n, [](double x) {
    return Eigen::RowVector3d(4.0 * std::cos(5.0 * x), 4.0 * std::sin(5.0 * x), 4.0 * x);
  });
}

MultiViewDataset gen_deformed_plane(Index n, std::uint64_t seed) {
  check_n(n);
  Rng rng = make_rng(seed, "deformed-plane");
  std::uniform_real_distribution<double> u1(0.0, 1.5 * kPi);
  std::uniform_real_distribution<double> u2(0.0, 21.0);
  Matrix latent(n, 2);
  Matrix v1(n, 3);
  Matrix v2(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double x1 = u1(rng);
    const double x2 = u2(rng);
    latent.row(i) << x1, x2;
    v1.row(i) << x1 * std::cos(0.65 * x1), 0.2 * x2 + 0.3 * std::sin(x1), x1 * std::cos(x1);
    v2.row(i) << x2 + std::sin(2.0 * x1) + 0.4 * std::cos(x2), x1 + std::sin(x2) + 0.3 * std::cos(2.0 * x1),
        std::sin(x1) + std::cos(x2);
  }
  return MultiViewDataset({ViewDataset(std::move(v1), 1), ViewDataset(std::move(v2), 2)}, std::nullopt, latent);
}

std::vector<KernelMatrix> gen_multikernel_views(const ViewDataset& x) {
  const Index n = x.size();
  if (x.dim() < 2) throw Error("correlation kernel needs d >= 2");
  const Matrix& p = x.points();
  Matrix centered = p.colwise() - p.rowwise().mean();
  const Vector norms = centered.rowwise().norm();
  for (Index i = 0; i < n; ++i) {
    if (norms(i) == 0.0) throw Error("point " + std::to_string(i) + " has zero variance; correlation undefined");
  }
  centered = norms.cwiseInverse().asDiagonal() * centered;

  const double sigma = maxmin_bandwidth(x);
  Matrix k1 = Matrix::Ones(n, n);
  Matrix k2 = Matrix::Ones(n, n);
  Matrix k3 = Matrix::Ones(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (p.row(i) - p.row(j)).squaredNorm();
      const double corr = std::clamp(centered.row(i).dot(centered.row(j)), -1.0, 1.0);
      k1(i, j) = k1(j, i) = std::exp(-d2 / (2.0 * sigma * sigma));
      k2(i, j) = k2(j, i) = std::exp(-std::sqrt(d2) / sigma);
      k3(i, j) = k3(j, i) = std::exp((corr - 1.0) / (2.0 * sigma));
    }
  }
  std::vector<KernelMatrix> out;
  out.emplace_back(std::move(k1), sigma);
  out.emplace_back(std::move(k2), sigma);
  out.emplace_back(std::move(k3), sigma);
  return out;
}

MultiViewDataset gen_noisy_pair(const ViewDataset& x, double s, NoiseMode mode, std::uint64_t seed,
                                std::optional<std::vector<int>> labels) {
  if (!(s >= 0.0 && s < 1.0)) throw Error("noise factor s must lie in [0, 1)");
  const Matrix& p = x.points();
  Rng rng = make_rng(seed, "noisy-pair");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto add_noise = [&](double std_dev) {
    Matrix out = p;
    if (std_dev == 0.0) return out;
    for (Index i = 0; i < out.rows(); ++i) {
      for (Index j = 0; j < out.cols(); ++j) out(i, j) += std_dev * gauss(rng);
    }
    return out;
  };

  Matrix v1;
  Matrix v2;
  if (mode == NoiseMode::GaussianPair) {
    v1 = add_noise(kFixedNoiseStd);
    v2 = add_noise(s);
  } else {
    v1 = add_noise(s);
    v2 = p;
    for (Index i = 0; i < v2.rows(); ++i) {
      for (Index j = 0; j < v2.cols(); ++j) {
        if (unif(rng) < s) v2(i, j) = 0.0;
      }
    }
  }
  return MultiViewDataset({ViewDataset(std::move(v1), 1), ViewDataset(std::move(v2), 2)}, std::move(labels));
}

MultiViewDataset gen_blobs(const BlobsConfig& c) {
  check_n(c.n);
  if (c.clusters < 2) throw Error("blobs need at least 2 clusters");
  if (c.views < 1 || c.noise_views < 0 || c.noise_views >= c.views) {
    throw Error("blobs need at least one informative view");
  }
  if (!(c.std_dev > 0.0) || !(c.separation >= 0.0)) throw Error("blobs need std_dev > 0 and separation >= 0");
  const Index dim = c.clusters;
  // |a e_i - a e_j| = a sqrt(2) = separation * std_dev.
  const double scale = c.separation * c.std_dev / std::sqrt(2.0);

  std::vector<int> labels(static_cast<std::size_t>(c.n));
  for (Index i = 0; i < c.n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % c.clusters);

  std::vector<ViewDataset> views;
  for (int v = 0; v < c.views; ++v) {
    Rng rng = make_rng(c.seed, "blobs", static_cast<std::uint64_t>(v));
    std::normal_distribution<double> gauss(0.0, c.std_dev);
    const bool informative = v < c.views - c.noise_views;
    Matrix x(c.n, dim);
    for (Index i = 0; i < c.n; ++i) {
      for (Index j = 0; j < dim; ++j) x(i, j) = gauss(rng);
      if (informative) x(i, labels[static_cast<std::size_t>(i)]) += scale;
    }
    views.emplace_back(std::move(x), v + 1);
  }
  return MultiViewDataset(std::move(views), std::move(labels));
}

MultiViewDataset load_views(const std::vector<std::filesystem::path>& paths,
                            const std::optional<std::filesystem::path>& labels_path, bool skip_header) {
  if (paths.empty()) throw Error("no view files given");
  std::vector<Matrix> mats;
  for (const auto& p : paths) mats.push_back(io::read_csv_matrix(p, skip_header));
  bool mismatch = false;
  for (const auto& m : mats) mismatch |= m.rows() != mats.front().rows();
  if (mismatch) {
    std::string msg = "views disagree on the number of points:";
    for (std::size_t v = 0; v < paths.size(); ++v) {
      msg += " " + paths[v].string() + " (" + std::to_string(mats[v].rows()) + " rows)";
    }
    throw Error(msg);
  }
  std::vector<ViewDataset> views;
  for (std::size_t v = 0; v < mats.size(); ++v) {
    try {
      views.emplace_back(std::move(mats[v]), static_cast<int>(v + 1));
    } catch (const Error& e) {
      throw Error(paths[v].string() + ": " + e.what());
    }
  }
  std::optional<std::vector<int>> labels;
  if (labels_path) {
    labels = io::read_labels(*labels_path, skip_header);
    if (static_cast<Index>(labels->size()) != views.front().size()) {
      throw Error("labels file " + labels_path->string() + " has " + std::to_string(labels->size()) +
                  " rows, views have " + std::to_string(views.front().size()));
    }
  }
  return MultiViewDataset(std::move(views), std::move(labels));
}

}  // namespace mdt
