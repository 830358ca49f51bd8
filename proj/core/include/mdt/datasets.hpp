#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mdt {

inline constexpr Index kHelixDefaultN = 1500;
inline constexpr Index kDeformedPlaneDefaultN = 3000;

/// Two helices in R^3 over the latent angles x1 = 2 pi (i-1)/n and
/// x2 = (x1 + pi/2) mod 2 pi. Latent columns: (x1, x2).
MultiViewDataset gen_helix_a(Index n = kHelixDefaultN);
MultiViewDataset gen_helix_b(Index n = kHelixDefaultN);

/// Plane sampled uniformly on [0, 3 pi/2) x [0, 21) and folded by two
/// non-bijective maps. Latent columns: (x1, x2).
MultiViewDataset gen_deformed_plane(Index n = kDeformedPlaneDefaultN, std::uint64_t seed = 0);

/// Three kernels on one point cloud: squared-exponential, Laplacian
/// exp(-|x_i - x_j| / sigma) and correlation exp((T_ij - 1) / (2 sigma)),
/// all with the max-min bandwidth.
std::vector<KernelMatrix> gen_multikernel_views(const ViewDataset& x);

enum class NoiseMode { GaussianPair, GaussianDropout };

/// gaussian_pair: X + N(0, 0.3^2) and X + N(0, s^2).
/// gaussian_dropout: X + N(0, s^2) and X with each entry zeroed with probability s.
MultiViewDataset gen_noisy_pair(const ViewDataset& x, double s, NoiseMode mode, std::uint64_t seed,
                                std::optional<std::vector<int>> labels = std::nullopt);

inline constexpr double kFixedNoiseStd = 0.3;

/// Gaussian clusters seen through several views. Cluster means sit on scaled
/// coordinate axes so that every pair is `separation` standard deviations
/// apart; the last `noise_views` views are pure noise. Label of point i is
/// i mod clusters.
struct BlobsConfig {
  Index n = 400;
  int clusters = 4;
  int views = 3;
  int noise_views = 1;
  double separation = 8.0;
  double std_dev = 1.0;
  std::uint64_t seed = 0;
};

MultiViewDataset gen_blobs(const BlobsConfig& config);

/// One CSV per view, plus an optional single-column label file.
MultiViewDataset load_views(const std::vector<std::filesystem::path>& paths,
                            const std::optional<std::filesystem::path>& labels_path = std::nullopt,
                            bool skip_header = false);

}  // namespace mdt
