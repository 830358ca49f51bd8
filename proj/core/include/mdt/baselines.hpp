#pragma once

#include "mdt/common.hpp"
#include "mdt/kernels.hpp"
#include "mdt/trajectory.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace mdt {

enum class BaselineMethod { AD, ID, PAD, MVD, CrDiff, ComDiff };

std::string to_string(BaselineMethod m);

struct BaselineEmbedding {
  Matrix embedding;  // N x l
  Vector spectrum;   // per-column scale (eigen- or singular values)
  BaselineMethod method;
  nlohmann::json params;
};

/// P_V ... P_2 P_1 (P_1 applied first).
TransitionMatrix alternating_diffusion(std::span<const TransitionMatrix> ops);

/// Alternating diffusion over the per-view powers P_v^{t_v}.
TransitionMatrix integrated_diffusion(std::span<const TransitionMatrix> ops, std::span<const int> powers);

/// Per-view t_v from the singular-entropy elbow of each P_v.
std::vector<int> integrated_diffusion_powers(std::span<const TransitionMatrix> ops, int t_max = 30);

/// (alternating_diffusion(ops))^t.
TransitionMatrix powered_alternating(std::span<const TransitionMatrix> ops, int t);

/// t from the singular-entropy elbow of the alternating operator.
int powered_alternating_time(std::span<const TransitionMatrix> ops, int t_max = 30);

/// Trajectories over the canonical set that reproduce the operators above.
Trajectory alternating_trajectory(std::size_t views);
Trajectory integrated_trajectory(std::span<const int> powers);
Trajectory powered_alternating_trajectory(std::size_t views, int t);

/// Degree-normalized V N x V N block kernel with off-diagonal blocks K_a K_b.
/// Built exactly symmetric before normalization.
Matrix mvd_operator(std::span<const KernelMatrix> kernels);

/// First-view block rows of the leading l eigenvectors of the MVD operator,
/// scaled by eigenvalue^t.
BaselineEmbedding mvd(std::span<const KernelMatrix> kernels, Index l, int t = 1);

enum class CrossDiffusionVariant {
  Symmetric,  // Q2 <- P2 Q1 P1^T
  Printed,    // Q2 <- P2 Q1 P2^T
};

inline constexpr int kDefaultCrossDiffusionTime = 20;

/// Fused cross-diffusion matrix. For V > 2 averages the two-view result over
/// all ordered pairs of views.
Matrix cross_diffusion(std::span<const TransitionMatrix> ops, int t = kDefaultCrossDiffusionTime,
                       CrossDiffusionVariant variant = CrossDiffusionVariant::Symmetric);

/// Cross-diffusion embedding: the fused matrix is symmetrized, row-normalized
/// into a random walk, and embedded with a diffusion map.
BaselineEmbedding cross_diffusion_embedding(std::span<const TransitionMatrix> ops, Index l,
                                            int t = kDefaultCrossDiffusionTime,
                                            CrossDiffusionVariant variant = CrossDiffusionVariant::Symmetric);

struct CompositeDiffusion {
  Matrix symmetric;      // P2 P1^T + P1 P2^T
  Matrix antisymmetric;  // P2 P1^T - P1 P2^T
};

/// Two-view only; throws "two-view method" otherwise.
CompositeDiffusion composite_diffusion(std::span<const TransitionMatrix> ops);

/// Leading l eigenvectors of the symmetric composite operator, scaled by
/// their eigenvalues.
BaselineEmbedding composite_embedding(std::span<const TransitionMatrix> ops, Index l);

}  // namespace mdt
