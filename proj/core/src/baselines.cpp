#include "mdt/baselines.hpp"

#include "mdt/time_select.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace mdt {
namespace {

void check_same_size(std::span<const TransitionMatrix> ops) {
  if (ops.empty()) throw Error("need at least one operator");
  for (const auto& op : ops) {
    if (op.size() != ops.front().size()) throw Error("operator dimension mismatch");
  }
}

// Leading l eigenpairs (by eigenvalue, descending) of a symmetric matrix.
std::pair<Matrix, Vector> leading_eigenpairs(const Matrix& sym, Index l) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const Index n = sym.rows();
  Matrix vecs(n, l);
  Vector vals(l);
  for (Index c = 0; c < l; ++c) {
    vals(c) = eig.eigenvalues()(n - 1 - c);
    vecs.col(c) = eig.eigenvectors().col(n - 1 - c);
  }
  return {vecs, vals};
}

// Exactly symmetric block kernel; a single view degenerates to its own kernel.
Matrix mvd_block(std::span<const KernelMatrix> kernels) {
  if (kernels.empty()) throw Error("MVD needs at least one kernel");
  const Index n = kernels.front().size();
  const Index v = static_cast<Index>(kernels.size());
  for (const auto& k : kernels) {
    if (k.size() != n) throw Error("MVD kernels must share N");
  }
  if (v == 1) return kernels.front().values();
  Matrix block = Matrix::Zero(v * n, v * n);
  for (Index a = 0; a < v; ++a) {
    for (Index b = a + 1; b < v; ++b) {
      const Matrix kab = kernels[static_cast<std::size_t>(a)].values() * kernels[static_cast<std::size_t>(b)].values();
      block.block(a * n, b * n, n, n) = kab;
      block.block(b * n, a * n, n, n) = kab.transpose();
    }
  }
  return block;
}

}  // namespace

std::string to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::AD: return "ad";
    case BaselineMethod::ID: return "id";
    case BaselineMethod::PAD: return "pad";
    case BaselineMethod::MVD: return "mvd";
    case BaselineMethod::CrDiff: return "crdiff";
    case BaselineMethod::ComDiff: return "comdiff";
  }
  return "?";
}

TransitionMatrix alternating_diffusion(std::span<const TransitionMatrix> ops) {
  check_same_size(ops);
  std::vector<Matrix> steps;
  for (const auto& op : ops) steps.push_back(op.values());
  return TransitionMatrix(left_product(steps));
}

TransitionMatrix integrated_diffusion(std::span<const TransitionMatrix> ops, std::span<const int> powers) {
  check_same_size(ops);
  if (powers.size() != ops.size()) throw Error("integrated diffusion needs one power per view");
  std::vector<Matrix> steps;
  for (std::size_t v = 0; v < ops.size(); ++v) {
    if (powers[v] < 1) throw Error("integrated diffusion powers must be >= 1");
    for (int r = 0; r < powers[v]; ++r) steps.push_back(ops[v].values());
  }
  return TransitionMatrix(left_product(steps));
}

std::vector<int> integrated_diffusion_powers(std::span<const TransitionMatrix> ops, int t_max) {
  std::vector<int> powers;
  for (const auto& op : ops) powers.push_back(entropy_curve_of(op.values(), t_max).elbow);
  return powers;
}

TransitionMatrix powered_alternating(std::span<const TransitionMatrix> ops, int t) {
  if (t < 1) throw Error("powered alternating diffusion needs t >= 1");
  const TransitionMatrix ad = alternating_diffusion(ops);
  return TransitionMatrix(matrix_power(ad.values(), t));
}

int powered_alternating_time(std::span<const TransitionMatrix> ops, int t_max) {
  return entropy_curve_of(alternating_diffusion(ops).values(), t_max).elbow;
}

Trajectory alternating_trajectory(std::size_t views) {
  std::vector<std::size_t> steps;
  for (std::size_t v = 0; v < views; ++v) steps.push_back(v);
  return Trajectory::discrete(std::move(steps));
}

Trajectory integrated_trajectory(std::span<const int> powers) {
  std::vector<std::size_t> steps;
  for (std::size_t v = 0; v < powers.size(); ++v) {
    for (int r = 0; r < powers[v]; ++r) steps.push_back(v);
  }
  return Trajectory::discrete(std::move(steps));
}

Trajectory powered_alternating_trajectory(std::size_t views, int t) {
  std::vector<std::size_t> steps;
  for (int r = 0; r < t; ++r) {
    for (std::size_t v = 0; v < views; ++v) steps.push_back(v);
  }
  return Trajectory::discrete(std::move(steps));
}

Matrix mvd_operator(std::span<const KernelMatrix> kernels) {
  const Matrix block = mvd_block(kernels);
  const Vector degree = block.rowwise().sum();
  if (!(degree.minCoeff() > 0.0)) throw Error("MVD: singular degree matrix");
  return degree.cwiseInverse().asDiagonal() * block;
}

BaselineEmbedding mvd(std::span<const KernelMatrix> kernels, Index l, int t) {
  const Index n = kernels.front().size();
  if (l < 1 || l > n) throw Error("MVD embedding dimension must lie in [1, N]");
  const Matrix block = mvd_block(kernels);
  const Vector degree = block.rowwise().sum();
  if (!(degree.minCoeff() > 0.0)) throw Error("MVD: singular degree matrix");
  // D^-1 K is similar to the symmetric D^-1/2 K D^-1/2; right eigenvectors are D^-1/2 u.
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Matrix sym = inv_sqrt.asDiagonal() * block * inv_sqrt.asDiagonal();
  auto [vecs, vals] = leading_eigenpairs(0.5 * (sym + sym.transpose()), l);
  Matrix psi = inv_sqrt.asDiagonal() * vecs;
  Matrix emb(n, l);
  Vector scale(l);
  for (Index c = 0; c < l; ++c) {
    scale(c) = std::pow(vals(c), t);
    emb.col(c) = psi.col(c).head(n) * scale(c);
  }
  nlohmann::json params{{"t", t}, {"view", 1}};
  return BaselineEmbedding{std::move(emb), std::move(scale), BaselineMethod::MVD, params};
}

Matrix cross_diffusion(std::span<const TransitionMatrix> ops, int t, CrossDiffusionVariant variant) {
  check_same_size(ops);
  if (t < 1) throw Error("cross diffusion needs t >= 1");
  if (ops.size() < 2) throw Error("cross diffusion needs at least two views");

  auto two_view = [&](const Matrix& p1, const Matrix& p2) {
    Matrix q1 = p1;
    Matrix q2 = p2;
    for (int it = 1; it < t; ++it) {
      Matrix n1 = p1 * q2 * p2.transpose();
      Matrix n2 = variant == CrossDiffusionVariant::Symmetric ? Matrix(p2 * q1 * p1.transpose())
                                                               : Matrix(p2 * q1 * p2.transpose());
      q1.swap(n1);
      q2.swap(n2);
    }
    return Matrix(0.5 * (q1 + q2));
  };

  if (ops.size() == 2) return two_view(ops[0].values(), ops[1].values());
  const Index n = ops.front().size();
  Matrix acc = Matrix::Zero(n, n);
  double pairs = 0.0;
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      if (a == b) continue;
      acc += two_view(ops[a].values(), ops[b].values());
      pairs += 1.0;
    }
  }
  return acc / pairs;
}

BaselineEmbedding cross_diffusion_embedding(std::span<const TransitionMatrix> ops, Index l, int t,
                                            CrossDiffusionVariant variant) {
  const Matrix q = cross_diffusion(ops, t, variant);
  Matrix sym = 0.5 * (q + q.transpose());
  // Rescale so the largest entry is 1; the row normalization below is scale-free.
  sym /= sym.maxCoeff();
  const TransitionMatrix p = row_normalize(KernelMatrix(sym, 1.0));
  const DiffusionMap map = diffusion_map(MDTOperator::from_matrix(p.values()), l);
  nlohmann::json params{{"t", t}, {"variant", variant == CrossDiffusionVariant::Symmetric ? "symmetric" : "printed"}};
  return BaselineEmbedding{map.embedding, map.singular_values, BaselineMethod::CrDiff, params};
}

CompositeDiffusion composite_diffusion(std::span<const TransitionMatrix> ops) {
  if (ops.size() != 2) throw Error("two-view method: composite diffusion requires exactly 2 views, got " +
                                   std::to_string(ops.size()));
  check_same_size(ops);
  const Matrix x = ops[1].values() * ops[0].values().transpose();
  const Matrix xt = x.transpose();
  return CompositeDiffusion{x + xt, x - xt};
}

BaselineEmbedding composite_embedding(std::span<const TransitionMatrix> ops, Index l) {
  const CompositeDiffusion cd = composite_diffusion(ops);
  if (l < 1 || l > cd.symmetric.rows()) throw Error("embedding dimension must lie in [1, N]");
  auto [vecs, vals] = leading_eigenpairs(cd.symmetric, l);
  Matrix emb = vecs * vals.asDiagonal();
  return BaselineEmbedding{std::move(emb), vals, BaselineMethod::ComDiff, nlohmann::json::object()};
}

}  // namespace mdt
