#include "mdt/trajectory.hpp"

#include "mdt/io.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace mdt {
namespace {

constexpr double kOperatorTol = 1e-10;
constexpr double kStationaryResidual = 1e-12;

double stationary_residual(const Matrix& w, const Vector& pi) {
  return (w.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

// Direct solve of (W^T - I) pi = 0 with sum(pi) = 1 replacing the last row.
std::optional<Vector> direct_stationary(const Matrix& w) {
  const Index n = w.rows();
  Matrix a = w.transpose() - Matrix::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b(n - 1) = 1.0;
  Vector pi = a.partialPivLu().solve(b);
  if (!pi.allFinite() || pi.minCoeff() <= 0.0) return std::nullopt;
  return pi / pi.sum();
}

}  // namespace

Trajectory Trajectory::discrete(std::vector<std::size_t> steps) {
  if (steps.empty()) throw Error("trajectory length must be >= 1");
  return Trajectory(std::move(steps));
}

Trajectory Trajectory::convex(std::vector<SimplexWeights> steps) {
  if (steps.empty()) throw Error("trajectory length must be >= 1");
  const std::size_t width = steps.front().size();
  for (const auto& s : steps) {
    if (s.size() != width) throw Error("convex trajectory steps must share one weight dimension");
  }
  return Trajectory(std::move(steps));
}

std::size_t Trajectory::length() const {
  return std::visit([](const auto& v) { return v.size(); }, steps_);
}

const std::vector<std::size_t>& Trajectory::indices() const {
  if (kind() != Kind::Discrete) throw Error("trajectory is not discrete");
  return std::get<std::vector<std::size_t>>(steps_);
}

const std::vector<SimplexWeights>& Trajectory::weights() const {
  if (kind() != Kind::Convex) throw Error("trajectory is not convex");
  return std::get<std::vector<SimplexWeights>>(steps_);
}

void Trajectory::validate(std::size_t set_size) const {
  if (kind() == Kind::Discrete) {
    for (std::size_t idx : indices()) {
      if (idx >= set_size) {
        throw Error("trajectory step index " + std::to_string(idx) + " out of range for a set of " +
                    std::to_string(set_size));
      }
    }
  } else {
    for (const auto& w : weights()) {
      if (w.size() != set_size) {
        throw Error("trajectory weights have dimension " + std::to_string(w.size()) +
                    " for a set of " + std::to_string(set_size));
      }
    }
  }
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json j;
  if (kind() == Kind::Discrete) {
    j["kind"] = "discrete";
    j["steps"] = indices();
  } else {
    j["kind"] = "convex";
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& w : weights()) steps.push_back(w.values());
    j["steps"] = std::move(steps);
  }
  return j;
}

Trajectory Trajectory::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "discrete") return discrete(j.at("steps").get<std::vector<std::size_t>>());
  if (kind == "convex") {
    std::vector<SimplexWeights> steps;
    for (const auto& s : j.at("steps")) steps.emplace_back(s.get<std::vector<double>>());
    return convex(std::move(steps));
  }
  throw Error("unknown trajectory kind '" + kind + "'");
}

std::string Trajectory::key() const {
  std::string out;
  if (kind() == Kind::Discrete) {
    out = "d";
    for (std::size_t idx : indices()) out += ":" + std::to_string(idx);
  } else {
    out = "c";
    for (const auto& w : weights()) {
      out += ":";
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ",";
        out += io::format_double(w[i]);
      }
    }
  }
  return out;
}

Vector stationary(const Matrix& w) {
  const Index n = w.rows();
  if (n == 0 || w.cols() != n) throw Error("stationary: matrix must be square and non-empty");
  Vector pi = direct_stationary(w).value_or(Vector::Constant(n, 1.0 / static_cast<double>(n)));
  const long max_iter = 100L * static_cast<long>(n);
  for (long it = 0; it <= max_iter; ++it) {
    if (stationary_residual(w, pi) <= kStationaryResidual) {
      if (pi.minCoeff() <= 0.0) break;
      return pi;
    }
    Vector next = w.transpose() * pi;
    pi = next / next.sum();
  }
  throw Error("stationary iteration failed");
}

MDTOperator MDTOperator::from_matrix(Matrix w, std::optional<Trajectory> trajectory) {
  check_stochastic(w, kOperatorTol);
  Vector pi = mdt::stationary(w);
  if (std::abs(pi.sum() - 1.0) > kOperatorTol || stationary_residual(w, pi) > kOperatorTol) {
    throw Error("stationary distribution does not satisfy pi^T W = pi^T");
  }
  return MDTOperator{std::move(w), std::move(trajectory), std::move(pi)};
}

Matrix left_product(std::span<const Matrix> steps) {
  if (steps.empty()) throw Error("left_product needs at least one step");
  Matrix acc = steps.front();
  Matrix tmp(acc.rows(), acc.cols());
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].rows() != acc.rows() || steps[i].cols() != acc.cols()) {
      throw Error("left_product: dimension mismatch at step " + std::to_string(i + 1));
    }
    tmp.noalias() = steps[i] * acc;
    acc.swap(tmp);
  }
  return acc;
}

std::vector<Matrix> step_matrices(const OperatorSet& set, const Trajectory& traj) {
  traj.validate(set.size());
  std::vector<Matrix> steps;
  steps.reserve(traj.length());
  if (traj.kind() == Trajectory::Kind::Discrete) {
    for (std::size_t idx : traj.indices()) steps.push_back(set[idx].values());
  } else {
    for (const auto& w : traj.weights()) steps.push_back(convex_combine(set, w).values());
  }
  return steps;
}

MDTOperator compose(const OperatorSet& set, const Trajectory& traj) {
  const auto steps = step_matrices(set, traj);
  return MDTOperator::from_matrix(left_product(steps), traj);
}

double diffusion_distance_sq(const MDTOperator& w, Index i, Index j) {
  const Index n = w.size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw Error("diffusion distance index out of range");
  double sum = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double d = w.matrix(i, k) - w.matrix(j, k);
    sum += d * d / w.stationary(k);
  }
  return sum;
}

double diffusion_distance(const MDTOperator& w, Index i, Index j) {
  return std::sqrt(diffusion_distance_sq(w, i, j));
}

namespace {

Matrix conjugate(const MDTOperator& w) {
  const Vector sqrt_pi = w.stationary.cwiseSqrt();
  const Vector inv_sqrt_pi = sqrt_pi.cwiseInverse();
  return sqrt_pi.asDiagonal() * w.matrix * inv_sqrt_pi.asDiagonal();
}

}  // namespace

ConjugatedSvd conjugated_svd(const MDTOperator& w) {
  Eigen::BDCSVD<Matrix> svd(conjugate(w), Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw Error("SVD failed");
  return ConjugatedSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

DiffusionMap diffusion_map(const MDTOperator& w, Index l) {
  const Index n = w.size();
  if (l < 1 || l > n) throw Error("embedding dimension must lie in [1, N]");
  Eigen::BDCSVD<Matrix> svd(conjugate(w), Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw Error("SVD failed");
  const Vector inv_sqrt_pi = w.stationary.cwiseSqrt().cwiseInverse();
  const Vector s = svd.singularValues().head(l);
  Matrix psi = inv_sqrt_pi.asDiagonal() * svd.matrixU().leftCols(l) * s.asDiagonal();
  return DiffusionMap{std::move(psi), s, w.trajectory};
}

Matrix matrix_power(const Matrix& m, int t) {
  if (t < 1) throw Error("matrix power needs t >= 1");
  Matrix acc = m;
  for (int i = 1; i < t; ++i) acc = m * acc;
  return acc;
}

std::vector<double> uniform_distribution(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

Matrix expected_operator(const OperatorSet& set, std::span<const double> mu, int t) {
  std::vector<double> weights = mu.empty() ? uniform_distribution(set.size())
                                           : std::vector<double>(mu.begin(), mu.end());
  SimplexWeights check(weights);
  return matrix_power(convex_combine_matrix(set, check.values()), t);
}

}  // namespace mdt
