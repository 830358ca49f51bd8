#pragma once

#include "mdt/common.hpp"
#include "mdt/operator_space.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mdt {

/// Ordered sequence of operator choices. Step 0 is applied first.
///
/// A discrete trajectory indexes into an OperatorSet; a convex trajectory
/// carries one simplex weight vector per step over the set's members.
class Trajectory {
 public:
  enum class Kind { Discrete, Convex };

  static Trajectory discrete(std::vector<std::size_t> steps);
  static Trajectory convex(std::vector<SimplexWeights> steps);

  Kind kind() const { return std::holds_alternative<std::vector<std::size_t>>(steps_) ? Kind::Discrete : Kind::Convex; }
  std::size_t length() const;

  const std::vector<std::size_t>& indices() const;
  const std::vector<SimplexWeights>& weights() const;

  /// Throws unless every step is valid for a set of `set_size` operators.
  void validate(std::size_t set_size) const;

  /// {"kind":"discrete","steps":[0,0,1]} or {"kind":"convex","steps":[[..],..]}
  nlohmann::json to_json() const;
  static Trajectory from_json(const nlohmann::json& j);

  /// Compact key, unique per trajectory; used for caching and path strings.
  std::string key() const;

  friend bool operator==(const Trajectory& a, const Trajectory& b) { return a.key() == b.key(); }

 private:
  explicit Trajectory(std::variant<std::vector<std::size_t>, std::vector<SimplexWeights>> steps)
      : steps_(std::move(steps)) {}

  std::variant<std::vector<std::size_t>, std::vector<SimplexWeights>> steps_;
};

/// Unique stationary distribution of a row-stochastic matrix.
Vector stationary(const Matrix& w);

/// The left product W_t ... W_1 of a trajectory, with its stationary law.
struct MDTOperator {
  Matrix matrix;
  std::optional<Trajectory> trajectory;
  Vector stationary;

  /// Computes the stationary distribution and checks the invariants.
  static MDTOperator from_matrix(Matrix w, std::optional<Trajectory> trajectory = std::nullopt);

  Index size() const { return matrix.rows(); }
};

/// Left product of raw step matrices, steps[0] applied first.
Matrix left_product(std::span<const Matrix> steps);

/// Dense step matrices of a trajectory.
std::vector<Matrix> step_matrices(const OperatorSet& set, const Trajectory& traj);

MDTOperator compose(const OperatorSet& set, const Trajectory& traj);

/// sum_k (W_ik - W_jk)^2 / pi(k).
double diffusion_distance_sq(const MDTOperator& w, Index i, Index j);
double diffusion_distance(const MDTOperator& w, Index i, Index j);

/// SVD of the pi-conjugated operator A = Pi^{1/2} W Pi^{-1/2} = M diag(s) N^T.
struct ConjugatedSvd {
  Matrix left;   // M
  Vector singular_values;
  Matrix right;  // N
};

ConjugatedSvd conjugated_svd(const MDTOperator& w);

struct DiffusionMap {
  Matrix embedding;       // N x l
  Vector singular_values; // length l, nonincreasing
  std::optional<Trajectory> source;
};

/// Psi = Pi^{-1/2} M diag(s), first l columns. At l = N pairwise Euclidean
/// distances equal diffusion distances.
DiffusionMap diffusion_map(const MDTOperator& w, Index l);

Matrix matrix_power(const Matrix& m, int t);

/// (sum_p mu_p P_p)^t. An empty mu means uniform.
Matrix expected_operator(const OperatorSet& set, std::span<const double> mu, int t);

std::vector<double> uniform_distribution(std::size_t n);

}  // namespace mdt
