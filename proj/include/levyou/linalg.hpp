#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace levyou {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^M by scaling and squaring with a degree-13 Padé
/// approximant. Throws DimensionError for non-square input.
Matrix expm(const Matrix& m);

/// ∫_0^t e^{sA} ds, valid for singular A (computed as a block of the
/// exponential of the augmented matrix [[A, I], [0, 0]]).
Matrix integrated_propagator(const Matrix& a, double t);

/// Default relative cutoff used by numerical_rank: 1e-10 * max(rows, cols).
double default_rank_tol(Eigen::Index rows, Eigen::Index cols);

struct RankInfo {
  int rank = 0;
  Vector singular_values;  // descending
  /// Smallest retained singular value over the largest; 0 when rank is 0.
  double margin = 0.0;
};

/// Singular values above tol * sigma_max are counted. Matrices with zero
/// rows or columns have rank 0.
RankInfo rank_info(const Matrix& m, std::optional<double> tol = std::nullopt);
int numerical_rank(const Matrix& m, std::optional<double> tol = std::nullopt);

/// Spectral norm.
double op_norm(const Matrix& m);

/// Linear subspace of R^n held as an orthonormal basis (columns).
class Subspace {
 public:
  explicit Subspace(Eigen::Index ambient_dim);
  Subspace(Eigen::Index ambient_dim, Matrix basis);

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  Eigen::Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  Matrix projector() const;
  bool is_full() const { return dim() == ambient_dim_; }
  /// Same dimension and projectors agree to tol in max-norm.
  bool same_as(const Subspace& other, double tol = 1e-10) const;

 private:
  Eigen::Index ambient_dim_;
  Matrix basis_;
};

/// Orthonormal basis of the span of the given vectors; its dimension is the
/// numerical rank of the stacked matrix.
Subspace span_of(const std::vector<Vector>& vectors, Eigen::Index ambient_dim,
                 std::optional<double> tol = std::nullopt);

/// Subspace sum.
Subspace join(const Subspace& a, const Subspace& b,
              std::optional<double> tol = std::nullopt);

void require_finite(const Matrix& m, const char* name);

}  // namespace levyou
