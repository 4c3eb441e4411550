#include "levyou/linalg.hpp"

#include "levyou/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace levyou {

namespace {

// Padé-13 coefficients and the 1-norm threshold below which no scaling is
// needed (Higham, 2005).
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("expm: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
  const auto n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  if (n == 0 || m.isZero(0.0)) return id;

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  }
  const Matrix a = m / std::ldexp(1.0, squarings);

  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kPade13;
  const Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix u = a * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix integrated_propagator(const Matrix& a, double t) {
  const auto n = a.rows();
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a * t;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n) * t;
  return expm(aug).topRightCorner(n, n);
}

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return 1e-10 * static_cast<double>(std::max<Eigen::Index>({rows, cols, 1}));
}

RankInfo rank_info(const Matrix& m, std::optional<double> tol) {
  RankInfo info;
  if (m.rows() == 0 || m.cols() == 0) return info;
  require_finite(m, "rank input");
  Eigen::JacobiSVD<Matrix> svd(m);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values(0) : 0.0;
  if (smax == 0.0) return info;
  const double cut = tol.value_or(default_rank_tol(m.rows(), m.cols())) * smax;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values(i) > cut) ++info.rank;
  }
  info.margin = info.singular_values(info.rank - 1) / smax;
  return info;
}

int numerical_rank(const Matrix& m, std::optional<double> tol) {
  return rank_info(m, tol).rank;
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Subspace::Subspace(Eigen::Index ambient_dim)
    : ambient_dim_(ambient_dim), basis_(ambient_dim, 0) {}

Subspace::Subspace(Eigen::Index ambient_dim, Matrix basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (basis_.rows() != ambient_dim_) {
    throw DimensionError("Subspace: basis rows do not match ambient dimension");
  }
}

Matrix Subspace::projector() const { return basis_ * basis_.transpose(); }

bool Subspace::same_as(const Subspace& other, double tol) const {
  if (ambient_dim_ != other.ambient_dim_ || dim() != other.dim()) return false;
  return (projector() - other.projector()).cwiseAbs().maxCoeff() <= tol;
}

Subspace span_of(const std::vector<Vector>& vectors, Eigen::Index ambient_dim,
                 std::optional<double> tol) {
  if (vectors.empty()) return Subspace(ambient_dim);
  Matrix stacked(ambient_dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != ambient_dim) {
      throw DimensionError("span_of: vector " + std::to_string(j) + " has dimension " +
                           std::to_string(vectors[j].size()) + ", expected " +
                           std::to_string(ambient_dim));
    }
    stacked.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  require_finite(stacked, "span_of input");
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const int r = rank_info(stacked, tol).rank;
  return Subspace(ambient_dim, svd.matrixU().leftCols(r));
}

Subspace join(const Subspace& a, const Subspace& b, std::optional<double> tol) {
  std::vector<Vector> cols;
  for (Eigen::Index j = 0; j < a.dim(); ++j) cols.emplace_back(a.basis().col(j));
  for (Eigen::Index j = 0; j < b.dim(); ++j) cols.emplace_back(b.basis().col(j));
  return span_of(cols, a.ambient_dim(), tol);
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) throw DomainError(std::string(name) + " has non-finite entries");
}

}  // namespace levyou
