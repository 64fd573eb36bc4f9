#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "lcone/errors.hpp"

namespace lcone {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {

/// Draw a uniform direction on the unit sphere S^{n-1}. Gaussian draw
/// followed by normalization; near-zero draws are rejected.
inline VectorXd unit_sphere_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd u(n);
  for (;;) {
    for (int i = 0; i < n; ++i) u[i] = gauss(rng);
    const double nrm = u.norm();
    if (nrm > 1e-12) return u / nrm;
  }
}

inline bool is_symmetric(const MatrixXd& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * std::max(1.0, scale);
}

/// Symmetric inverse square root via eigendecomposition. Requires M > 0.
inline MatrixXd inverse_sqrt_spd(const MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw numeric_error("eigendecomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw precondition_error(std::string(what) + ": matrix is not positive definite");
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace detail

/// Orthonormal basis of the orthogonal complement of a nonzero vector,
/// returned as the n x (n-1) matrix H with a^T H = 0 and H^T H = I.
///
/// The unit vector a/|a| is completed to an orthonormal frame by a single
/// Householder reflection; columns 2..n of the reflector form H. The result
/// is deterministic for a given input.
inline MatrixXd complementary_basis(const VectorXd& a) {
  const int n = static_cast<int>(a.size());
  if (n < 2) throw dimension_error("complementary_basis: need dimension >= 2");
  const double nrm = a.norm();
  if (!(nrm > 0.0) || !a.allFinite())
    throw invalid_input("complementary_basis: normal vector must be nonzero and finite");

  const VectorXd v = a / nrm;
  // Reflector u = v + sign(v_1) e_1 avoids cancellation; H_h = I - 2 w w^T
  // maps v to -sign(v_1) e_1 and is symmetric orthogonal.
  const double s = (v[0] >= 0.0) ? 1.0 : -1.0;
  VectorXd u = v;
  u[0] += s;
  const double unorm2 = u.squaredNorm();

  MatrixXd h(n, n - 1);
  for (int j = 1; j < n; ++j) {
    const double coef = 2.0 * u[j] / unorm2;
    h.col(j - 1) = -coef * u;
    h(j, j - 1) += 1.0;
  }
  return h;
}

/// The explicit orthonormal complement of the ones vector e:
///   h_i = -(1/sqrt(i(i+1))) sum_{k<=i} e_k + (sqrt(i)/sqrt(i+1)) e_{i+1}.
/// Satisfies H H^T = I - (1/n) e e^T.
inline MatrixXd ones_complement_basis(int n) {
  if (n < 2) throw dimension_error("ones_complement_basis: need dimension >= 2");
  MatrixXd h = MatrixXd::Zero(n, n - 1);
  for (int i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    const double head = -1.0 / std::sqrt(di * (di + 1.0));
    for (int k = 0; k < i; ++k) h(k, i - 1) = head;
    h(i, i - 1) = std::sqrt(di) / std::sqrt(di + 1.0);
  }
  return h;
}

/// Hyperplane {x : a^T x = alpha} together with a basis H of the complement
/// of a, so that the affine form is {x0 + H z}.
class Hyperplane {
 public:
  Hyperplane(VectorXd a, double alpha)
      : normal_(std::move(a)), offset_(alpha), basis_(complementary_basis(normal_)) {}

  /// Attach a caller-supplied complement basis (columns need not be
  /// orthonormal, only independent and orthogonal to the normal).
  Hyperplane(VectorXd a, double alpha, MatrixXd basis)
      : normal_(std::move(a)), offset_(alpha), basis_(std::move(basis)) {
    const int n = dim();
    if (basis_.rows() != n || basis_.cols() != n - 1)
      throw dimension_error("Hyperplane: basis must be n x (n-1)");
    for (int j = 0; j < basis_.cols(); ++j) {
      const double dot = std::abs(normal_.dot(basis_.col(j)));
      if (dot > 1e-12 * normal_.norm() * basis_.col(j).norm())
        throw invalid_input("Hyperplane: basis column not orthogonal to normal");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(basis_);
    if (qr.rank() != n - 1)
      throw invalid_input("Hyperplane: basis columns are linearly dependent");
  }

  static Hyperplane through_point(VectorXd a, const VectorXd& x0) {
    const double alpha = a.dot(x0);
    return Hyperplane(std::move(a), alpha);
  }

  int dim() const { return static_cast<int>(normal_.size()); }
  const VectorXd& normal() const { return normal_; }
  double offset() const { return offset_; }
  const MatrixXd& basis() const { return basis_; }

  bool contains(const VectorXd& x, double tol = 1e-10) const {
    return std::abs(normal_.dot(x) - offset_) <= tol * (1.0 + std::abs(offset_));
  }

 private:
  VectorXd normal_;
  double offset_;
  MatrixXd basis_;
};

/// dist(x, {a^T y = alpha}) = |a^T x - alpha| / |a|.
inline double distance_to_hyperplane(const VectorXd& x, const Hyperplane& plane) {
  if (x.size() != plane.dim()) throw dimension_error("distance_to_hyperplane: size mismatch");
  return std::abs(plane.normal().dot(x) - plane.offset()) / plane.normal().norm();
}

/// Dikin ellipsoid {x : (x-c)^T C^-2 (x-c) <= 1} with C = diag(c), c > 0.
/// Contained in the nonnegative orthant: every member has 0 <= x_i <= 2 c_i.
class DikinEllipsoid {
 public:
  explicit DikinEllipsoid(VectorXd c) : center_(std::move(c)) {
    if (center_.size() < 1 || !center_.allFinite())
      throw invalid_input("DikinEllipsoid: center must be finite and nonempty");
    if ((center_.array() <= 0.0).any())
      throw invalid_input("DikinEllipsoid: center entries must be strictly positive");
  }

  int dim() const { return static_cast<int>(center_.size()); }
  const VectorXd& center() const { return center_; }

  /// D = C^-2, the matrix of the defining quadratic.
  MatrixXd quadratic_matrix() const {
    return center_.array().square().inverse().matrix().asDiagonal();
  }

  /// (x-c)^T C^-2 (x-c); membership is level(x) <= 1.
  double level(const VectorXd& x) const {
    return ((x - center_).array() / center_.array()).square().sum();
  }

  bool contains(const VectorXd& x, double tol = 1e-12) const {
    return level(x) <= 1.0 + tol;
  }

 private:
  VectorXd center_;
};

/// General ellipsoid {x : x^T Q x + 2 p^T x + rho <= 1} with Q > 0 and
/// rho = p^T Q^{-1} p, so the set is (x-m)^T Q (x-m) <= 1 at m = -Q^{-1} p.
class Ellipsoid {
 public:
  Ellipsoid(MatrixXd q, VectorXd p) : q_(std::move(q)), p_(std::move(p)) {
    validate_shape();
    rho_ = p_.dot(q_.ldlt().solve(p_));
  }

  Ellipsoid(MatrixXd q, VectorXd p, double rho) : q_(std::move(q)), p_(std::move(p)), rho_(rho) {
    validate_shape();
    const double consistent = p_.dot(q_.ldlt().solve(p_));
    if (std::abs(rho_ - consistent) > 1e-10 * std::max(1.0, std::abs(consistent)))
      throw invalid_input("Ellipsoid: rho must equal p^T Q^-1 p");
  }

  int dim() const { return static_cast<int>(p_.size()); }
  const MatrixXd& gram() const { return q_; }
  const VectorXd& shift() const { return p_; }
  double rho() const { return rho_; }
  VectorXd center() const { return -q_.ldlt().solve(p_); }

  double level(const VectorXd& x) const { return x.dot(q_ * x) + 2.0 * p_.dot(x) + rho_; }
  bool contains(const VectorXd& x, double tol = 1e-12) const { return level(x) <= 1.0 + tol; }

 private:
  void validate_shape() {
    if (q_.rows() != q_.cols() || q_.rows() != p_.size())
      throw dimension_error("Ellipsoid: Q must be square and match p");
    if (!detail::is_symmetric(q_)) throw invalid_input("Ellipsoid: Q must be symmetric");
    Eigen::LDLT<MatrixXd> ldlt(q_);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw invalid_input("Ellipsoid: Q must be positive definite");
  }

  MatrixXd q_;
  VectorXd p_;
  double rho_;
};

/// Center slice of a Dikin ellipsoid by a hyperplane through c: the set
/// {c + H z : z^T G z <= 1} with Gram matrix G = H^T C^-2 H.
class EllipsoidSlice {
 public:
  EllipsoidSlice(VectorXd anchor, MatrixXd basis, MatrixXd gram)
      : anchor_(std::move(anchor)), basis_(std::move(basis)), gram_(std::move(gram)) {}

  int ambient_dim() const { return static_cast<int>(anchor_.size()); }
  const VectorXd& anchor() const { return anchor_; }
  const MatrixXd& basis() const { return basis_; }
  const MatrixXd& gram() const { return gram_; }

  VectorXd point(const VectorXd& z) const { return anchor_ + basis_ * z; }
  double level(const VectorXd& z) const { return z.dot(gram_ * z); }

 private:
  VectorXd anchor_;
  MatrixXd basis_;
  MatrixXd gram_;
};

/// Slice a Dikin ellipsoid by a hyperplane through its center.
inline EllipsoidSlice slice(const DikinEllipsoid& ed, const Hyperplane& plane) {
  if (plane.dim() != ed.dim()) throw dimension_error("slice: dimension mismatch");
  const double gap = std::abs(plane.normal().dot(ed.center()) - plane.offset());
  if (gap > 1e-10 * (1.0 + std::abs(plane.offset())))
    throw precondition_error("slice: hyperplane does not pass through the center");
  const MatrixXd d = ed.quadratic_matrix();
  MatrixXd gram = plane.basis().transpose() * d * plane.basis();
  gram = 0.5 * (gram + gram.transpose());
  return EllipsoidSlice(ed.center(), plane.basis(), std::move(gram));
}

/// Deterministic boundary samples of a Dikin ellipsoid: x = c + C u with u
/// uniform on the unit sphere.
inline std::vector<VectorXd> sample_boundary(const DikinEllipsoid& ed, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw invalid_input("sample_boundary: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<VectorXd> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const VectorXd u = detail::unit_sphere_direction(rng, ed.dim());
    pts.push_back(ed.center() + ed.center().cwiseProduct(u));
  }
  return pts;
}

/// Boundary samples of a slice, returned as ambient points c + H z with
/// z^T G z = 1. Directions are mapped through G^{-1/2}.
inline std::vector<VectorXd> sample_boundary(const EllipsoidSlice& sl, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw invalid_input("sample_boundary: count must be >= 1");
  const MatrixXd g_isqrt = detail::inverse_sqrt_spd(sl.gram(), "sample_boundary");
  std::mt19937_64 rng(seed);
  std::vector<VectorXd> pts;
  pts.reserve(count);
  const int m = static_cast<int>(sl.gram().rows());
  for (int k = 0; k < count; ++k) {
    const VectorXd u = detail::unit_sphere_direction(rng, m);
    pts.push_back(sl.point(g_isqrt * u));
  }
  return pts;
}

/// Boundary samples of a general ellipsoid: x = m + Q^{-1/2} u.
inline std::vector<VectorXd> sample_boundary(const Ellipsoid& e, int count, std::uint64_t seed) {
  if (count < 1) throw invalid_input("sample_boundary: count must be >= 1");
  const MatrixXd q_isqrt = detail::inverse_sqrt_spd(e.gram(), "sample_boundary");
  const VectorXd m = e.center();
  std::mt19937_64 rng(seed);
  std::vector<VectorXd> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const VectorXd u = detail::unit_sphere_direction(rng, e.dim());
    pts.push_back(m + q_isqrt * u);
  }
  return pts;
}

}  // namespace lcone
