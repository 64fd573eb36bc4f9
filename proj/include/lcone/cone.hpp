#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>

#include "lcone/errors.hpp"
#include "lcone/geometry.hpp"
#include "lcone/spectral.hpp"

namespace lcone {

/// Residuals of the three identities a valid base-plane construction must
/// satisfy: the complement block of Q matches the base quadratic, the center
/// row of Q is orthogonal to the plane, and the center value equals -beta.
struct ConditionResiduals {
  double basis_block;   ///< |H^T D H - H^T Q H|_F
  double cross_term;    ///< |H^T Q c|_2
  double center_value;  ///< |c^T Q c + beta|

  double max() const { return std::max({basis_block, cross_term, center_value}); }
  bool within(double tol) const { return max() <= tol; }
};

/// The canonical cone x_1^2 + ... + x_{n-1}^2 <= x_n^2, x_n >= 0.
class StandardLorenzCone {
 public:
  explicit StandardLorenzCone(int n) : n_(n) {
    if (n < 2) throw dimension_error("StandardLorenzCone: need dimension >= 2");
  }

  int dim() const { return n_; }

  MatrixXd matrix() const {
    VectorXd d = VectorXd::Ones(n_);
    d[n_ - 1] = -1.0;
    return d.asDiagonal();
  }

  double quadratic(const VectorXd& x) const {
    if (x.size() != n_) throw dimension_error("StandardLorenzCone: size mismatch");
    return x.head(n_ - 1).squaredNorm() - x[n_ - 1] * x[n_ - 1];
  }

 private:
  int n_;
};

/// Cone {x : x^T Q x + 2 p^T x + rho <= 0} for symmetric Q with exactly one
/// negative eigenvalue and none at zero. The optional axis hint is a unit
/// vector selecting one of the two branches (measured from the vertex).
class LorenzCone {
 public:
  LorenzCone(MatrixXd q, VectorXd p, double rho, std::optional<VectorXd> axis_hint = {})
      : q_(std::move(q)), p_(std::move(p)), rho_(rho), axis_hint_(std::move(axis_hint)) {
    const int n = static_cast<int>(q_.rows());
    if (q_.cols() != n || p_.size() != n)
      throw dimension_error("LorenzCone: Q must be square and match p");
    if (!q_.allFinite() || !p_.allFinite() || !std::isfinite(rho_))
      throw invalid_input("LorenzCone: entries must be finite");
    const double scale = q_.cwiseAbs().maxCoeff();
    if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
      throw invalid_input("LorenzCone: Q must be symmetric");
    const Inertia in = inertia(q_);
    if (in.negative != 1 || in.zero != 0)
      throw precondition_error("LorenzCone: Q must have exactly one negative and no zero eigenvalue");
    vertex_ = -q_.partialPivLu().solve(p_);
    const double consistent = p_.dot(-vertex_);
    if (std::abs(rho_ - consistent) > 1e-8 * std::max(1.0, std::abs(consistent)))
      throw invalid_input("LorenzCone: rho must equal p^T Q^-1 p");
    if (axis_hint_) {
      if (axis_hint_->size() != n) throw dimension_error("LorenzCone: axis hint size mismatch");
      const double nrm = axis_hint_->norm();
      if (!(nrm > 0.0)) throw invalid_input("LorenzCone: axis hint must be nonzero");
      *axis_hint_ /= nrm;
    }
  }

  static LorenzCone standard(int n) {
    StandardLorenzCone sc(n);
    VectorXd hint = VectorXd::Zero(n);
    hint[n - 1] = 1.0;
    return LorenzCone(sc.matrix(), VectorXd::Zero(n), 0.0, hint);
  }

  int dim() const { return static_cast<int>(q_.rows()); }
  const MatrixXd& matrix() const { return q_; }
  const VectorXd& shift() const { return p_; }
  double rho() const { return rho_; }
  const std::optional<VectorXd>& axis_hint() const { return axis_hint_; }
  const VectorXd& vertex() const { return vertex_; }

  double quadratic(const VectorXd& x) const {
    if (x.size() != dim()) throw dimension_error("LorenzCone: size mismatch");
    return x.dot(q_ * x) + 2.0 * p_.dot(x) + rho_;
  }

 private:
  MatrixXd q_;
  VectorXd p_;
  double rho_;
  std::optional<VectorXd> axis_hint_;
  VectorXd vertex_;
};

namespace detail {

inline ConditionResiduals condition_residuals(const MatrixXd& q, const MatrixXd& d,
                                              const Hyperplane& plane, const VectorXd& c,
                                              double beta) {
  const MatrixXd& h = plane.basis();
  const MatrixXd block = h.transpose() * d * h - h.transpose() * q * h;
  const VectorXd qc = q * c;
  return {block.norm(), (h.transpose() * qc).norm(), std::abs(c.dot(qc) + beta)};
}

}  // namespace detail

/// A cone produced from an ellipsoidal base: the matrix Q (vertex at the
/// origin, so the cone is {x : x^T Q x <= 0} on the recorded branch),
/// together with the base data and the residuals of the construction
/// identities. gamma is the overall scaling of Q and beta = -c^T Q c; both
/// are 1 for every base-through-center construction, while the
/// sphere-tangent path has beta = |c|^2/(|c|^2 - 1).
class ConeConstruction {
 public:
  ConeConstruction(MatrixXd q, std::optional<DikinEllipsoid> source, Hyperplane plane,
                   VectorXd base_center, double beta)
      : q_(std::move(q)),
        source_(std::move(source)),
        plane_(std::move(plane)),
        base_center_(std::move(base_center)),
        beta_(beta) {
    const int n = static_cast<int>(q_.rows());
    if (q_.cols() != n || plane_.dim() != n || base_center_.size() != n)
      throw dimension_error("ConeConstruction: inconsistent dimensions");
    const Inertia in = inertia(q_);
    if (in.positive != n - 1 || in.zero != 0 || in.negative != 1)
      throw numeric_error("ConeConstruction: matrix does not have cone inertia");
    const double side = plane_.normal().dot(base_center_);
    axis_hint_ = plane_.normal() * (side >= 0.0 ? 1.0 : -1.0) / plane_.normal().norm();
    diagnostics_ = detail::condition_residuals(q_, base_quadratic(), plane_, base_center_, beta_);
    if (!diagnostics_.within(1e-9 * std::max(1.0, q_.norm())))
      throw numeric_error("ConeConstruction: construction identities violated");
  }

  int dim() const { return static_cast<int>(q_.rows()); }
  const MatrixXd& matrix() const { return q_; }
  double gamma() const { return 1.0; }
  double beta() const { return beta_; }
  const std::optional<DikinEllipsoid>& source() const { return source_; }
  const Hyperplane& plane() const { return plane_; }
  const VectorXd& base_center() const { return base_center_; }
  const VectorXd& axis_hint() const { return axis_hint_; }
  const ConditionResiduals& diagnostics() const { return diagnostics_; }

  /// Quadratic of the base set: C^-2 for a Dikin base, identity for the
  /// unit tangent sphere.
  MatrixXd base_quadratic() const {
    return source_ ? source_->quadratic_matrix() : MatrixXd::Identity(dim(), dim()).eval();
  }

  LorenzCone cone() const {
    return LorenzCone(q_, VectorXd::Zero(dim()), 0.0, axis_hint_);
  }

  double quadratic(const VectorXd& x) const {
    if (x.size() != dim()) throw dimension_error("ConeConstruction: size mismatch");
    return x.dot(q_ * x);
  }

 private:
  MatrixXd q_;
  std::optional<DikinEllipsoid> source_;
  Hyperplane plane_;
  VectorXd base_center_;
  double beta_;
  VectorXd axis_hint_;
  ConditionResiduals diagnostics_;
};

/// Cone over the slice of a Dikin ellipsoid by an arbitrary plane through
/// its center:
///   Q = D - ((1 + c^T Dt c)/(c^T a)^2) a a^T
///         - (1/(c^T a)) (a c^T D Ht + Ht D c a^T),
/// with D = C^-2, Ht the projector onto the plane's direction space, and
/// Dt = D - (D Ht + Ht D). The vertex lands at the origin and the base
/// plane must not contain the origin direction (|a^T c| bounded away from 0).
inline ConeConstruction construct_general(const DikinEllipsoid& ed, const Hyperplane& plane) {
  const int n = ed.dim();
  if (plane.dim() != n) throw dimension_error("construct_general: dimension mismatch");
  const VectorXd& a = plane.normal();
  const VectorXd& c = ed.center();
  if (std::abs(a.dot(c) - plane.offset()) > 1e-10 * (1.0 + std::abs(plane.offset())))
    throw precondition_error("construct_general: plane does not pass through the base center");
  const double alpha = a.dot(c);
  if (std::abs(alpha) <= 1e-10 * a.norm() * c.norm())
    throw precondition_error("construct_general: plane normal orthogonal to center, vertex escapes to infinity");

  const MatrixXd d = ed.quadratic_matrix();
  const MatrixXd& h = plane.basis();
  const MatrixXd gram = h.transpose() * h;
  const MatrixXd projector = h * gram.ldlt().solve(h.transpose());
  const MatrixXd dt = d - (d * projector + projector * d);
  const VectorXd w = projector * (d * c);
  const double kappa = (1.0 + c.dot(dt * c)) / (alpha * alpha);

  MatrixXd q = d - kappa * (a * a.transpose()) -
               (a * w.transpose() + w * a.transpose()) / alpha;
  q = 0.5 * (q + q.transpose());
  return ConeConstruction(std::move(q), ed, plane, c, 1.0);
}

/// Cone over the slice by the plane through c normal to coordinate axis
/// `axis` (zero-based), in closed form: diagonal 1/c_j^2 except
/// (n-2)/c_i^2 at the axis, and -1/(c_i c_j) couplings along its row and
/// column. Exactly an arrowhead after moving `axis` to the front.
inline ConeConstruction construct_axis(const VectorXd& c, int axis) {
  const int n = static_cast<int>(c.size());
  DikinEllipsoid ed(c);
  if (axis < 0 || axis >= n) throw dimension_error("construct_axis: axis out of range");

  MatrixXd q = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) q(j, j) = 1.0 / (c[j] * c[j]);
  q(axis, axis) += (n - 3) / (c[axis] * c[axis]);
  for (int j = 0; j < n; ++j) {
    if (j == axis) continue;
    q(axis, j) = -1.0 / (c[axis] * c[j]);
    q(j, axis) = q(axis, j);
  }

  VectorXd normal = VectorXd::Zero(n);
  normal[axis] = 1.0;
  Hyperplane plane(normal, c[axis]);
  return ConeConstruction(std::move(q), std::move(ed), std::move(plane), c, 1.0);
}

/// Cone over the slice by the plane through c normal to the ones vector:
///   Q_ij = delta_ij / c_i^2 + (n-1)/(e^T c)^2 - (1/(e^T c)) (1/c_i + 1/c_j).
inline ConeConstruction construct_ones(const VectorXd& c) {
  const int n = static_cast<int>(c.size());
  DikinEllipsoid ed(c);
  if (n < 2) throw dimension_error("construct_ones: need dimension >= 2");

  const double total = c.sum();
  MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q(i, j) = (n - 1) / (total * total) - (1.0 / c[i] + 1.0 / c[j]) / total;
      if (i == j) q(i, j) += 1.0 / (c[i] * c[i]);
    }

  Hyperplane plane(VectorXd::Ones(n), total, ones_complement_basis(n));
  return ConeConstruction(std::move(q), std::move(ed), std::move(plane), c, 1.0);
}

/// Cone with vertex at the origin tangent to the unit sphere centered at c:
/// Q = I - c c^T / (|c|^2 - 1). The tangency circle lies in the plane
/// {x : c^T x = |c|^2 - 1}. Requires the origin strictly outside the
/// sphere, with a guard band against the conditioning pole at |c| = 1.
inline ConeConstruction construct_tangent_sphere(const VectorXd& c) {
  const int n = static_cast<int>(c.size());
  if (n < 2) throw dimension_error("construct_tangent_sphere: need dimension >= 2");
  if (!c.allFinite()) throw invalid_input("construct_tangent_sphere: center must be finite");
  const double gap = c.squaredNorm() - 1.0;
  if (gap <= 0.0)
    throw precondition_error("construct_tangent_sphere: origin inside or on the sphere, no tangent cone");
  if (gap < 1e-8)
    throw precondition_error("construct_tangent_sphere: sphere nearly touches the origin, cone ill-conditioned");

  MatrixXd q = MatrixXd::Identity(n, n) - (c * c.transpose()) / gap;
  q = 0.5 * (q + q.transpose());
  Hyperplane plane(c, gap);
  const double beta = c.squaredNorm() / gap;
  return ConeConstruction(std::move(q), std::nullopt, std::move(plane), c, beta);
}

/// Recompute the construction identities from scratch. A base-through-center
/// construction is valid iff all residuals are <= 1e-9 (beta = 1 there, so
/// the third residual is |c^T Q c + 1|).
inline ConditionResiduals verify_conditions(const ConeConstruction& cc) {
  return detail::condition_residuals(cc.matrix(), cc.base_quadratic(), cc.plane(),
                                     cc.base_center(), cc.beta());
}

/// X split against the frame {a, H}: X = mu a a^T + a z^T H^T + H z a^T.
struct SandwichDecomposition {
  double mu;
  VectorXd z;
  double residual;  ///< Frobenius norm of X minus the reconstruction.
};

/// Recover mu = a^T X a / |a|^4 and z = (H^T H)^{-1} H^T X a / |a|^2 for a
/// symmetric X lying in span{a a^T, a z^T H^T + H z a^T}. Membership in the
/// span is the precondition: the complement block H^T X H must vanish.
inline SandwichDecomposition sandwich_decompose(const MatrixXd& x, const VectorXd& a,
                                                const MatrixXd& h) {
  const int n = static_cast<int>(a.size());
  if (x.rows() != n || x.cols() != n || h.rows() != n || h.cols() != n - 1)
    throw dimension_error("sandwich_decompose: inconsistent dimensions");
  const double xnorm = x.norm();
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, xnorm))
    throw invalid_input("sandwich_decompose: X must be symmetric");
  const double anorm2 = a.squaredNorm();
  if (!(anorm2 > 0.0)) throw invalid_input("sandwich_decompose: a must be nonzero");
  if ((h.transpose() * x * h).norm() > 1e-8 * xnorm)
    throw precondition_error("sandwich_decompose: X has mass outside span{aa^T, az^TH^T + Hza^T}");

  const double mu = a.dot(x * a) / (anorm2 * anorm2);
  const MatrixXd gram = h.transpose() * h;
  const VectorXd z = gram.ldlt().solve(h.transpose() * (x * a)) / anorm2;
  const MatrixXd rebuilt = mu * (a * a.transpose()) +
                           a * (h * z).transpose() + (h * z) * a.transpose();
  return {mu, z, (x - rebuilt).norm()};
}

/// Nonsingular P with shift s defining the affine change of coordinates
/// y = P^{-1} x + s that carries a cone (or ellipsoid) onto its standard
/// form; the quadratic is preserved exactly: q(x) = q_std(map(x)).
class StandardizingTransform {
 public:
  StandardizingTransform(MatrixXd p, VectorXd shift)
      : p_(std::move(p)), shift_(std::move(shift)) {
    if (p_.rows() != p_.cols() || p_.rows() != shift_.size())
      throw dimension_error("StandardizingTransform: inconsistent dimensions");
    Eigen::FullPivLU<MatrixXd> lu(p_);
    if (!lu.isInvertible())
      throw invalid_input("StandardizingTransform: matrix must be nonsingular");
    p_inv_ = lu.inverse();
  }

  const MatrixXd& matrix() const { return p_; }
  const MatrixXd& inverse() const { return p_inv_; }
  const VectorXd& shift() const { return shift_; }

  VectorXd map(const VectorXd& x) const { return p_inv_ * x + shift_; }
  VectorXd unmap(const VectorXd& y) const { return p_ * (y - shift_); }

 private:
  MatrixXd p_;
  MatrixXd p_inv_;
  VectorXd shift_;
};

/// Congruence P = U diag(1/sqrt|lambda|) with positive eigenpairs ordered
/// first, so P^T Q P = diag(1,...,1,-1); the shift (Q P)^{-1} p completes
/// the affine map onto the standard double cone.
inline StandardizingTransform standardize(const LorenzCone& cone) {
  const MatrixXd& q = cone.matrix();
  const int n = cone.dim();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
  if (es.info() != Eigen::Success) throw numeric_error("standardize: eigensolver failed");

  // Ascending order puts the single negative eigenvalue first; reorder to
  // positives-descending followed by the negative one.
  MatrixXd p(n, n);
  for (int k = 0; k < n - 1; ++k) {
    const int src = n - 1 - k;
    p.col(k) = es.eigenvectors().col(src) / std::sqrt(std::abs(es.eigenvalues()[src]));
  }
  p.col(n - 1) = es.eigenvectors().col(0) / std::sqrt(std::abs(es.eigenvalues()[0]));
  // The congruence is sign-blind, but membership is not: orient the negative
  // column so the recorded branch lands on the y_n >= 0 side.
  if (cone.axis_hint() && es.eigenvectors().col(0).dot(*cone.axis_hint()) < 0.0)
    p.col(n - 1) = -p.col(n - 1);

  const VectorXd shift = (q * p).partialPivLu().solve(cone.shift());
  StandardizingTransform t(std::move(p), shift);

  MatrixXd target = MatrixXd::Identity(n, n);
  target(n - 1, n - 1) = -1.0;
  if ((t.matrix().transpose() * q * t.matrix() - target).cwiseAbs().maxCoeff() > 1e-8)
    throw numeric_error("standardize: congruence did not reach the standard form");
  return t;
}

/// Ellipsoid counterpart: P^T Q P = I and the affine map sends the set onto
/// the unit ball.
inline StandardizingTransform standardize(const Ellipsoid& e) {
  const MatrixXd& q = e.gram();
  const int n = e.dim();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
  if (es.info() != Eigen::Success) throw numeric_error("standardize: eigensolver failed");
  MatrixXd p(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;
    p.col(k) = es.eigenvectors().col(src) / std::sqrt(es.eigenvalues()[src]);
  }
  const VectorXd shift = (q * p).partialPivLu().solve(e.shift());
  return StandardizingTransform(std::move(p), shift);
}

enum class Region { interior, boundary, exterior };

struct Membership {
  Region region;
  double margin;  ///< value of the defining quadratic at the point
};

namespace detail {

inline Membership classify(double q, const VectorXd& rel, const VectorXd* hint) {
  if (hint != nullptr && hint->dot(rel) < -1e-12 * (1.0 + rel.norm()))
    return {Region::exterior, q};
  const double band = 1e-10 * (1.0 + rel.squaredNorm());
  if (q > band) return {Region::exterior, q};
  if (q < -band) return {Region::interior, q};
  return {Region::boundary, q};
}

}  // namespace detail

/// Classify x against the cone: sign of the quadratic within a
/// scale-aware boundary band, intersected with the recorded branch side
/// when an axis hint is present.
inline Membership membership(const LorenzCone& cone, const VectorXd& x) {
  const VectorXd rel = x - cone.vertex();
  const VectorXd* hint = cone.axis_hint() ? &*cone.axis_hint() : nullptr;
  return detail::classify(cone.quadratic(x), rel, hint);
}

inline Membership membership(const ConeConstruction& cc, const VectorXd& x) {
  return detail::classify(cc.quadratic(x), x, &cc.axis_hint());
}

inline Membership membership(const StandardLorenzCone& sc, const VectorXd& x) {
  VectorXd hint = VectorXd::Zero(sc.dim());
  hint[sc.dim() - 1] = 1.0;
  return detail::classify(sc.quadratic(x), x, &hint);
}

}  // namespace lcone
