#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "lcone/cone.hpp"
#include "lcone/errors.hpp"
#include "lcone/geometry.hpp"

namespace lcone {

/// Continuous-time linear dynamics dx/dt = A x.
class LinearSystem {
 public:
  explicit LinearSystem(MatrixXd a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols() || a_.rows() < 1)
      throw dimension_error("LinearSystem: matrix must be square");
    if (!a_.allFinite()) throw invalid_input("LinearSystem: matrix entries must be finite");
  }

  int dim() const { return static_cast<int>(a_.rows()); }
  const MatrixXd& matrix() const { return a_; }

 private:
  MatrixXd a_;
};

/// A boundary point whose outward drift exceeded tolerance, with the value
/// of <Ax, Qx> there.
struct Counterexample {
  VectorXd point;
  double inner_product;
};

/// Outcome of the scalar search for S(a) = QA + A^T Q + a Q <= 0.
struct InvarianceCertificate {
  bool feasible = false;
  double a_star = 0.0;      ///< minimizer of lambda_max(S(a))
  double lambda_max = 0.0;  ///< minimum value reached
  double tolerance = 0.0;   ///< threshold the minimum was compared against
  std::pair<double, double> bracket{0.0, 0.0};  ///< interval handed to the line search
  std::optional<Counterexample> counterexample;
};

namespace detail {

/// f(a) = lambda_max(S0 + a Q): convex in a (pointwise supremum of affine
/// functions) and coercive whenever Q is indefinite.
struct SpectralAbscissa {
  const MatrixXd& q;
  MatrixXd s0;

  explicit SpectralAbscissa(const LinearSystem& system, const MatrixXd& q_in)
      : q(q_in), s0(q_in * system.matrix() + system.matrix().transpose() * q_in) {
    s0 = 0.5 * (s0 + s0.transpose()).eval();
  }

  double operator()(double a) const {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s0 + a * q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("certify: eigensolver failed");
    return es.eigenvalues().maxCoeff();
  }
};

/// Minimize a convex coercive scalar function: expand a three-point bracket
/// outward from [-1, 1] (doubling the step) until the middle value is no
/// worse than both ends, then contract by golden-section until the bracket
/// width falls below 1e-10 relative to the iterate magnitude.
template <typename F>
std::pair<double, double> minimize_convex(const F& f, double* bracket_lo, double* bracket_hi) {
  double a = -1.0, b = 0.0, c = 1.0;
  double fa = f(a), fb = f(b), fc = f(c);
  double step = 1.0;
  for (int guard = 0; guard < 400 && (fb > fa || fb > fc); ++guard) {
    step *= 2.0;
    if (fa < fb) {
      c = b; fc = fb; b = a; fb = fa; a = b - step; fa = f(a);
    } else {
      a = b; fa = fb; b = c; fb = fc; c = b + step; fc = f(c);
    }
  }
  if (bracket_lo != nullptr) *bracket_lo = a;
  if (bracket_hi != nullptr) *bracket_hi = c;

  double best_x = b, best_f = fb;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = c - invphi * (c - a);
  double x2 = a + invphi * (c - a);
  double f1 = f(x1), f2 = f(x2);
  while (c - a > 1e-10 * (1.0 + std::max(std::abs(a), std::abs(c)))) {
    if (f1 <= f2) {
      c = x2; x2 = x1; f2 = f1; x1 = c - invphi * (c - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2; x2 = a + invphi * (c - a); f2 = f(x2);
    }
    if (f1 < best_f) { best_f = f1; best_x = x1; }
    if (f2 < best_f) { best_f = f2; best_x = x2; }
  }
  return {best_x, best_f};
}

inline void check_cone_inputs(const LinearSystem& system, const MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || system.dim() != n)
    throw dimension_error("certify_cone: system and cone dimensions differ");
  if (!q.allFinite()) throw invalid_input("certify_cone: cone matrix entries must be finite");
  const Inertia in = inertia(q);
  if (in.positive != n - 1 || in.zero != 0 || in.negative != 1)
    throw precondition_error("certify_cone: matrix does not define a Lorenz cone");
}

}  // namespace detail

/// Decide whether the cone {x^T Q x <= 0} is positively invariant for
/// dx/dt = Ax by minimizing f(a) = lambda_max(QA + A^T Q + a Q) over the
/// real line: invariance holds iff the minimum is <= 0 (within tolerance).
/// Default tolerance scales with the problem data and admits the exact-zero
/// degenerate optimum.
inline InvarianceCertificate certify_cone(const LinearSystem& system, const MatrixXd& q,
                                          std::optional<double> tol = {}) {
  detail::check_cone_inputs(system, q);
  const detail::SpectralAbscissa f(system, q);

  InvarianceCertificate cert;
  const auto [a_star, f_star] =
      detail::minimize_convex(f, &cert.bracket.first, &cert.bracket.second);
  cert.a_star = a_star;
  cert.lambda_max = f_star;
  cert.tolerance =
      tol ? *tol : 1e-9 * std::max(1.0, f.s0.norm() + std::abs(a_star) * q.norm());
  cert.feasible = f_star <= cert.tolerance;
  return cert;
}

/// Ellipsoid counterpart: {x^T P x <= 1} with P > 0 is invariant iff
/// lambda_max(A^T P + P A) <= 0; no scalar search is needed.
inline InvarianceCertificate certify_ellipsoid(const LinearSystem& system, const MatrixXd& p,
                                               std::optional<double> tol = {}) {
  const int n = static_cast<int>(p.rows());
  if (p.cols() != n || system.dim() != n)
    throw dimension_error("certify_ellipsoid: system and set dimensions differ");
  if (!p.allFinite()) throw invalid_input("certify_ellipsoid: matrix entries must be finite");
  const double scale = p.cwiseAbs().maxCoeff();
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw precondition_error("certify_ellipsoid: matrix must be symmetric positive definite");
  Eigen::LDLT<MatrixXd> ldlt(p);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw precondition_error("certify_ellipsoid: matrix must be symmetric positive definite");

  MatrixXd s = system.matrix().transpose() * p + p * system.matrix();
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numeric_error("certify_ellipsoid: eigensolver failed");

  InvarianceCertificate cert;
  cert.lambda_max = es.eigenvalues().maxCoeff();
  cert.tolerance = tol ? *tol : 1e-9 * std::max(1.0, s.norm());
  cert.feasible = cert.lambda_max <= cert.tolerance;
  return cert;
}

/// Boundary scan for outward drift.
struct NagumoScan {
  double worst_value = 0.0;  ///< max of <Ax, Qx> over the sampled boundary
  VectorXd worst_point;
  int samples = 0;
  double tolerance = 0.0;
  std::optional<Counterexample> counterexample;  ///< set iff worst_value > tolerance
};

/// Sample the cone boundary branch (x^T Q x = 0, on the cone's branch side)
/// and evaluate the flow/normal inner product <Ax, Qx> at each unit-norm
/// sample. Directions are drawn in the positive eigenspace and completed
/// along the negative eigenvector to land exactly on the double cone;
/// deterministic for a fixed seed.
inline NagumoScan nagumo_falsify(const LinearSystem& system, const LorenzCone& cone,
                                 int samples, std::uint64_t seed,
                                 std::optional<double> tol = {}) {
  if (samples < 1) throw invalid_input("nagumo_falsify: need at least one sample");
  const MatrixXd& q = cone.matrix();
  const int n = cone.dim();
  if (system.dim() != n) throw dimension_error("nagumo_falsify: dimension mismatch");
  if (n < 2) throw dimension_error("nagumo_falsify: need dimension >= 2");
  if (cone.shift().norm() != 0.0)
    throw precondition_error("nagumo_falsify: cone vertex must sit at the origin");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
  if (es.info() != Eigen::Success) throw numeric_error("nagumo_falsify: eigensolver failed");
  if (es.eigenvalues()[0] >= 0.0 || es.eigenvalues()[1] <= 0.0)
    throw precondition_error("nagumo_falsify: matrix does not define a Lorenz cone");
  const VectorXd axis = es.eigenvectors().col(0);  // negative-eigenvalue direction
  const double lam_neg = es.eigenvalues()[0];
  const VectorXd hint = cone.axis_hint() ? *cone.axis_hint() : axis;

  MatrixXd drift = system.matrix().transpose() * q + q * system.matrix();
  drift = 0.5 * (drift + drift.transpose()).eval();

  NagumoScan scan;
  scan.samples = samples;
  scan.tolerance = tol ? *tol : 1e-8;
  scan.worst_value = -std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const VectorXd alpha = detail::unit_sphere_direction(rng, n - 1);
    double radial = 0.0;
    VectorXd x = VectorXd::Zero(n);
    for (int j = 1; j < n; ++j) {
      x += alpha[j - 1] * es.eigenvectors().col(j);
      radial += es.eigenvalues()[j] * alpha[j - 1] * alpha[j - 1];
    }
    const double t = std::sqrt(radial / -lam_neg);
    VectorXd candidate = x + t * axis;
    if (hint.dot(candidate) < 0.0) candidate = x - t * axis;
    candidate /= candidate.norm();

    const double value = candidate.dot(drift * candidate);
    if (value > scan.worst_value) {
      scan.worst_value = value;
      scan.worst_point = candidate;
    }
  }
  if (scan.worst_value > scan.tolerance)
    scan.counterexample = Counterexample{scan.worst_point, scan.worst_value};
  return scan;
}

enum class StepMode { rk4, matrix_exponential };

/// Fixed-step trajectory of dx/dt = Ax checked against a containment
/// quadratic (membership means q(x) <= 0 up to the boundary band).
struct TrajectoryRecord {
  VectorXd initial;
  double step = 0.0;
  double horizon = 0.0;
  int steps = 0;
  /// Max over steps of the membership defect q(x)/(1 + |x|^2), clamped below
  /// at 0. Normalizing keeps the measure comparable along trajectories whose
  /// magnitude grows or shrinks exponentially.
  double max_violation = 0.0;
  bool exited = false;
  std::optional<double> first_exit_time;
};

namespace detail {

template <typename LevelFn>
TrajectoryRecord simulate_level(const LinearSystem& system, LevelFn&& level, const VectorXd& x0,
                                double h, double horizon, StepMode mode) {
  if (!(h > 0.0) || !(horizon > 0.0))
    throw invalid_input("simulate: step and horizon must be positive");
  if (x0.size() != system.dim()) throw dimension_error("simulate: initial point size mismatch");
  if (!x0.allFinite()) throw invalid_input("simulate: initial point must be finite");

  const auto band = [](const VectorXd& x) { return 1e-10 * (1.0 + x.squaredNorm()); };
  if (level(x0) > band(x0))
    throw precondition_error("simulate: initial point is not a member of the set");

  TrajectoryRecord record;
  record.initial = x0;
  record.step = h;
  record.horizon = horizon;
  record.steps = static_cast<int>(std::ceil(horizon / h - 1e-12));

  const MatrixXd& a = system.matrix();
  MatrixXd propagator;
  if (mode == StepMode::matrix_exponential) {
    const MatrixXd scaled = a * h;
    propagator = scaled.exp();
  }

  VectorXd x = x0;
  for (int k = 1; k <= record.steps; ++k) {
    if (mode == StepMode::rk4) {
      const VectorXd k1 = a * x;
      const VectorXd k2 = a * (x + 0.5 * h * k1);
      const VectorXd k3 = a * (x + 0.5 * h * k2);
      const VectorXd k4 = a * (x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      x = propagator * x;
    }
    if (!x.allFinite()) throw numeric_error("simulate: trajectory diverged to non-finite values");
    const double defect = level(x) / (1.0 + x.squaredNorm());
    record.max_violation = std::max(record.max_violation, defect);
    if (!record.exited && defect > 1e-10) {
      record.exited = true;
      record.first_exit_time = k * h;
    }
  }
  record.max_violation = std::max(record.max_violation, 0.0);
  return record;
}

}  // namespace detail

inline TrajectoryRecord simulate(const LinearSystem& system, const LorenzCone& cone,
                                 const VectorXd& x0, double h, double horizon,
                                 StepMode mode = StepMode::rk4) {
  return detail::simulate_level(
      system, [&](const VectorXd& x) { return cone.quadratic(x); }, x0, h, horizon, mode);
}

inline TrajectoryRecord simulate(const LinearSystem& system, const ConeConstruction& cc,
                                 const VectorXd& x0, double h, double horizon,
                                 StepMode mode = StepMode::rk4) {
  return detail::simulate_level(
      system, [&](const VectorXd& x) { return cc.quadratic(x); }, x0, h, horizon, mode);
}

inline TrajectoryRecord simulate(const LinearSystem& system, const StandardLorenzCone& sc,
                                 const VectorXd& x0, double h, double horizon,
                                 StepMode mode = StepMode::rk4) {
  return detail::simulate_level(
      system, [&](const VectorXd& x) { return sc.quadratic(x); }, x0, h, horizon, mode);
}

inline TrajectoryRecord simulate(const LinearSystem& system, const Ellipsoid& ellipsoid,
                                 const VectorXd& x0, double h, double horizon,
                                 StepMode mode = StepMode::rk4) {
  return detail::simulate_level(
      system, [&](const VectorXd& x) { return ellipsoid.level(x) - 1.0; }, x0, h, horizon,
      mode);
}

/// Tabulate f(a) = lambda_max(QA + A^T Q + a Q) on an explicit grid; the
/// values trace the convex profile the certificate search minimizes.
inline std::vector<std::pair<double, double>> certificate_scan(const LinearSystem& system,
                                                               const MatrixXd& q,
                                                               const std::vector<double>& a_grid) {
  if (a_grid.empty()) throw invalid_input("certificate_scan: grid must be nonempty");
  detail::check_cone_inputs(system, q);
  const detail::SpectralAbscissa f(system, q);
  std::vector<std::pair<double, double>> table;
  table.reserve(a_grid.size());
  for (double a : a_grid) table.emplace_back(a, f(a));
  return table;
}

}  // namespace lcone
