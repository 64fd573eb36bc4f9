#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "lcone/errors.hpp"

namespace lcone {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Counts of eigenvalues above, inside, and below the zero band.
struct Inertia {
  int positive = 0;
  int zero = 0;
  int negative = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Symmetric matrix that is diagonal outside its first row and column:
///   [ alpha  p^T ]
///   [ p      B   ],  B = diag(b), b sorted descending.
///
/// The constructor sorts the diagonal and permutes the coupling vector to
/// match; the permutation is retained so callers can map back to their
/// original ordering.
class ArrowheadMatrix {
 public:
  ArrowheadMatrix(double alpha, VectorXd p, VectorXd b)
      : alpha_(alpha), p_(std::move(p)), b_(std::move(b)) {
    if (p_.size() != b_.size())
      throw dimension_error("ArrowheadMatrix: coupling and diagonal must have equal length");
    if (!std::isfinite(alpha_) || !p_.allFinite() || !b_.allFinite())
      throw invalid_input("ArrowheadMatrix: entries must be finite");
    perm_.resize(static_cast<std::size_t>(b_.size()));
    std::iota(perm_.begin(), perm_.end(), 0);
    std::stable_sort(perm_.begin(), perm_.end(),
                     [this](int i, int j) { return b_[i] > b_[j]; });
    VectorXd ps(p_.size()), bs(b_.size());
    for (int k = 0; k < b_.size(); ++k) {
      ps[k] = p_[perm_[static_cast<std::size_t>(k)]];
      bs[k] = b_[perm_[static_cast<std::size_t>(k)]];
    }
    p_ = std::move(ps);
    b_ = std::move(bs);
  }

  /// Interpret a dense symmetric matrix as an arrowhead whose arrow sits at
  /// row/column `arrow`; all other off-diagonal entries must vanish.
  static ArrowheadMatrix from_dense(const MatrixXd& m, int arrow = 0) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n || n < 1) throw dimension_error("ArrowheadMatrix: matrix must be square");
    if (arrow < 0 || arrow >= n) throw dimension_error("ArrowheadMatrix: arrow index out of range");
    const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw invalid_input("ArrowheadMatrix: matrix must be symmetric");
    VectorXd p(n - 1), b(n - 1);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (i == arrow) continue;
      for (int j = 0; j < n; ++j) {
        if (j == arrow || j == i) continue;
        if (std::abs(m(i, j)) > 1e-12 * scale)
          throw invalid_input("ArrowheadMatrix: off-diagonal mass outside the arrow row/column");
      }
      p[k] = 0.5 * (m(arrow, i) + m(i, arrow));
      b[k] = m(i, i);
      ++k;
    }
    return ArrowheadMatrix(m(arrow, arrow), std::move(p), std::move(b));
  }

  int dim() const { return static_cast<int>(b_.size()) + 1; }
  double alpha() const { return alpha_; }
  /// Couplings between the arrow entry and each diagonal entry, in the
  /// sorted-diagonal order.
  const VectorXd& coupling() const { return p_; }
  /// Diagonal entries b_1 >= b_2 >= ... >= b_{n-1}.
  const VectorXd& diagonal() const { return b_; }
  /// perm()[k] = position of sorted slot k in the caller's original order.
  const std::vector<int>& permutation() const { return perm_; }

  MatrixXd to_dense() const {
    const int n = dim();
    MatrixXd m = MatrixXd::Zero(n, n);
    m(0, 0) = alpha_;
    for (int k = 0; k < n - 1; ++k) {
      m(0, k + 1) = p_[k];
      m(k + 1, 0) = p_[k];
      m(k + 1, k + 1) = b_[k];
    }
    return m;
  }

 private:
  double alpha_;
  VectorXd p_;
  VectorXd b_;
  std::vector<int> perm_;
};

/// det(lambda I - M) for an arrowhead M, evaluated term-by-term with
/// prefix/suffix products so no division by (lambda - b_j) occurs:
///   (lambda-alpha) prod_k (lambda-b_k) - sum_j p_j^2 prod_{k != j} (lambda-b_k).
inline double arrowhead_charpoly(const ArrowheadMatrix& m, double lambda) {
  const VectorXd& b = m.diagonal();
  const VectorXd& p = m.coupling();
  const int k = static_cast<int>(b.size());
  std::vector<double> pre(static_cast<std::size_t>(k) + 1, 1.0);
  std::vector<double> suf(static_cast<std::size_t>(k) + 1, 1.0);
  for (int i = 0; i < k; ++i) pre[i + 1] = pre[i] * (lambda - b[i]);
  for (int i = k - 1; i >= 0; --i) suf[i] = suf[i + 1] * (lambda - b[i]);
  double value = (lambda - m.alpha()) * pre[static_cast<std::size_t>(k)];
  for (int j = 0; j < k; ++j) value -= p[j] * p[j] * pre[j] * suf[j + 1];
  return value;
}

namespace detail {

/// Rational secular function f(l) = (l - alpha) - sum_k q2_k / (l - d_k),
/// strictly increasing between consecutive poles; its roots are the
/// eigenvalues of the reduced arrowhead (alpha; sqrt(q2); d).
struct SecularFunction {
  double alpha;
  const std::vector<double>& d;
  const std::vector<double>& q2;

  double operator()(double lambda) const {
    double f = lambda - alpha;
    for (std::size_t k = 0; k < d.size(); ++k) f -= q2[k] / (lambda - d[k]);
    return f;
  }
};

/// Bisection for the unique root in (lo, hi). Endpoints may be poles; the
/// loop never evaluates at them and stops at the last representable
/// midpoint, so degenerate brackets collapse to the shared value.
inline double bisect_root(const SecularFunction& f, double lo, double hi) {
  double a = lo;
  double b = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (!(mid > a) || !(mid < b)) return mid;
    if (f(mid) < 0.0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// All n eigenvalues of an arrowhead matrix, sorted descending. Couplings
/// below 1e-14 of the data scale are deflated (their diagonal entries split
/// off exactly), and a group of g equal diagonal entries pins g-1
/// eigenvalues at that value while contributing one pole with the combined
/// coupling. The rest is monotone bisection of the secular function, whose
/// roots strictly interlace the remaining poles.
inline VectorXd arrowhead_eigenvalues(const ArrowheadMatrix& m) {
  const VectorXd& b = m.diagonal();
  const VectorXd& p = m.coupling();
  const int nm1 = static_cast<int>(b.size());
  const int n = nm1 + 1;

  double scale = std::abs(m.alpha());
  for (int i = 0; i < nm1; ++i) scale = std::max({scale, std::abs(b[i]), std::abs(p[i])});
  if (scale == 0.0) return VectorXd::Zero(n);
  const double tiny = 1e-14 * scale;

  std::vector<double> pinned;
  std::vector<double> poles;
  std::vector<double> q2;
  int i = 0;
  while (i < nm1) {
    int j = i;
    double sumsq = 0.0;
    double sum_b = 0.0;
    while (j < nm1 && b[i] - b[j] <= tiny) {
      sumsq += p[j] * p[j];
      sum_b += b[j];
      ++j;
    }
    const int g = j - i;
    const double rep = sum_b / g;
    if (sumsq <= tiny * tiny) {
      for (int k = 0; k < g; ++k) pinned.push_back(b[i + k]);
    } else {
      for (int k = 0; k < g - 1; ++k) pinned.push_back(rep);
      poles.push_back(rep);
      q2.push_back(sumsq);
    }
    i = j;
  }

  std::vector<double> eig;
  eig.reserve(static_cast<std::size_t>(n));
  if (poles.empty()) {
    eig = pinned;
    eig.push_back(m.alpha());
  } else {
    const detail::SecularFunction f{m.alpha(), poles, q2};
    double coupling_sum = 0.0;
    for (double s : q2) coupling_sum += std::sqrt(s);
    double upper = m.alpha() + coupling_sum;
    double lower = m.alpha() - coupling_sum;
    for (std::size_t k = 0; k < poles.size(); ++k) {
      upper = std::max(upper, poles[k] + std::sqrt(q2[k]));
      lower = std::min(lower, poles[k] - std::sqrt(q2[k]));
    }
    eig.push_back(detail::bisect_root(f, poles.front(), upper));
    for (std::size_t k = 1; k < poles.size(); ++k)
      eig.push_back(detail::bisect_root(f, poles[k], poles[k - 1]));
    eig.push_back(detail::bisect_root(f, lower, poles.back()));
    eig.insert(eig.end(), pinned.begin(), pinned.end());
  }

  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return Eigen::Map<const VectorXd>(eig.data(), n);
}

/// Inertia of a symmetric matrix: eigenvalues above +tau, within [-tau,tau],
/// and below -tau, with tau = 1e-10 times the spectral norm (largest
/// eigenvalue magnitude). Scale-invariant by construction.
inline Inertia inertia(const MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || n < 1) throw dimension_error("inertia: matrix must be square");
  const double scale = q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw invalid_input("inertia: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (q + q.transpose()),
                                             Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numeric_error("inertia: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double tau = 1e-10 * lam.cwiseAbs().maxCoeff();
  Inertia result;
  for (int k = 0; k < n; ++k) {
    if (lam[k] > tau)
      ++result.positive;
    else if (lam[k] < -tau)
      ++result.negative;
    else
      ++result.zero;
  }
  return result;
}

/// Determinant of the axis-aligned cone matrix built from a positive center:
/// exactly -prod_k 1/c_k^2, independent of which axis carries the arrow.
inline double det_axis_cone(const VectorXd& c) {
  if (c.size() < 1) throw dimension_error("det_axis_cone: empty center");
  if (!c.allFinite() || (c.array() <= 0.0).any())
    throw invalid_input("det_axis_cone: center entries must be strictly positive");
  double prod = 1.0;
  for (int k = 0; k < c.size(); ++k) prod *= c[k] * c[k];
  return -1.0 / prod;
}

/// det(beta I + alpha e e^T) = beta^n + n alpha beta^{n-1}. The beta = 0
/// case follows by continuity: 0 for n >= 2 (rank-one matrices of that size
/// are singular), alpha for n = 1.
inline double det_identity_plus_rank_one(double beta, double alpha, int n) {
  if (n < 1) throw dimension_error("det_identity_plus_rank_one: dimension must be >= 1");
  if (beta == 0.0) return n >= 2 ? 0.0 : alpha;
  double beta_pow = 1.0;
  for (int k = 0; k < n; ++k) beta_pow *= beta;
  return (1.0 + n * alpha / beta) * beta_pow;
}

/// Bracket for the largest eigenvalue of an axis cone matrix.
struct Lambda1Bounds {
  double lower;
  double upper;
};

/// Closed-form bracket lower <= lambda_1 <= upper for the axis-cone matrix
/// with arrow at `axis` (zero-based). Both expressions share the shape
///   1/2 [ (n-2)/c_i^2 + 1/x^2 + (1/c_i) sqrt(((n-2)/c_i - c_i/x^2)^2
///         + 4 sum_{j != i} 1/c_j^2) ],
/// with x the largest off-axis entry for the lower bound and the smallest
/// for the upper. The two coincide (and are tight) when all off-axis
/// entries are equal.
inline Lambda1Bounds lambda1_bounds_axis_cone(const VectorXd& c, int axis) {
  const int n = static_cast<int>(c.size());
  if (n < 2) throw dimension_error("lambda1_bounds_axis_cone: need dimension >= 2");
  if (axis < 0 || axis >= n) throw dimension_error("lambda1_bounds_axis_cone: axis out of range");
  if (!c.allFinite() || (c.array() <= 0.0).any())
    throw invalid_input("lambda1_bounds_axis_cone: center entries must be strictly positive");

  const double ci = c[axis];
  double c_max = 0.0;
  double c_min = std::numeric_limits<double>::infinity();
  double inv_sq_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == axis) continue;
    c_max = std::max(c_max, c[j]);
    c_min = std::min(c_min, c[j]);
    inv_sq_sum += 1.0 / (c[j] * c[j]);
  }

  const auto value = [&](double cx) {
    const double head = (n - 2) / (ci * ci) + 1.0 / (cx * cx);
    const double gap = (n - 2) / ci - ci / (cx * cx);
    return 0.5 * (head + std::sqrt(gap * gap + 4.0 * inv_sq_sum) / ci);
  };
  return {value(c_max), value(c_min)};
}

/// Eigenvalue structure of the rank-one matrix a c^T.
struct RankOneSpectrum {
  double value;            ///< a^T c, the only possibly-nonzero eigenvalue.
  int value_multiplicity;  ///< 1 when a^T c != 0, else 0.
  int zero_multiplicity;   ///< n-1 when a^T c != 0, else n.
  bool defective;          ///< true iff a^T c == 0 with a, c both nonzero.
};

/// Spectrum of a c^T: a^T c once and 0 with multiplicity n-1. When the
/// vectors are orthogonal the matrix is nilpotent: all eigenvalues vanish
/// and (unless the matrix itself is zero) it is not diagonalizable.
inline RankOneSpectrum rank_one_spectrum(const VectorXd& a, const VectorXd& c) {
  if (a.size() != c.size()) throw dimension_error("rank_one_spectrum: size mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 1) throw dimension_error("rank_one_spectrum: empty vectors");
  if (a.isZero(0.0) && c.isZero(0.0))
    throw invalid_input("rank_one_spectrum: a and c must not both be zero");
  const double dot = a.dot(c);
  if (dot != 0.0) return {dot, 1, n - 1, false};
  return {0.0, 0, n, !a.isZero(0.0) && !c.isZero(0.0)};
}

/// Eigenvalue multiset as (value, multiplicity) pairs, values descending.
struct EigenvalueMultiset {
  std::vector<std::pair<double, int>> items;

  VectorXd expand() const {
    int n = 0;
    for (const auto& [v, m] : items) n += m;
    VectorXd out(n);
    int k = 0;
    for (const auto& [v, m] : items)
      for (int r = 0; r < m; ++r) out[k++] = v;
    return out;
  }
};

/// Spectrum of the ones-direction cone matrix when all center entries equal
/// c: 1/c^2 repeated n-1 times and a single -1/(n c^2).
inline EigenvalueMultiset equal_c_spectrum(double c, int n) {
  if (n < 2) throw dimension_error("equal_c_spectrum: need dimension >= 2");
  if (!(c > 0.0) || !std::isfinite(c))
    throw invalid_input("equal_c_spectrum: c must be strictly positive");
  const double csq = c * c;
  return {{{1.0 / csq, n - 1}, {-1.0 / (n * csq), 1}}};
}

/// Numeric spectral summary of a symmetric matrix, with optional closed-form
/// cross-checks attached by the caller.
struct SpectralReport {
  VectorXd eigenvalues;  ///< sorted descending
  Inertia inertia;
  std::optional<double> det_closed_form;
  double det_numeric = 0.0;
  std::optional<double> lambda1_lower;
  std::optional<double> lambda1_upper;
};

/// Dense eigensolve + LU determinant; when a closed-form determinant is
/// supplied it must agree with the numeric one to 1e-8 relative, otherwise
/// the report is refused.
inline SpectralReport analyze_spectrum(const MatrixXd& q,
                                       std::optional<double> det_closed = {},
                                       std::optional<Lambda1Bounds> bounds = {}) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || n < 1) throw dimension_error("analyze_spectrum: matrix must be square");
  const double scale = q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw invalid_input("analyze_spectrum: matrix must be symmetric");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (q + q.transpose()));
  if (es.info() != Eigen::Success) throw numeric_error("analyze_spectrum: eigensolver failed");

  SpectralReport report;
  report.eigenvalues = es.eigenvalues().reverse();
  const double tau = 1e-10 * report.eigenvalues.cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k) {
    const double lam = report.eigenvalues[k];
    if (lam > tau)
      ++report.inertia.positive;
    else if (lam < -tau)
      ++report.inertia.negative;
    else
      ++report.inertia.zero;
  }
  report.det_numeric = q.partialPivLu().determinant();
  if (det_closed) {
    if (std::abs(*det_closed - report.det_numeric) >
        1e-8 * std::max(1.0, std::abs(report.det_numeric)))
      throw numeric_error("analyze_spectrum: closed-form determinant disagrees with LU");
    report.det_closed_form = det_closed;
  }
  if (bounds) {
    report.lambda1_lower = bounds->lower;
    report.lambda1_upper = bounds->upper;
  }
  return report;
}

}  // namespace lcone
