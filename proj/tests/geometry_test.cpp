#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lcone/geometry.hpp"
#include "test_support.hpp"

using Catch::Approx;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("complementary basis is orthonormal and annihilates the normal") {
  auto rng = test_support::make_rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = test_support::random_dim(rng, 2, 10);
    const VectorXd a = test_support::random_vector(rng, n, -5.0, 5.0);
    if (a.norm() < 1e-6) continue;
    const MatrixXd h = lcone::complementary_basis(a);

    REQUIRE(h.rows() == n);
    REQUIRE(h.cols() == n - 1);
    CHECK((h.transpose() * h - MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.transpose() * h).cwiseAbs().maxCoeff() < 1e-13 * a.norm());
  }
}

TEST_CASE("complementary basis is deterministic and scale-independent") {
  VectorXd a(3);
  a << 0.3, -1.2, 2.0;
  const MatrixXd h1 = lcone::complementary_basis(a);
  const MatrixXd h2 = lcone::complementary_basis(a);
  const MatrixXd h3 = lcone::complementary_basis(2.5 * a);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((h1 - h3).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("complementary basis rejects degenerate input") {
  CHECK_THROWS_AS(lcone::complementary_basis(VectorXd::Zero(4)), lcone::invalid_input);
  CHECK_THROWS_AS(lcone::complementary_basis(VectorXd::Ones(1)), lcone::dimension_error);
}

TEST_CASE("ones complement basis matches its closed form properties") {
  for (int n = 2; n <= 9; ++n) {
    const MatrixXd h = lcone::ones_complement_basis(n);
    const VectorXd e = VectorXd::Ones(n);

    CHECK((h.transpose() * h - MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((e.transpose() * h).cwiseAbs().maxCoeff() < 1e-14);
    const MatrixXd projector = MatrixXd::Identity(n, n) - e * e.transpose() / n;
    CHECK((h * h.transpose() - projector).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("hyperplane through a point contains it and measures distance") {
  VectorXd a(2);
  a << 1.0, 1.0;
  VectorXd x0(2);
  x0 << 1.5, 0.5;
  const lcone::Hyperplane plane = lcone::Hyperplane::through_point(a, x0);

  CHECK(plane.offset() == Approx(2.0));
  CHECK(plane.contains(x0));
  VectorXd q(2);
  q << 2.0, 2.0;
  CHECK_FALSE(plane.contains(q));
  CHECK(lcone::distance_to_hyperplane(q, plane) == Approx(std::sqrt(2.0)));

  // Points reached through the stored basis stay on the plane.
  auto rng = test_support::make_rng(7);
  for (int k = 0; k < 10; ++k) {
    const VectorXd z = test_support::random_vector(rng, 1, -3.0, 3.0);
    CHECK(plane.contains(x0 + plane.basis() * z));
  }
}

TEST_CASE("hyperplane validates a caller-supplied basis") {
  VectorXd a(3);
  a << 0.0, 0.0, 1.0;

  MatrixXd good(3, 2);
  good << 1, 0, 0, 1, 0, 0;
  CHECK_NOTHROW(lcone::Hyperplane(a, 1.0, good));

  MatrixXd not_orthogonal(3, 2);
  not_orthogonal << 1, 0, 0, 1, 0, 0.5;
  CHECK_THROWS_AS(lcone::Hyperplane(a, 1.0, not_orthogonal), lcone::invalid_input);

  MatrixXd dependent(3, 2);
  dependent << 1, 2, 1, 2, 0, 0;
  CHECK_THROWS_AS(lcone::Hyperplane(a, 1.0, dependent), lcone::invalid_input);

  MatrixXd wrong_shape(3, 3);
  wrong_shape.setIdentity();
  CHECK_THROWS_AS(lcone::Hyperplane(a, 1.0, wrong_shape), lcone::dimension_error);
}

TEST_CASE("dikin ellipsoid validates and classifies points") {
  VectorXd c(3);
  c << 1.0, 2.0, 0.5;
  const lcone::DikinEllipsoid ed(c);

  CHECK(ed.level(c) == 0.0);
  CHECK(ed.contains(c));
  VectorXd edge = c;
  edge[0] = 0.0;  // distance exactly one radius along the first axis
  CHECK(ed.level(edge) == Approx(1.0));
  VectorXd outside = c;
  outside[2] = 1.2;
  CHECK_FALSE(ed.contains(outside));

  const MatrixXd d = ed.quadratic_matrix();
  CHECK(d(0, 0) == Approx(1.0));
  CHECK(d(1, 1) == Approx(0.25));
  CHECK(d(2, 2) == Approx(4.0));
  CHECK(d.cwiseAbs().sum() == Approx(d.diagonal().cwiseAbs().sum()));

  VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(lcone::DikinEllipsoid(bad), lcone::invalid_input);
  bad << 1.0, -0.3;
  CHECK_THROWS_AS(lcone::DikinEllipsoid(bad), lcone::invalid_input);
}

TEST_CASE("dikin boundary samples sit on the level set inside the orthant") {
  auto rng = test_support::make_rng(21);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = test_support::random_dim(rng, 2, 7);
    const lcone::DikinEllipsoid ed(test_support::random_center(rng, n));
    const auto pts = lcone::sample_boundary(ed, 200, 33 + trial);
    REQUIRE(pts.size() == 200);
    for (const VectorXd& x : pts) {
      CHECK(ed.level(x) == Approx(1.0).margin(1e-12));
      CHECK(x.minCoeff() >= -1e-12);
      CHECK(((2.0 * ed.center() - x).array() >= -1e-12).all());
    }
  }
}

TEST_CASE("boundary sampling is reproducible for a fixed seed") {
  VectorXd c(4);
  c << 0.7, 1.3, 2.2, 0.4;
  const lcone::DikinEllipsoid ed(c);
  const auto a = lcone::sample_boundary(ed, 50, 99);
  const auto b = lcone::sample_boundary(ed, 50, 99);
  const auto other = lcone::sample_boundary(ed, 50, 100);
  REQUIRE(a.size() == b.size());
  double max_diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    max_diff = std::max(max_diff, (a[k] - b[k]).cwiseAbs().maxCoeff());
  CHECK(max_diff == 0.0);
  CHECK((a[0] - other[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("general ellipsoid recovers its center and validates rho") {
  MatrixXd q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  VectorXd m(2);
  m << -1.0, 3.0;
  const VectorXd p = -(q * m);

  const lcone::Ellipsoid e(q, p);
  CHECK((e.center() - m).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(e.level(m) == Approx(0.0).margin(1e-12));
  CHECK(e.contains(m));

  // Explicit rho must match p^T Q^-1 p.
  CHECK_NOTHROW(lcone::Ellipsoid(q, p, e.rho()));
  CHECK_THROWS_AS(lcone::Ellipsoid(q, p, e.rho() + 1.0), lcone::invalid_input);

  MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(lcone::Ellipsoid(indefinite, p), lcone::invalid_input);
}

TEST_CASE("general ellipsoid boundary samples hit level one") {
  auto rng = test_support::make_rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = test_support::random_dim(rng, 2, 6);
    // Random SPD Gram: G^T G + I keeps the spectrum comfortably positive.
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) g.row(i) = test_support::random_vector(rng, n).transpose();
    const MatrixXd q = g.transpose() * g + MatrixXd::Identity(n, n);
    const VectorXd m = test_support::random_vector(rng, n, -2.0, 2.0);
    const lcone::Ellipsoid e(q, -(q * m));
    for (const VectorXd& x : lcone::sample_boundary(e, 100, 42 + trial))
      CHECK(e.level(x) == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("slice through the center inherits the boundary of the ellipsoid") {
  auto rng = test_support::make_rng(311);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = test_support::random_dim(rng, 2, 7);
    const VectorXd c = test_support::random_center(rng, n);
    const lcone::DikinEllipsoid ed(c);
    const VectorXd a = test_support::random_direction(rng, n);
    const auto plane = lcone::Hyperplane::through_point(a, c);
    const lcone::EllipsoidSlice sl = lcone::slice(ed, plane);

    CHECK((sl.anchor() - c).cwiseAbs().maxCoeff() == 0.0);
    for (const VectorXd& x : lcone::sample_boundary(sl, 60, 17 + trial)) {
      CHECK(ed.level(x) == Approx(1.0).margin(1e-9));
      CHECK(plane.contains(x, 1e-9));
      CHECK(x.minCoeff() >= -1e-12);
    }
  }
}

TEST_CASE("slice rejects a plane missing the center") {
  VectorXd c(3);
  c << 1.0, 1.0, 1.0;
  const lcone::DikinEllipsoid ed(c);
  VectorXd a(3);
  a << 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(lcone::slice(ed, lcone::Hyperplane(a, 1.5)), lcone::precondition_error);
  CHECK_NOTHROW(lcone::slice(ed, lcone::Hyperplane(a, 1.0)));
}
