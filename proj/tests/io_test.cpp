#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lcone/json_io.hpp"
#include "lcone/mesh.hpp"
#include "test_support.hpp"

using Catch::Approx;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using lcone::json;

namespace {

json minimal_axis_config() {
  return json::parse(R"({
    "dimension": 3,
    "base": {"kind": "axis", "center": [1.0, 1.0, 1.0], "axis": 1}
  })");
}

}  // namespace

TEST_CASE("matrix and vector JSON round trips preserve values exactly") {
  auto rng = test_support::make_rng(17);
  const MatrixXd m = MatrixXd::Random(4, 3);
  const MatrixXd m2 = lcone::matrix_from_json(lcone::matrix_to_json(m), "m");
  CHECK((m - m2).cwiseAbs().maxCoeff() == 0.0);

  const VectorXd v = test_support::random_vector(rng, 6, -1e8, 1e8);
  const VectorXd v2 = lcone::vector_from_json(lcone::vector_to_json(v), "v");
  CHECK((v - v2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("json readers reject malformed numeric payloads") {
  CHECK_THROWS_AS(lcone::vector_from_json(json::parse("[]"), "v"), lcone::invalid_input);
  CHECK_THROWS_AS(lcone::vector_from_json(json::parse("[1, \"x\"]"), "v"),
                  lcone::invalid_input);
  CHECK_THROWS_AS(lcone::vector_from_json(json::parse("{\"a\": 1}"), "v"),
                  lcone::invalid_input);
  CHECK_THROWS_AS(lcone::matrix_from_json(json::parse("[[1,2],[3]]"), "m"),
                  lcone::invalid_input);
  CHECK_THROWS_AS(lcone::matrix_from_json(json::parse("[[1,2],[3,null]]"), "m"),
                  lcone::invalid_input);
  // JSON has no literal for infinities; a null smuggled in must be caught.
  CHECK_THROWS_AS(lcone::vector_from_json(json::parse("[1, null]"), "v"),
                  lcone::invalid_input);
}

TEST_CASE("assert_finite refuses non-finite numbers anywhere in a tree") {
  json ok;
  ok["a"] = 1.5;
  ok["b"] = json::array({1.0, 2.0});
  CHECK_NOTHROW(lcone::assert_finite(ok));

  json bad;
  bad["nested"]["values"] = json::array({1.0, std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(lcone::assert_finite(bad), lcone::numeric_error);
  json inf;
  inf["x"] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(lcone::assert_finite(inf), lcone::numeric_error);
}

TEST_CASE("base kind names round trip") {
  for (const auto kind :
       {lcone::BaseKind::axis, lcone::BaseKind::ones, lcone::BaseKind::normal,
        lcone::BaseKind::tangent_sphere, lcone::BaseKind::standard}) {
    CHECK(lcone::base_kind_from_string(lcone::to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(lcone::base_kind_from_string("sphere"), lcone::invalid_input);
}

TEST_CASE("config parsing: minimal axis problem") {
  const auto cfg = lcone::ProblemConfig::from_json(minimal_axis_config());
  CHECK(cfg.dimension == 3);
  CHECK(cfg.kind == lcone::BaseKind::axis);
  CHECK(cfg.axis == 0);  // JSON is one-based, memory zero-based
  CHECK(cfg.center.size() == 3);
  CHECK_FALSE(cfg.system.has_value());
  CHECK(cfg.options.seed == 1);
  CHECK(cfg.options.samples == 10000);
  CHECK(cfg.options.set == lcone::TargetSet::cone);
}

TEST_CASE("config parsing: full document with options and overridable fields") {
  json j = minimal_axis_config();
  j["schema_version"] = 1;
  j["system"] = json::parse("[[0,-1,0],[1,0,0],[0,0,-1]]");
  j["initial_point"] = json::parse("[0.1, 0.1, 1.0]");
  j["options"] = json::parse(
      R"({"seed": 7, "samples": 500, "step": 0.01, "horizon": 2.5,
          "tolerance": 1e-7, "resolution": 8, "exact_step": true, "set": "base"})");

  const auto cfg = lcone::ProblemConfig::from_json(j);
  CHECK(cfg.system.has_value());
  CHECK(cfg.initial_point.has_value());
  CHECK(cfg.options.seed == 7);
  CHECK(cfg.options.samples == 500);
  CHECK(cfg.options.step == 0.01);
  CHECK(cfg.options.horizon == 2.5);
  CHECK(cfg.options.tolerance == Approx(1e-7));
  CHECK(cfg.options.resolution == 8);
  CHECK(cfg.options.exact_step);
  CHECK(cfg.options.set == lcone::TargetSet::base);
}

TEST_CASE("config echo is normalized and parses back to the same document") {
  json j = minimal_axis_config();
  j["options"] = json::parse(R"({"seed": 3})");
  const auto cfg = lcone::ProblemConfig::from_json(j);
  const json echo = cfg.to_json();

  CHECK(echo["schema_version"] == 1);
  CHECK(echo["base"]["axis"] == 1);  // back to one-based
  CHECK(echo["options"]["seed"] == 3);
  CHECK(echo["options"]["samples"] == 10000);  // defaults made explicit
  CHECK(echo["options"]["tolerance"].is_null());

  const auto reparsed = lcone::ProblemConfig::from_json(echo);
  CHECK(reparsed.to_json().dump(2) == echo.dump(2));
}

TEST_CASE("config parsing rejects structural mistakes") {
  auto expect_rejected = [](const char* text) {
    CHECK_THROWS_AS(lcone::ProblemConfig::from_json(json::parse(text)),
                    lcone::invalid_input);
  };
  // unknown top-level key
  expect_rejected(R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]}, "extra": 1})");
  // missing base
  expect_rejected(R"({"dimension": 2})");
  // dimension too small / missing
  expect_rejected(R"({"dimension": 1, "base": {"kind": "ones", "center": [1]}})");
  expect_rejected(R"({"base": {"kind": "ones", "center": [1,1]}})");
  // axis out of range (one-based contract)
  expect_rejected(R"({"dimension": 2, "base": {"kind": "axis", "center": [1,1], "axis": 0}})");
  expect_rejected(R"({"dimension": 2, "base": {"kind": "axis", "center": [1,1], "axis": 3}})");
  // center missing or with wrong length
  expect_rejected(R"({"dimension": 2, "base": {"kind": "ones"}})");
  expect_rejected(R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1,1]}})");
  // the standard cone carries no construction data
  expect_rejected(R"({"dimension": 2, "base": {"kind": "standard", "center": [1,1]}})");
  // normal: required for its kind, rejected elsewhere
  expect_rejected(R"({"dimension": 2, "base": {"kind": "normal", "center": [1,1]}})");
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1], "normal": [1,0]}})");
  // system shape
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]}, "system": [[1,0]]})");
  // option domains
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]},
          "options": {"seed": -4}})");
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]},
          "options": {"step": 0}})");
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]},
          "options": {"set": "plane"}})");
  expect_rejected(
      R"({"dimension": 2, "base": {"kind": "ones", "center": [1,1]},
          "options": {"verbose": true}})");
  // wrong schema version
  expect_rejected(
      R"({"schema_version": 2, "dimension": 2, "base": {"kind": "ones", "center": [1,1]}})");
}

TEST_CASE("config builds the matching construction and base ellipsoid") {
  const auto axis_cfg = lcone::ProblemConfig::from_json(minimal_axis_config());
  const auto cc = axis_cfg.construct();
  REQUIRE(cc.has_value());
  CHECK((cc->matrix() - lcone::construct_axis(VectorXd::Ones(3), 0).matrix())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  const auto base = axis_cfg.base_ellipsoid();
  REQUIRE(base.has_value());
  CHECK((base->center() - VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(base->level(VectorXd::Ones(3)) == Approx(0.0).margin(1e-12));

  const auto std_cfg = lcone::ProblemConfig::from_json(
      json::parse(R"({"dimension": 4, "base": {"kind": "standard"}})"));
  CHECK_FALSE(std_cfg.construct().has_value());
  CHECK_FALSE(std_cfg.base_ellipsoid().has_value());
  CHECK(std_cfg.cone().dim() == 4);

  const auto sphere_cfg = lcone::ProblemConfig::from_json(json::parse(
      R"({"dimension": 2, "base": {"kind": "tangent_sphere", "center": [3.0, 0.0]}})"));
  const auto sphere_base = sphere_cfg.base_ellipsoid();
  REQUIRE(sphere_base.has_value());
  VectorXd probe(2);
  probe << 2.0, 0.0;  // on the unit sphere around (3, 0)
  CHECK(sphere_base->level(probe) == Approx(1.0).margin(1e-12));
}

TEST_CASE("construction fragment carries the full construction record") {
  const auto cc = lcone::construct_axis(VectorXd::Ones(3), 0);
  const json frag = lcone::construction_fragment(cc, lcone::BaseKind::axis);

  CHECK(frag["kind"] == "axis");
  CHECK(frag["gamma"] == 1.0);
  CHECK(frag["beta"] == 1.0);
  CHECK((lcone::matrix_from_json(frag["Q"], "Q") - cc.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lcone::vector_from_json(frag["vertex"], "vertex").cwiseAbs().maxCoeff() == 0.0);
  CHECK(frag["base_plane"]["offset"] == 1.0);
  CHECK(frag["condition_residuals"]["basis_block"].get<double>() <= 1e-12);
  CHECK_NOTHROW(lcone::assert_finite(frag));
}

TEST_CASE("spectrum fragment records eigenvalues, inertia, and cross-checks") {
  const MatrixXd q = lcone::construct_axis(VectorXd::Ones(3), 0).matrix();
  const auto report = lcone::analyze_spectrum(
      q, lcone::det_axis_cone(VectorXd::Ones(3)),
      lcone::lambda1_bounds_axis_cone(VectorXd::Ones(3), 0));
  const json frag = lcone::spectrum_fragment(report);

  CHECK(frag["eigenvalues"].size() == 3);
  CHECK(frag["inertia"]["positive"] == 2);
  CHECK(frag["inertia"]["negative"] == 1);
  CHECK(frag["determinant"]["numeric"].get<double>() == Approx(-1.0));
  CHECK(frag["determinant"]["closed_form"].get<double>() == Approx(-1.0));
  CHECK(frag["lambda1_bounds"]["lower"].get<double>() ==
        Approx(frag["lambda1_bounds"]["upper"].get<double>()));

  const auto bare = lcone::analyze_spectrum(q);
  const json bare_frag = lcone::spectrum_fragment(bare);
  CHECK(bare_frag["determinant"]["closed_form"].is_null());
  CHECK(bare_frag["lambda1_bounds"].is_null());
}

TEST_CASE("certificate, falsifier, and trajectory fragments") {
  MatrixXd rotation(2, 2);
  rotation << 0.0, -1.0, 1.0, 0.0;
  const lcone::LinearSystem sys(rotation);
  const MatrixXd q = lcone::StandardLorenzCone(2).matrix();

  const json cert = lcone::certificate_fragment(lcone::certify_cone(sys, q));
  CHECK(cert["feasible"] == false);
  CHECK(cert["lambda_max"].get<double>() == Approx(2.0));
  CHECK(cert["bracket"].size() == 2);

  const json fals = lcone::falsifier_fragment(
      lcone::nagumo_falsify(sys, lcone::LorenzCone::standard(2), 100, 3));
  CHECK(fals["samples"] == 100);
  REQUIRE_FALSE(fals["counterexample"].is_null());
  CHECK(fals["counterexample"]["inner_product"].get<double>() == Approx(2.0));

  VectorXd x0(2);
  x0 << 0.0, 1.0;
  const json traj = lcone::trajectory_fragment(
      lcone::simulate(sys, lcone::StandardLorenzCone(2), x0, 1e-2, 1.0),
      lcone::StepMode::rk4);
  CHECK(traj["mode"] == "rk4");
  CHECK(traj["steps"] == 100);
  CHECK(traj["exited"] == true);
  CHECK_FALSE(traj["first_exit_time"].is_null());
}

TEST_CASE("standardization fragment reports the congruence residual") {
  const auto cc = lcone::construct_ones(VectorXd::Ones(3));
  const auto t = lcone::standardize(cc.cone());
  const json frag = lcone::standardization_fragment(t, cc.matrix());
  CHECK(frag["residual"].get<double>() <= 1e-10);
  CHECK(frag["P"].size() == 3);
  CHECK(frag["shift"].size() == 3);
}

TEST_CASE("surface meshes honor the tessellation contract") {
  const auto cc = lcone::construct_axis(VectorXd::Ones(3), 0);

  const auto cone4 = lcone::cone_surface(cc, 4);
  const auto cone8 = lcone::cone_surface(cc, 8);
  // 1 apex + (8R angular) x (2R axial) ring vertices.
  CHECK(cone4.vertices.size() == 1 + 32 * 8);
  CHECK(cone8.vertices.size() == 1 + 64 * 16);

  const auto ell4 = lcone::ellipsoid_surface(cc, 4);
  CHECK(ell4.vertices.size() == 2 + 32 * 15);

  // Every cone vertex satisfies the cone equation; every ellipsoid vertex
  // stays in the nonnegative orthant.
  for (const auto& v : cone4.vertices) {
    const VectorXd x = v;
    CHECK(std::abs(cc.quadratic(x)) <= 1e-6 * (1.0 + x.squaredNorm()));
  }
  for (const auto& v : ell4.vertices) CHECK(v.minCoeff() >= -1e-12);

  const auto tangent = lcone::construct_tangent_sphere(
      (VectorXd(3) << 0.0, 0.0, 2.0).finished());
  for (const auto& v : lcone::cone_surface(tangent, 3).vertices) {
    const VectorXd x = v;
    CHECK(std::abs(tangent.quadratic(x)) <= 1e-6 * (1.0 + x.squaredNorm()));
  }

  CHECK_THROWS_AS(lcone::cone_surface(lcone::construct_ones(VectorXd::Ones(4)), 4),
                  lcone::dimension_error);
}

TEST_CASE("obj and csv writers emit deterministic, well-formed output") {
  const auto cc = lcone::construct_axis(VectorXd::Ones(3), 0);
  const std::vector<lcone::SurfaceMesh> meshes = {lcone::cone_surface(cc, 2),
                                                  lcone::ellipsoid_surface(cc, 2)};

  std::ostringstream obj1, obj2, csv;
  lcone::write_obj(obj1, meshes);
  lcone::write_obj(obj2, meshes);
  lcone::write_csv(csv, meshes);

  CHECK(obj1.str() == obj2.str());
  CHECK(obj1.str().find("o cone") != std::string::npos);
  CHECK(obj1.str().find("o ellipsoid") != std::string::npos);

  // Faces must reference valid 1-based vertex indices across both objects.
  const std::size_t total_vertices = meshes[0].vertices.size() + meshes[1].vertices.size();
  std::istringstream in(obj1.str());
  std::string word;
  std::size_t vertex_lines = 0;
  long max_index = 0;
  while (in >> word) {
    if (word == "v") {
      ++vertex_lines;
      double x, y, z;
      in >> x >> y >> z;
    } else if (word == "f") {
      long i, j, k;
      in >> i >> j >> k;
      max_index = std::max({max_index, i, j, k});
      CHECK(std::min({i, j, k}) >= 1);
    }
  }
  CHECK(vertex_lines == total_vertices);
  CHECK(max_index == static_cast<long>(total_vertices));

  // CSV: header plus one row of three comma-separated values per vertex.
  std::istringstream csv_in(csv.str());
  std::string line;
  std::getline(csv_in, line);
  CHECK(line == "x,y,z");
  std::size_t rows = 0;
  while (std::getline(csv_in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
  }
  CHECK(rows == total_vertices);
}
