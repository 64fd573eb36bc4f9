#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lcone/cone.hpp"
#include "lcone/errors.hpp"
#include "lcone/geometry.hpp"
#include "lcone/invariance.hpp"
#include "lcone/spectral.hpp"

namespace lcone {

using json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Eigen <-> JSON
// ---------------------------------------------------------------------------

inline json vector_to_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline json matrix_to_json(const MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw invalid_input(what + ": expected a nonempty array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw invalid_input(what + ": entries must be numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  if (!v.allFinite()) throw invalid_input(what + ": entries must be finite");
  return v;
}

inline MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw invalid_input(what + ": expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw invalid_input(what + ": rows must be nonempty arrays");
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw invalid_input(what + ": rows must all have equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw invalid_input(what + ": entries must be numbers");
      m(static_cast<int>(i), static_cast<int>(k)) = j[i][k].get<double>();
    }
  }
  if (!m.allFinite()) throw invalid_input(what + ": entries must be finite");
  return m;
}

/// Reject any non-finite number anywhere in a report tree (nlohmann would
/// serialize them as null, silently breaking the schema).
inline void assert_finite(const json& j, const std::string& where = "report") {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw numeric_error(where + ": non-finite numeric field");
  if (j.is_array() || j.is_object())
    for (const auto& item : j.items()) assert_finite(item.value(), where);
}

// ---------------------------------------------------------------------------
// Problem configuration
// ---------------------------------------------------------------------------

enum class BaseKind { axis, ones, normal, tangent_sphere, standard };

inline std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::axis: return "axis";
    case BaseKind::ones: return "ones";
    case BaseKind::normal: return "normal";
    case BaseKind::tangent_sphere: return "tangent_sphere";
    case BaseKind::standard: return "standard";
  }
  throw invalid_input("unknown base kind");
}

inline BaseKind base_kind_from_string(const std::string& s) {
  if (s == "axis") return BaseKind::axis;
  if (s == "ones") return BaseKind::ones;
  if (s == "normal") return BaseKind::normal;
  if (s == "tangent_sphere") return BaseKind::tangent_sphere;
  if (s == "standard") return BaseKind::standard;
  throw invalid_input("base.kind must be one of axis|ones|normal|tangent_sphere|standard");
}

/// Which set a simulation runs against: the constructed cone or the base
/// ellipsoid (Dikin ellipsoid, or the unit tangent sphere).
enum class TargetSet { cone, base };

struct SolverOptions {
  std::uint64_t seed = 1;
  int samples = 10000;
  double step = 1e-3;
  double horizon = 10.0;
  std::optional<double> tolerance;  ///< absent = data-scaled default
  int resolution = 16;
  bool exact_step = false;  ///< matrix-exponential propagation in simulate
  TargetSet set = TargetSet::cone;
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) ok = true;
    if (!ok) throw invalid_input(where + ": unknown key '" + item.key() + "'");
  }
}

}  // namespace detail

/// Parsed, validated problem description. `axis` is held zero-based in
/// memory and one-based in JSON.
struct ProblemConfig {
  int dimension = 0;
  BaseKind kind = BaseKind::standard;
  VectorXd center;   ///< Dikin or sphere center; empty for the standard cone
  int axis = 0;      ///< zero-based, BaseKind::axis only
  VectorXd normal;   ///< BaseKind::normal only
  std::optional<MatrixXd> system;
  std::optional<VectorXd> initial_point;
  SolverOptions options;

  static ProblemConfig from_json(const json& j) {
    if (!j.is_object()) throw invalid_input("config: expected a JSON object");
    detail::reject_unknown_keys(
        j, {"schema_version", "dimension", "base", "system", "initial_point", "options"},
        "config");
    if (j.contains("schema_version")) {
      if (!j["schema_version"].is_number_integer() ||
          j["schema_version"].get<int>() != kConfigSchemaVersion)
        throw invalid_input("config: unsupported schema_version");
    }
    ProblemConfig cfg;
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
      throw invalid_input("config: integer 'dimension' is required");
    cfg.dimension = j["dimension"].get<int>();
    if (cfg.dimension < 2) throw invalid_input("config: dimension must be >= 2");

    if (!j.contains("base") || !j["base"].is_object())
      throw invalid_input("config: object 'base' is required");
    const json& base = j["base"];
    detail::reject_unknown_keys(base, {"kind", "center", "axis", "normal"}, "config.base");
    if (!base.contains("kind") || !base["kind"].is_string())
      throw invalid_input("config.base: string 'kind' is required");
    cfg.kind = base_kind_from_string(base["kind"].get<std::string>());

    if (cfg.kind != BaseKind::standard) {
      if (!base.contains("center"))
        throw invalid_input("config.base: 'center' is required for this kind");
      cfg.center = vector_from_json(base["center"], "config.base.center");
      if (cfg.center.size() != cfg.dimension)
        throw invalid_input("config.base.center: length must equal dimension");
    } else if (base.contains("center")) {
      throw invalid_input("config.base: 'center' is not accepted for the standard cone");
    }

    if (cfg.kind == BaseKind::axis) {
      if (!base.contains("axis") || !base["axis"].is_number_integer())
        throw invalid_input("config.base: integer 'axis' is required for kind axis");
      const int one_based = base["axis"].get<int>();
      if (one_based < 1 || one_based > cfg.dimension)
        throw invalid_input("config.base.axis: must lie in 1..dimension");
      cfg.axis = one_based - 1;
    } else if (base.contains("axis")) {
      throw invalid_input("config.base: 'axis' is only accepted for kind axis");
    }

    if (cfg.kind == BaseKind::normal) {
      if (!base.contains("normal"))
        throw invalid_input("config.base: 'normal' is required for kind normal");
      cfg.normal = vector_from_json(base["normal"], "config.base.normal");
      if (cfg.normal.size() != cfg.dimension)
        throw invalid_input("config.base.normal: length must equal dimension");
      if (!(cfg.normal.norm() > 0.0))
        throw invalid_input("config.base.normal: must be nonzero");
    } else if (base.contains("normal")) {
      throw invalid_input("config.base: 'normal' is only accepted for kind normal");
    }

    if (j.contains("system")) {
      MatrixXd a = matrix_from_json(j["system"], "config.system");
      if (a.rows() != cfg.dimension || a.cols() != cfg.dimension)
        throw invalid_input("config.system: must be dimension x dimension");
      cfg.system = std::move(a);
    }
    if (j.contains("initial_point")) {
      VectorXd x0 = vector_from_json(j["initial_point"], "config.initial_point");
      if (x0.size() != cfg.dimension)
        throw invalid_input("config.initial_point: length must equal dimension");
      cfg.initial_point = std::move(x0);
    }

    if (j.contains("options")) {
      const json& opt = j["options"];
      if (!opt.is_object()) throw invalid_input("config.options: expected an object");
      detail::reject_unknown_keys(opt,
                                  {"seed", "samples", "step", "horizon", "tolerance",
                                   "resolution", "exact_step", "set"},
                                  "config.options");
      if (opt.contains("seed")) {
        const bool ok = opt["seed"].is_number_unsigned() ||
                        (opt["seed"].is_number_integer() &&
                         opt["seed"].get<std::int64_t>() >= 0);
        if (!ok) throw invalid_input("config.options.seed: must be a nonnegative integer");
        cfg.options.seed = opt["seed"].get<std::uint64_t>();
      }
      if (opt.contains("samples")) {
        if (!opt["samples"].is_number_integer() || opt["samples"].get<int>() < 1)
          throw invalid_input("config.options.samples: must be a positive integer");
        cfg.options.samples = opt["samples"].get<int>();
      }
      if (opt.contains("step")) {
        if (!opt["step"].is_number() || !(opt["step"].get<double>() > 0.0))
          throw invalid_input("config.options.step: must be a positive number");
        cfg.options.step = opt["step"].get<double>();
      }
      if (opt.contains("horizon")) {
        if (!opt["horizon"].is_number() || !(opt["horizon"].get<double>() > 0.0))
          throw invalid_input("config.options.horizon: must be a positive number");
        cfg.options.horizon = opt["horizon"].get<double>();
      }
      if (opt.contains("tolerance") && !opt["tolerance"].is_null()) {
        if (!opt["tolerance"].is_number() || !(opt["tolerance"].get<double>() >= 0.0))
          throw invalid_input("config.options.tolerance: must be a nonnegative number");
        cfg.options.tolerance = opt["tolerance"].get<double>();
      }
      if (opt.contains("resolution")) {
        if (!opt["resolution"].is_number_integer() || opt["resolution"].get<int>() < 1)
          throw invalid_input("config.options.resolution: must be a positive integer");
        cfg.options.resolution = opt["resolution"].get<int>();
      }
      if (opt.contains("exact_step")) {
        if (!opt["exact_step"].is_boolean())
          throw invalid_input("config.options.exact_step: must be a boolean");
        cfg.options.exact_step = opt["exact_step"].get<bool>();
      }
      if (opt.contains("set")) {
        if (!opt["set"].is_string())
          throw invalid_input("config.options.set: must be \"cone\" or \"base\"");
        const std::string s = opt["set"].get<std::string>();
        if (s == "cone")
          cfg.options.set = TargetSet::cone;
        else if (s == "base")
          cfg.options.set = TargetSet::base;
        else
          throw invalid_input("config.options.set: must be \"cone\" or \"base\"");
      }
    }
    return cfg;
  }

  /// Normalized echo: fixed key order, defaults made explicit, axis 1-based.
  json to_json() const {
    json base;
    base["kind"] = to_string(kind);
    if (kind != BaseKind::standard) base["center"] = vector_to_json(center);
    if (kind == BaseKind::axis) base["axis"] = axis + 1;
    if (kind == BaseKind::normal) base["normal"] = vector_to_json(normal);

    json opt;
    opt["seed"] = options.seed;
    opt["samples"] = options.samples;
    opt["step"] = options.step;
    opt["horizon"] = options.horizon;
    opt["tolerance"] = options.tolerance ? json(*options.tolerance) : json(nullptr);
    opt["resolution"] = options.resolution;
    opt["exact_step"] = options.exact_step;
    opt["set"] = options.set == TargetSet::cone ? "cone" : "base";

    json out;
    out["schema_version"] = kConfigSchemaVersion;
    out["dimension"] = dimension;
    out["base"] = base;
    if (system) out["system"] = matrix_to_json(*system);
    if (initial_point) out["initial_point"] = vector_to_json(*initial_point);
    out["options"] = opt;
    return out;
  }

  /// Build the configured cone; disengaged for the standard cone, which has
  /// no construction data.
  std::optional<ConeConstruction> construct() const {
    switch (kind) {
      case BaseKind::axis: return construct_axis(center, axis);
      case BaseKind::ones: return construct_ones(center);
      case BaseKind::normal: {
        DikinEllipsoid ed(center);
        return construct_general(ed, Hyperplane::through_point(normal, center));
      }
      case BaseKind::tangent_sphere: return construct_tangent_sphere(center);
      case BaseKind::standard: return std::nullopt;
    }
    throw invalid_input("unknown base kind");
  }

  LorenzCone cone() const {
    if (kind == BaseKind::standard) return LorenzCone::standard(dimension);
    return construct()->cone();
  }

  /// The base set as a general ellipsoid (Dikin ellipsoid or unit tangent
  /// sphere); disengaged for the standard cone.
  std::optional<Ellipsoid> base_ellipsoid() const {
    if (kind == BaseKind::standard) return std::nullopt;
    if (kind == BaseKind::tangent_sphere)
      return Ellipsoid(MatrixXd::Identity(dimension, dimension), -center);
    const MatrixXd d = DikinEllipsoid(center).quadratic_matrix();
    return Ellipsoid(d, -(d * center));
  }
};

// ---------------------------------------------------------------------------
// Report fragments
// ---------------------------------------------------------------------------

inline json construction_fragment(const ConeConstruction& cc, BaseKind kind) {
  json out;
  out["kind"] = to_string(kind);
  out["Q"] = matrix_to_json(cc.matrix());
  out["gamma"] = cc.gamma();
  out["beta"] = cc.beta();
  out["vertex"] = vector_to_json(VectorXd::Zero(cc.dim()));
  out["axis_hint"] = vector_to_json(cc.axis_hint());
  json plane;
  plane["normal"] = vector_to_json(cc.plane().normal());
  plane["offset"] = cc.plane().offset();
  out["base_plane"] = plane;
  out["base_center"] = vector_to_json(cc.base_center());
  json res;
  res["basis_block"] = cc.diagnostics().basis_block;
  res["cross_term"] = cc.diagnostics().cross_term;
  res["center_value"] = cc.diagnostics().center_value;
  out["condition_residuals"] = res;
  return out;
}

inline json spectrum_fragment(const SpectralReport& sr) {
  json out;
  out["eigenvalues"] = vector_to_json(sr.eigenvalues);
  json in;
  in["positive"] = sr.inertia.positive;
  in["zero"] = sr.inertia.zero;
  in["negative"] = sr.inertia.negative;
  out["inertia"] = in;
  json det;
  det["numeric"] = sr.det_numeric;
  det["closed_form"] = sr.det_closed_form ? json(*sr.det_closed_form) : json(nullptr);
  out["determinant"] = det;
  if (sr.lambda1_lower && sr.lambda1_upper) {
    json bounds;
    bounds["lower"] = *sr.lambda1_lower;
    bounds["upper"] = *sr.lambda1_upper;
    out["lambda1_bounds"] = bounds;
  } else {
    out["lambda1_bounds"] = nullptr;
  }
  return out;
}

inline json certificate_fragment(const InvarianceCertificate& cert) {
  json out;
  out["feasible"] = cert.feasible;
  out["a_star"] = cert.a_star;
  out["lambda_max"] = cert.lambda_max;
  out["tolerance"] = cert.tolerance;
  out["bracket"] = json::array({cert.bracket.first, cert.bracket.second});
  return out;
}

inline json scan_fragment(const std::vector<std::pair<double, double>>& table) {
  json out = json::array();
  for (const auto& [a, value] : table) out.push_back(json::array({a, value}));
  return out;
}

inline json falsifier_fragment(const NagumoScan& scan) {
  json out;
  out["samples"] = scan.samples;
  out["tolerance"] = scan.tolerance;
  out["worst_value"] = scan.worst_value;
  out["worst_point"] = vector_to_json(scan.worst_point);
  if (scan.counterexample) {
    json ce;
    ce["point"] = vector_to_json(scan.counterexample->point);
    ce["inner_product"] = scan.counterexample->inner_product;
    out["counterexample"] = ce;
  } else {
    out["counterexample"] = nullptr;
  }
  return out;
}

inline json trajectory_fragment(const TrajectoryRecord& record, StepMode mode) {
  json out;
  out["initial"] = vector_to_json(record.initial);
  out["step"] = record.step;
  out["horizon"] = record.horizon;
  out["steps"] = record.steps;
  out["mode"] = mode == StepMode::rk4 ? "rk4" : "matrix_exponential";
  out["max_violation"] = record.max_violation;
  out["exited"] = record.exited;
  out["first_exit_time"] =
      record.first_exit_time ? json(*record.first_exit_time) : json(nullptr);
  return out;
}

inline json standardization_fragment(const StandardizingTransform& transform,
                                     const MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  MatrixXd target = MatrixXd::Identity(n, n);
  target(n - 1, n - 1) = -1.0;
  const double residual =
      (transform.matrix().transpose() * q * transform.matrix() - target).cwiseAbs().maxCoeff();
  json out;
  out["P"] = matrix_to_json(transform.matrix());
  out["shift"] = vector_to_json(transform.shift());
  out["residual"] = residual;
  return out;
}

}  // namespace lcone
