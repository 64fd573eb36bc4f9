// conectl: construct Lorenz cones from ellipsoidal bases, analyze their
// spectra, and certify/falsify positive invariance of linear systems on
// them. Batch tool: JSON config in, JSON report out, meshes for plotting.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lcone/json_io.hpp"
#include "lcone/mesh.hpp"

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel g_log_level = LogLevel::warn;

LogLevel log_level_from_env() {
  const char* raw = std::getenv("CONECTL_LOG");
  if (raw == nullptr) return LogLevel::warn;
  const std::string value(raw);
  if (value == "error") return LogLevel::error;
  if (value == "warn") return LogLevel::warn;
  if (value == "info") return LogLevel::info;
  if (value == "debug") return LogLevel::debug;
  std::cerr << "[conectl:warn] unknown CONECTL_LOG value '" << value
            << "', falling back to warn\n";
  return LogLevel::warn;
}

void log_line(LogLevel level, const std::string& message) {
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  if (static_cast<int>(level) <= static_cast<int>(g_log_level))
    std::cerr << "[conectl:" << kNames[static_cast<int>(level)] << "] " << message << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNegative = 3;
constexpr int kExitNumeric = 4;

struct CommandFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<double> tol;
  bool scan = false;
  std::string out;
  bool timings = false;
};

lcone::ProblemConfig load_config(const CommandFlags& flags) {
  std::ifstream in(flags.config_path);
  if (!in) throw lcone::invalid_input("cannot open config file: " + flags.config_path);
  const lcone::json parsed = lcone::json::parse(in);
  lcone::ProblemConfig cfg = lcone::ProblemConfig::from_json(parsed);
  if (flags.seed) cfg.options.seed = *flags.seed;
  if (flags.samples) cfg.options.samples = *flags.samples;
  if (flags.step) cfg.options.step = *flags.step;
  if (flags.horizon) cfg.options.horizon = *flags.horizon;
  if (flags.tol) cfg.options.tolerance = *flags.tol;
  return cfg;
}

void emit_report(const lcone::json& report, const std::string& out_path) {
  lcone::assert_finite(report);
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw lcone::invalid_input("cannot open output file: " + out_path);
  out << text;
}

std::optional<double> closed_form_determinant(const lcone::ProblemConfig& cfg) {
  switch (cfg.kind) {
    case lcone::BaseKind::axis:
      return lcone::det_axis_cone(cfg.center);
    case lcone::BaseKind::tangent_sphere:
      // rank-one update of the identity: det(I - cc^T/g) = 1 - |c|^2/g
      return 1.0 - cfg.center.squaredNorm() / (cfg.center.squaredNorm() - 1.0);
    case lcone::BaseKind::ones: {
      const double lo = cfg.center.minCoeff();
      if (lo != cfg.center.maxCoeff()) return std::nullopt;
      const int n = cfg.dimension;
      double csq_pow = 1.0;
      for (int k = 0; k < n; ++k) csq_pow *= lo * lo;
      const double alpha = -(n + 1.0) / (static_cast<double>(n) * n);
      return lcone::det_identity_plus_rank_one(1.0, alpha, n) / csq_pow;
    }
    default:
      return std::nullopt;
  }
}

int cmd_construct(const lcone::ProblemConfig& cfg, const CommandFlags&, lcone::json& report) {
  const auto cc = cfg.construct();
  if (!cc)
    throw lcone::invalid_input("construct: the standard cone has no base construction");
  report["construction"] = lcone::construction_fragment(*cc, cfg.kind);
  log_line(LogLevel::info, "constructed " + lcone::to_string(cfg.kind) + " cone, max residual " +
                               std::to_string(cc->diagnostics().max()));
  return kExitOk;
}

int cmd_spectrum(const lcone::ProblemConfig& cfg, const CommandFlags&, lcone::json& report) {
  const auto cc = cfg.construct();
  lcone::MatrixXd q;
  if (cc) {
    report["construction"] = lcone::construction_fragment(*cc, cfg.kind);
    q = cc->matrix();
  } else {
    q = lcone::StandardLorenzCone(cfg.dimension).matrix();
  }
  std::optional<lcone::Lambda1Bounds> bounds;
  if (cfg.kind == lcone::BaseKind::axis)
    bounds = lcone::lambda1_bounds_axis_cone(cfg.center, cfg.axis);
  report["spectrum"] =
      lcone::spectrum_fragment(lcone::analyze_spectrum(q, closed_form_determinant(cfg), bounds));
  return kExitOk;
}

int cmd_certify(const lcone::ProblemConfig& cfg, const CommandFlags& flags,
                lcone::json& report) {
  if (!cfg.system) throw lcone::invalid_input("certify: config must provide a system matrix");
  const lcone::LinearSystem system(*cfg.system);
  const lcone::LorenzCone cone = cfg.cone();
  const lcone::InvarianceCertificate cert =
      lcone::certify_cone(system, cone.matrix(), cfg.options.tolerance);
  report["certificate"] = lcone::certificate_fragment(cert);
  if (flags.scan) {
    std::vector<double> grid;
    grid.reserve(81);
    for (int k = 0; k <= 80; ++k) grid.push_back(-10.0 + 0.25 * k);
    report["certificate"]["scan"] =
        lcone::scan_fragment(lcone::certificate_scan(system, cone.matrix(), grid));
  }
  log_line(LogLevel::info, cert.feasible ? "certificate feasible" : "certificate infeasible");
  return cert.feasible ? kExitOk : kExitNegative;
}

int cmd_falsify(const lcone::ProblemConfig& cfg, const CommandFlags&, lcone::json& report) {
  if (!cfg.system) throw lcone::invalid_input("falsify: config must provide a system matrix");
  const lcone::LinearSystem system(*cfg.system);
  const lcone::NagumoScan scan =
      lcone::nagumo_falsify(system, cfg.cone(), cfg.options.samples, cfg.options.seed,
                            cfg.options.tolerance);
  report["falsifier"] = lcone::falsifier_fragment(scan);
  return scan.counterexample ? kExitNegative : kExitOk;
}

int cmd_simulate(const lcone::ProblemConfig& cfg, const CommandFlags&, lcone::json& report) {
  if (!cfg.system) throw lcone::invalid_input("simulate: config must provide a system matrix");
  if (!cfg.initial_point)
    throw lcone::invalid_input("simulate: config must provide an initial point");
  const lcone::LinearSystem system(*cfg.system);
  const lcone::StepMode mode =
      cfg.options.exact_step ? lcone::StepMode::matrix_exponential : lcone::StepMode::rk4;
  lcone::TrajectoryRecord record;
  if (cfg.options.set == lcone::TargetSet::cone) {
    record = lcone::simulate(system, cfg.cone(), *cfg.initial_point, cfg.options.step,
                             cfg.options.horizon, mode);
  } else {
    const auto base = cfg.base_ellipsoid();
    if (!base) throw lcone::invalid_input("simulate: the standard cone has no base set");
    record = lcone::simulate(system, *base, *cfg.initial_point, cfg.options.step,
                             cfg.options.horizon, mode);
  }
  report["trajectory"] = lcone::trajectory_fragment(record, mode);
  return record.exited ? kExitNegative : kExitOk;
}

int cmd_standardize(const lcone::ProblemConfig& cfg, const CommandFlags&, lcone::json& report) {
  const lcone::LorenzCone cone = cfg.cone();
  const lcone::StandardizingTransform transform = lcone::standardize(cone);
  report["standardization"] = lcone::standardization_fragment(transform, cone.matrix());
  return kExitOk;
}

int cmd_mesh(const lcone::ProblemConfig& cfg, const CommandFlags& flags, lcone::json& report) {
  const auto cc = cfg.construct();
  if (!cc) throw lcone::invalid_input("mesh: the standard cone has no base to tessellate");
  const int resolution = cfg.options.resolution;
  const std::vector<lcone::SurfaceMesh> meshes = {lcone::cone_surface(*cc, resolution),
                                                  lcone::ellipsoid_surface(*cc, resolution)};
  const std::string base = flags.out.empty() ? "mesh" : flags.out;
  const std::string obj_path = base + ".obj";
  const std::string csv_path = base + ".csv";
  {
    std::ofstream obj(obj_path, std::ios::binary);
    if (!obj) throw lcone::invalid_input("cannot open output file: " + obj_path);
    lcone::write_obj(obj, meshes);
  }
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw lcone::invalid_input("cannot open output file: " + csv_path);
    lcone::write_csv(csv, meshes);
  }
  report["construction"] = lcone::construction_fragment(*cc, cfg.kind);
  lcone::json mesh_info;
  mesh_info["obj"] = obj_path;
  mesh_info["csv"] = csv_path;
  mesh_info["resolution"] = resolution;
  mesh_info["cone_vertices"] = meshes[0].vertices.size();
  mesh_info["cone_faces"] = meshes[0].faces.size();
  mesh_info["ellipsoid_vertices"] = meshes[1].vertices.size();
  mesh_info["ellipsoid_faces"] = meshes[1].faces.size();
  report["mesh"] = mesh_info;
  return kExitOk;
}

int dispatch(const std::string& command, const lcone::ProblemConfig& cfg,
             const CommandFlags& flags, lcone::json& report) {
  if (command == "construct") return cmd_construct(cfg, flags, report);
  if (command == "spectrum") return cmd_spectrum(cfg, flags, report);
  if (command == "certify") return cmd_certify(cfg, flags, report);
  if (command == "falsify") return cmd_falsify(cfg, flags, report);
  if (command == "simulate") return cmd_simulate(cfg, flags, report);
  if (command == "standardize") return cmd_standardize(cfg, flags, report);
  if (command == "mesh") return cmd_mesh(cfg, flags, report);
  throw lcone::invalid_input("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  g_log_level = log_level_from_env();

  CLI::App app{"Lorenz cones from ellipsoidal bases: construction, spectra, invariance"};
  app.require_subcommand(1);
  CommandFlags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"construct", "build the cone matrix and report the construction identities"},
      {"spectrum", "eigenvalues, inertia, determinant cross-checks, eigenvalue bounds"},
      {"certify", "search the scalar certificate for positive invariance"},
      {"falsify", "sample the cone boundary for outward drift"},
      {"simulate", "integrate the system and track set membership"},
      {"standardize", "congruence mapping the cone onto its standard form"},
      {"mesh", "export cone and base surfaces as OBJ and CSV"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", flags.config_path, "problem configuration JSON file")
        ->required();
    sub->add_option("--seed", flags.seed, "override options.seed");
    sub->add_option("--samples", flags.samples, "override options.samples");
    sub->add_option("--step", flags.step, "override options.step");
    sub->add_option("--horizon", flags.horizon, "override options.horizon");
    sub->add_option("--tol", flags.tol, "override options.tolerance");
    sub->add_flag("--scan", flags.scan, "include the certificate profile table (certify)");
    sub->add_option("--out", flags.out,
                    "report output path (mesh: base path for .obj/.csv)");
    sub->add_flag("--timings", flags.timings,
                  "include wall-clock timings in the report (non-reproducible)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto started = std::chrono::steady_clock::now();
    const lcone::ProblemConfig cfg = load_config(flags);
    log_line(LogLevel::debug, "config loaded from " + flags.config_path);

    lcone::json report;
    report["schema_version"] = lcone::kReportSchemaVersion;
    report["command"] = command;
    report["config"] = cfg.to_json();
    const int code = dispatch(command, cfg, flags, report);
    if (flags.timings) {
      const auto elapsed = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started)
                               .count();
      lcone::json timings;
      timings["total_ms"] = elapsed;
      report["timings"] = timings;
    }
    emit_report(report, command == "mesh" ? std::string() : flags.out);
    return code;
  } catch (const lcone::numeric_error& e) {
    log_line(LogLevel::error, e.what());
    return kExitNumeric;
  } catch (const lcone::invalid_input& e) {
    log_line(LogLevel::error, e.what());
    return kExitConfig;
  } catch (const lcone::precondition_error& e) {
    log_line(LogLevel::error, e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    log_line(LogLevel::error, std::string("config parse failure: ") + e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    log_line(LogLevel::error, std::string("unexpected failure: ") + e.what());
    return kExitNumeric;
  }
}
