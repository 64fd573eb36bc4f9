#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lcone/cone.hpp"
#include "lcone/errors.hpp"
#include "lcone/geometry.hpp"

namespace lcone {

/// Triangle mesh with deterministic vertex and face ordering. Face indices
/// are zero-based here; the OBJ writer converts to the format's one-based
/// convention.
struct SurfaceMesh {
  std::string name;
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

namespace detail {

/// The cone's base boundary curve as anchor + frame * (cos t, sin t): for a
/// Dikin base this is the slice boundary z^T (H^T C^-2 H) z = 1, for the
/// tangent-sphere cone the tangency circle.
inline std::pair<Eigen::Vector3d, Eigen::Matrix<double, 3, 2>> base_ring(
    const ConeConstruction& cc) {
  const MatrixXd& h = cc.plane().basis();
  if (cc.source()) {
    const VectorXd& c = cc.source()->center();
    const MatrixXd gram = h.transpose() * cc.source()->quadratic_matrix() * h;
    const MatrixXd frame = h * inverse_sqrt_spd(0.5 * (gram + gram.transpose()), "base_ring");
    return {c, frame};
  }
  const VectorXd& c = cc.base_center();
  const double norm2 = c.squaredNorm();
  const double gap = norm2 - 1.0;
  const Eigen::Vector3d anchor = c * (gap / norm2);
  const double radius = std::sqrt(gap) / std::sqrt(norm2);
  return {anchor, radius * h};
}

}  // namespace detail

/// Boundary surface of the cone branch truncated at its base plane: rings of
/// the scaled base boundary from the apex outward. Vertex count is
/// 1 + (8*resolution)*(2*resolution); every vertex satisfies v^T Q v = 0 up
/// to rounding (rays through boundary points stay on the boundary).
inline SurfaceMesh cone_surface(const ConeConstruction& cc, int resolution) {
  if (cc.dim() != 3) throw dimension_error("cone_surface: only 3-D cones are supported");
  if (resolution < 1) throw invalid_input("cone_surface: resolution must be >= 1");
  const int n_theta = 8 * resolution;
  const int n_rings = 2 * resolution;
  const auto [anchor, frame] = detail::base_ring(cc);

  SurfaceMesh mesh;
  mesh.name = "cone";
  mesh.vertices.reserve(1 + static_cast<std::size_t>(n_theta) * n_rings);
  mesh.vertices.emplace_back(Eigen::Vector3d::Zero());
  for (int k = 1; k <= n_rings; ++k) {
    const double scale = static_cast<double>(k) / n_rings;
    for (int j = 0; j < n_theta; ++j) {
      const double t = 2.0 * M_PI * j / n_theta;
      const Eigen::Vector3d on_ring =
          anchor + frame * Eigen::Vector2d(std::cos(t), std::sin(t));
      mesh.vertices.emplace_back(scale * on_ring);
    }
  }

  const auto ring_index = [n_theta](int ring, int j) {
    return 1 + (ring - 1) * n_theta + (j % n_theta);
  };
  for (int j = 0; j < n_theta; ++j)
    mesh.faces.push_back({0, ring_index(1, j), ring_index(1, j + 1)});
  for (int k = 1; k < n_rings; ++k)
    for (int j = 0; j < n_theta; ++j) {
      const int a = ring_index(k, j);
      const int b = ring_index(k, j + 1);
      const int c = ring_index(k + 1, j + 1);
      const int d = ring_index(k + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  return mesh;
}

/// Surface of the cone's base set (the Dikin ellipsoid, or the unit tangent
/// sphere) on a latitude/longitude grid: two poles plus
/// (8*resolution)*(4*resolution - 1) ring vertices.
inline SurfaceMesh ellipsoid_surface(const ConeConstruction& cc, int resolution) {
  if (cc.dim() != 3) throw dimension_error("ellipsoid_surface: only 3-D bases are supported");
  if (resolution < 1) throw invalid_input("ellipsoid_surface: resolution must be >= 1");
  const int n_theta = 8 * resolution;
  const int n_phi = 4 * resolution;
  const Eigen::Vector3d center = cc.base_center();
  const Eigen::Vector3d radii =
      cc.source() ? Eigen::Vector3d(cc.source()->center()) : Eigen::Vector3d::Ones();

  SurfaceMesh mesh;
  mesh.name = "ellipsoid";
  mesh.vertices.reserve(2 + static_cast<std::size_t>(n_theta) * (n_phi - 1));
  mesh.vertices.emplace_back(center + Eigen::Vector3d(0, 0, radii.z()));
  for (int i = 1; i < n_phi; ++i) {
    const double phi = M_PI * i / n_phi;
    for (int j = 0; j < n_theta; ++j) {
      const double t = 2.0 * M_PI * j / n_theta;
      const Eigen::Vector3d u(std::sin(phi) * std::cos(t), std::sin(phi) * std::sin(t),
                              std::cos(phi));
      mesh.vertices.emplace_back(center + radii.cwiseProduct(u));
    }
  }
  mesh.vertices.emplace_back(center - Eigen::Vector3d(0, 0, radii.z()));

  const auto ring_index = [n_theta](int ring, int j) {
    return 1 + (ring - 1) * n_theta + (j % n_theta);
  };
  const int south = 1 + (n_phi - 1) * n_theta;
  for (int j = 0; j < n_theta; ++j)
    mesh.faces.push_back({0, ring_index(1, j), ring_index(1, j + 1)});
  for (int i = 1; i < n_phi - 1; ++i)
    for (int j = 0; j < n_theta; ++j) {
      const int a = ring_index(i, j);
      const int b = ring_index(i, j + 1);
      const int c = ring_index(i + 1, j + 1);
      const int d = ring_index(i + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  for (int j = 0; j < n_theta; ++j)
    mesh.faces.push_back({south, ring_index(n_phi - 1, j + 1), ring_index(n_phi - 1, j)});
  return mesh;
}

namespace detail {

inline std::string format_coordinate(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace detail

/// Wavefront OBJ with one named object per mesh; face indices are one-based
/// and global across objects, per the format.
inline void write_obj(std::ostream& out, const std::vector<SurfaceMesh>& meshes) {
  int offset = 0;
  for (const SurfaceMesh& mesh : meshes) {
    out << "o " << mesh.name << "\n";
    for (const auto& v : mesh.vertices)
      out << "v " << detail::format_coordinate(v.x()) << ' '
          << detail::format_coordinate(v.y()) << ' ' << detail::format_coordinate(v.z())
          << "\n";
    for (const auto& f : mesh.faces)
      out << "f " << (f[0] + 1 + offset) << ' ' << (f[1] + 1 + offset) << ' '
          << (f[2] + 1 + offset) << "\n";
    offset += static_cast<int>(mesh.vertices.size());
  }
}

/// Plain vertex dump, one x,y,z row per vertex, meshes in order.
inline void write_csv(std::ostream& out, const std::vector<SurfaceMesh>& meshes) {
  out << "x,y,z\n";
  for (const SurfaceMesh& mesh : meshes)
    for (const auto& v : mesh.vertices)
      out << detail::format_coordinate(v.x()) << ',' << detail::format_coordinate(v.y())
          << ',' << detail::format_coordinate(v.z()) << "\n";
}

}  // namespace lcone
