// End-to-end tour: build a cone over an interior-point ellipsoid, inspect its
// spectrum, then ask three different oracles whether two flows keep the cone
// invariant.

#include <cstdio>

#include <Eigen/Dense>

#include "lcone/cone.hpp"
#include "lcone/invariance.hpp"
#include "lcone/spectral.hpp"

using lcone::MatrixXd;
using lcone::VectorXd;

namespace {

void print_matrix(const char* label, const MatrixXd& m) {
  std::printf("%s\n", label);
  for (int i = 0; i < m.rows(); ++i) {
    std::printf(" ");
    for (int j = 0; j < m.cols(); ++j) std::printf(" % .6f", m(i, j));
    std::printf("\n");
  }
}

void report(const char* label, const lcone::InvarianceCertificate& cert,
            const lcone::NagumoScan& scan, const lcone::TrajectoryRecord& traj) {
  std::printf("\n%s\n", label);
  std::printf("  certificate: %s (a* = %.6f, min lambda_max = %.3e)\n",
              cert.feasible ? "feasible" : "infeasible", cert.a_star, cert.lambda_max);
  std::printf("  boundary scan: worst outward drift %.3e over %d samples%s\n", scan.worst_value,
              scan.samples, scan.counterexample ? " -> counterexample found" : "");
  if (traj.exited)
    std::printf("  trajectory: exits at t = %.4f\n", *traj.first_exit_time);
  else
    std::printf("  trajectory: stays inside for the full horizon (max defect %.3e)\n",
                traj.max_violation);
}

}  // namespace

int main() {
  // A cone whose base is the Dikin ellipsoid at c = (1, 1, 1), cut along the
  // first coordinate axis.
  const VectorXd center = VectorXd::Ones(3);
  const auto cc = lcone::construct_axis(center, 0);
  print_matrix("Cone matrix Q for the axis cut at c = (1, 1, 1):", cc.matrix());

  const auto residuals = lcone::verify_conditions(cc);
  std::printf("construction residuals: %.3e (basis), %.3e (cross), %.3e (center)\n",
              residuals.basis_block, residuals.cross_term, residuals.center_value);

  const auto spectrum = lcone::analyze_spectrum(cc.matrix(), lcone::det_axis_cone(center),
                                                lcone::lambda1_bounds_axis_cone(center, 0));
  std::printf("eigenvalues:");
  for (int i = 0; i < spectrum.eigenvalues.size(); ++i)
    std::printf(" %.6f", spectrum.eigenvalues[i]);
  std::printf("\ninertia: (%d, %d, %d), determinant %.6f (closed form %.6f)\n",
              spectrum.inertia.positive, spectrum.inertia.zero, spectrum.inertia.negative,
              spectrum.det_numeric, *spectrum.det_closed_form);
  std::printf("top eigenvalue bracket: [%.6f, %.6f]\n", *spectrum.lambda1_lower,
              *spectrum.lambda1_upper);

  // Flow 1: uniform contraction. Every ray is preserved, so all three oracles
  // should agree the cone is invariant.
  const lcone::LinearSystem contraction(-MatrixXd::Identity(3, 3));
  const VectorXd x0 = cc.cone().vertex() + center;  // the base center, inside the cone
  report("flow dx/dt = -x (contraction):",
         lcone::certify_cone(contraction, cc.matrix()),
         lcone::nagumo_falsify(contraction, cc.cone(), 20000, 42),
         lcone::simulate(contraction, cc, x0, 1e-3, 10.0));

  // Flow 2: a rotation about the third axis. It swirls mass across the cone
  // boundary, so certification must fail and the falsifier must exhibit a
  // leak.
  MatrixXd spin = MatrixXd::Zero(3, 3);
  spin(0, 1) = -1.0;
  spin(1, 0) = 1.0;
  report("flow dx/dt = (-x2, x1, 0) (rotation):",
         lcone::certify_cone(lcone::LinearSystem(spin), cc.matrix()),
         lcone::nagumo_falsify(lcone::LinearSystem(spin), cc.cone(), 20000, 42),
         lcone::simulate(lcone::LinearSystem(spin), cc, x0, 1e-3, 10.0));

  // Finally, map the cone onto its canonical form and sanity-check the
  // congruence residual.
  const auto transform = lcone::standardize(cc.cone());
  MatrixXd target = MatrixXd::Identity(3, 3);
  target(2, 2) = -1.0;
  const double residual =
      (transform.matrix().transpose() * cc.matrix() * transform.matrix() - target).norm();
  std::printf("\nstandardizing congruence residual: %.3e\n", residual);
  return 0;
}
