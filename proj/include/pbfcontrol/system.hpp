#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbfcontrol/fem.hpp"
#include "pbfcontrol/paths.hpp"

namespace pbf {

/// One laser: Gaussian irradiance of total power P0 (mW) and variance
/// sigma2_0 (mm^2) centered on the path. The linearized input maps expand
/// about (P0, sigma2_0).
struct LaserConfig {
  double P0 = 0.0;
  double sigma2_0 = 1.0;
  RasterPath path;
};

/// Thermal camera or pyrometer watching the top surface. Fixed mode selects
/// the nodes inside a static window; moving mode tracks the first laser's
/// path at a constant offset. A pyrometer is a window of one node spacing.
struct CameraConfig {
  bool moving = false;
  double cx = 0.0, cy = 0.0;   // window center (fixed) or offset from the beam (moving)
  double wx = 0.0, wy = 0.0;   // window extents, mm; wy ignored on planar meshes
  bool pyrometer = false;      // fixed mode: single row on the nearest top node
};

/// Floors and ramp duration for time-varying input/output maps. Entries
/// never vanish, so the sparsity pattern is constant in t.
struct RampConfig {
  double eps_B = 1e-12;
  double eps_C = 1e-9;
  double tau = 5e-4;  // ramp duration, s (default five 1e-4 s steps)
};

/// Gaussian surface flux of all lasers at point (x, y), mW/mm^2.
double gaussian_flux(const std::vector<LaserConfig>& lasers, double x, double y, double t);

/// Linear state-space model x' = Ax + Bu (+f/M), y = Cx on the free nodes.
/// Cases: 1 = constant B, C; 2 = constant B, moving window C(t);
/// 3 = linearized laser B(t), constant C; 4 = both time-varying.
/// Evaluators are always callable; for constant maps they return the stored
/// matrix. Patterns list the structurally nonzero (row, col) pairs, floors
/// counted as nonzero.
struct CaseSystem {
  int case_id = 1;
  int n = 0, m = 0, p = 0;
  SpMat A;
  Eigen::MatrixXd B0, C0;
  std::function<Eigen::MatrixXd(double)> B, C;
  std::vector<std::pair<int, int>> b_pattern, c_pattern;
  Eigen::VectorXd u0;  // linearization point for cases 3/4: (P, sigma^2) per laser

  // Mesh context carried for downstream target construction and reporting.
  Eigen::VectorXd M;                          // free lumped capacities
  Eigen::VectorXd f;                          // elimination load, mW
  std::vector<std::array<double, 3>> coords;  // free node positions
  std::vector<int> omega_free;                // free indices on the top surface
  std::vector<int> free2node;
};

/// One column per element owning an exposed top face: column e distributes a
/// uniform flux u_e (mW/mm^2) over that face, scaled by M^{-1}. Columns are
/// nonnegative with at most nodes-per-face nonzeros.
Eigen::MatrixXd build_B_uniform(const ThermalModel& model, const Mesh& mesh);

/// Nonlinear actuation: thermal load vector r(t) (mW, free nodes) of the
/// Gaussian flux integrated over the top faces. Feeds the reference
/// (truth) simulator; power_scale perturbs every laser's power jointly.
Eigen::VectorXd gaussian_load(const ThermalModel& model, const Mesh& mesh,
                              const std::vector<LaserConfig>& lasers, double t,
                              double power_scale = 1.0);

/// Linearized laser actuation about u0 = (P0, sigma2_0) per laser: column
/// 2i is d r / d P_i, column 2i+1 is d r / d sigma2_i, both M^{-1}-scaled,
/// smoothly gated to the floor eps_B outside a 6 sigma footprint.
std::function<Eigen::MatrixXd(double)> build_B_gaussian(const ThermalModel& model,
                                                        const Mesh& mesh,
                                                        const std::vector<LaserConfig>& lasers,
                                                        const RampConfig& ramp);

/// Fixed field of view: one row per top node inside the window (entry 1), or
/// a single row on the nearest top node for a pyrometer (ties to the lowest
/// node id).
Eigen::MatrixXd build_C_fixed(const ThermalModel& model, const Mesh& mesh,
                              const CameraConfig& cam);

/// Moving window: one row per top node; the entry ramps between eps_C and 1
/// as the window covers the node, with slope at most (1 - eps_C)/tau.
std::function<Eigen::MatrixXd(double)> build_C_coaxial(const ThermalModel& model,
                                                       const Mesh& mesh,
                                                       const std::vector<LaserConfig>& lasers,
                                                       const CameraConfig& cam,
                                                       const RampConfig& ramp);

/// Assembles the requested case. Lasers are required for cases 3/4 and for
/// a moving camera; the camera is required for all cases.
CaseSystem build_case(int case_id, const ThermalModel& model, const Mesh& mesh,
                      const std::vector<LaserConfig>& lasers, const CameraConfig& cam,
                      const RampConfig& ramp = {});

}  // namespace pbf
