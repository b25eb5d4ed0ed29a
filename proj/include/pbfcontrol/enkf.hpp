#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pbfcontrol/spectral.hpp"
#include "pbfcontrol/system.hpp"

namespace pbf {

/// Continuous noise powers per channel; the discrete variance at step dt is
/// power / dt. Process noise perturbs the laser powers of the reference
/// simulation and enters the filter model through Bd; measurement noise is
/// added to every measurement row.
struct NoiseModel {
  double process_power = 0.0;      // mW^2 * s per laser
  double measurement_power = 0.0;  // K^2 * s per measurement row
};

/// Reference ("truth") trajectory: implicit Euler on M x' = -K x + r(t) + f
/// with the nonlinear Gaussian actuation and its own material set, at a fine
/// step dt/substeps, sampled every dt. Row k of T is the free-node
/// temperature at t = k dt (T[0] = x0). Throws std::runtime_error when the
/// integration produces a non-finite state.
Eigen::MatrixXd reference_simulate(const ThermalModel& model, const Mesh& mesh,
                                   const std::vector<LaserConfig>& lasers,
                                   double process_power, double dt, int steps,
                                   int substeps, const Eigen::VectorXd& x0,
                                   std::uint64_t seed);

/// One EnKF analysis step: Z (n x N) forecast ensemble, Y (p x N) perturbed
/// measurements; the measurement covariance is the sample covariance of Y's
/// perturbations. The gain uses a truncated-SVD pseudo-inverse at threshold
/// p * eps * sigma_max.
Eigen::MatrixXd enkf_update(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& Cd);

/// Full twin experiment: truth with its own materials + nonlinear actuation,
/// filter on the bilinear-discretized linear model, open-loop companion run
/// of the same model without measurement updates.
struct FilterConfig {
  int N = 100;
  double dt = 1e-4;
  int steps = 400;
  int substeps = 10;
  std::uint64_t seed = 0;
  NoiseModel noise;
  Material truth_material;  // reference simulator materials
};

struct FilterRun {
  Eigen::VectorXd t;        // steps+1 sample times
  Eigen::VectorXd rms_cl;   // |truth - filter mean| RMS over nodes, per step
  Eigen::VectorXd rms_ol;   // |truth - open loop| RMS over nodes
  Eigen::MatrixXd truth;    // (steps+1) x n
  Eigen::MatrixXd mean_cl;  // filter ensemble mean trajectory
  Eigen::MatrixXd mean_ol;
  double final_ratio = 0.0;  // rms_cl / rms_ol at the final step
};

FilterRun run_filter(const CaseSystem& sys, const ThermalModel& model, const Mesh& mesh,
                     const std::vector<LaserConfig>& lasers, const FilterConfig& cfg);

}  // namespace pbf
