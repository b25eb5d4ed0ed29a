#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pbfcontrol/spectral.hpp"

namespace pbf {

/// K-step discrete gramians
///   Wc = sum_{k=0}^{K-1} Ad^k Bd[k] Bd[k]' (Ad')^k
///   Wo = sum_{k=0}^{K}   (Ad')^k Cd'Cd Ad^k
/// Bd may vary per step (pass an evaluator); Cd is constant here because
/// observation energy sweeps use a fixed window.
Eigen::MatrixXd gramian_discrete_c(const Eigen::MatrixXd& Ad,
                                   const std::function<Eigen::MatrixXd(int)>& Bd, int K);
Eigen::MatrixXd gramian_discrete_c(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                   int K);
Eigen::MatrixXd gramian_discrete_o(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                                   int K);

/// Minimum energy driving 0 -> xf in K steps: E = xf' Wc^+ xf with the
/// pseudo-inverse truncated at n * eps * sigma_max. The least-norm input
/// u[k] = Bd'(Ad')^{K-1-k} Wc^+ xf is synthesized and replayed; the replay
/// residual |x[K] - xf| / |xf| exceeding 1e-6 marks xf (numerically)
/// unreachable.
struct MinEnergyResult {
  double energy = 0.0;
  Eigen::MatrixXd u;         // m x K input sequence
  double residual_rel = 0.0;
  bool reachable = false;
  int dropped = 0;           // gramian directions below the rank threshold
};

MinEnergyResult min_control_energy(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                   const Eigen::MatrixXd& Wc, const Eigen::VectorXd& xf,
                                   int K);

/// Output energy of the free response from x0: x0' Wo x0, which equals
/// sum_{k=0}^{K} |y[k]|^2.
double observation_energy(const Eigen::MatrixXd& Wo, const Eigen::VectorXd& x0);

/// The same sum by direct simulation (identity check).
double observation_energy_sim(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                              const Eigen::VectorXd& x0, int K);

/// Per-mode reachability bound over inputs of unit total energy
/// (sum_k |u[k]|^2 = 1):
///   eta_i* = sqrt( sum_{k=0}^{K} lambda_i^{2(K-k-1)} |row_i(V^{-1} Bd[k])|^2 ).
/// The k = K term carries exponent -1 as written; clip_last drops it to
/// K-1 instead. Modes are returned sorted by descending bound.
struct ModalBound {
  int mode = 0;
  double lambda = 0.0;       // continuous-time eigenvalue
  double lambda_d = 0.0;     // discrete eigenvalue
  double eta_star = 0.0;
};

std::vector<ModalBound> modal_bounds(const Eigenstructure& eig, double dt,
                                     DiscretizeMethod method,
                                     const std::function<Eigen::MatrixXd(int)>& Bd, int K,
                                     bool clip_last = false);

/// Observation-energy sweep over growing target sets: nodes of the mesh
/// within radius r of a top-surface center point. const_T sets the enclosed
/// nodes to 1 K; unit_norm scales the same indicator to unit 2-norm.
enum class SweepMode { const_T, unit_norm };

struct SweepRow {
  double radius = 0.0;
  int enclosed = 0;
  double energy = 0.0;
};

std::vector<SweepRow> energy_sweep(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                                   const std::vector<std::array<double, 3>>& coords,
                                   const std::array<double, 3>& center,
                                   const std::vector<double>& radii, SweepMode mode, int K);

}  // namespace pbf
