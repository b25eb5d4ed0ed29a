#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pbfcontrol/fem.hpp"

namespace pbf {

/// Real spectrum of A = -M^{-1}K via the symmetric similarity
/// M^{-1/2} K M^{-1/2}: eigenvalues ascending, V the (non-orthogonal)
/// eigenvector matrix of A with V^{-1} A V = diag(lambda). Eigenvalues
/// within rel_tol * max|lambda| of each other share a cluster; A is
/// diagonalizable, so cluster size is both the algebraic and geometric
/// multiplicity.
struct Eigenstructure {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd V, Vinv;
  std::vector<int> cluster_of;           // per eigenvalue
  std::vector<int> cluster_size;         // per cluster
  std::vector<double> cluster_value;     // representative per cluster
  int nd = 0;                            // max multiplicity

  int num_clusters() const { return static_cast<int>(cluster_size.size()); }
};

Eigenstructure eigendecompose_real(const SpMat& K, const Eigen::VectorXd& M,
                                   double rel_tol = 1e-8);

/// Rank tests of (A, B) (controllability) or (A', C') passed the same way.
/// Kalman: numerical rank of [B AB ... A^{n-1}B] at threshold
/// n * eps * sigma_max; guarded above n_max. PBH: rank of [lambda I - A, B]
/// at one representative per eigenvalue cluster.
struct RankReport {
  int n = 0;
  int kalman_rank = -1;  // -1 when skipped (n > n_max)
  bool full_rank = false;
  std::vector<int> deficient_clusters;  // PBH rank < n
  int nd = 0;                           // max multiplicity over clusters
  double tol = 0.0;
};

RankReport rank_tests(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigenstructure& eig, int n_max = 200);

/// Finite-horizon gramians anchored at t0:
///   controllability  W = int_{t0}^{t1} e^{A(t-t0)} B(t)B(t)' e^{A'(t-t0)} dt
///   observability    W = int_{t0}^{t1} e^{A'(t-t0)} C(t)'C(t) e^{A(t-t0)} dt
/// by composite Simpson quadrature with the matrix exponential marched one
/// panel at a time. steps is the (even) number of intervals. The result is
/// symmetrized.
enum class GramianKind { controllability, observability };

Eigen::MatrixXd gramian_finite(const Eigen::MatrixXd& A,
                               const std::function<Eigen::MatrixXd(double)>& map,
                               GramianKind kind, double t0, double t1, int steps);

/// Closed form for constant maps via one augmented matrix exponential.
Eigen::MatrixXd gramian_closed(const Eigen::MatrixXd& A, const Eigen::MatrixXd& map,
                               GramianKind kind, double horizon);

/// Infinite-horizon Lyapunov gramian for Hurwitz diagonalizable A, solved in
/// the eigenbasis.
Eigen::MatrixXd gramian_lyapunov(const Eigenstructure& eig, const Eigen::MatrixXd& map,
                                 GramianKind kind);

/// Exact discretizations at step dt. Bilinear (Tustin):
///   Ad = (I + dt/2 A)(I - dt/2 A)^{-1},  Bd = A^{-1}(Ad - I)B.
/// Zero-order hold: Ad = e^{A dt}, Bd from the augmented exponential.
/// Both map the open left half plane into the open unit disk, so rho < 1
/// for Hurwitz A; rho is reported for the caller to verify.
enum class DiscretizeMethod { bilinear, zoh };

struct Discrete {
  Eigen::MatrixXd Ad, Bd;
  double dt = 0.0;
  double rho = 0.0;  // spectral radius of Ad
};

Discrete discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt,
                    DiscretizeMethod method);

}  // namespace pbf
