#include "pbfcontrol/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace pbf {

namespace {

int svd_rank(const Eigen::MatrixXd& X, double* tol_out = nullptr) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = X.rows() * std::numeric_limits<double>::epsilon() * sv(0);
  if (tol_out) *tol_out = tol;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) r += sv(i) > tol ? 1 : 0;
  return r;
}

double spectral_radius(const Eigen::MatrixXd& X) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(X, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Eigenstructure eigendecompose_real(const SpMat& K, const Eigen::VectorXd& M,
                                   double rel_tol) {
  const int n = static_cast<int>(K.rows());
  Eigen::VectorXd d = M.cwiseSqrt();
  Eigen::VectorXd dinv = d.cwiseInverse();

  // A = -M^{-1}K is similar to the symmetric -D^{-1/2} K D^{-1/2}
  Eigen::MatrixXd S = dinv.asDiagonal() * Eigen::MatrixXd(K) * dinv.asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

  Eigenstructure eig;
  eig.lambda.resize(n);
  eig.V.resize(n, n);
  eig.Vinv.resize(n, n);
  // S has eigenvalues ascending; A's are their negatives, so reverse
  for (int i = 0; i < n; ++i) {
    const int j = n - 1 - i;
    eig.lambda(i) = -es.eigenvalues()(j);
    eig.V.col(i) = dinv.asDiagonal() * es.eigenvectors().col(j);
    eig.Vinv.row(i) = es.eigenvectors().col(j).transpose() * d.asDiagonal();
  }

  const double scale = std::max(eig.lambda.cwiseAbs().maxCoeff(), 1e-300);
  eig.cluster_of.assign(n, 0);
  for (int i = 1; i < n; ++i) {
    const bool split = eig.lambda(i) - eig.lambda(i - 1) > rel_tol * scale;
    eig.cluster_of[i] = eig.cluster_of[i - 1] + (split ? 1 : 0);
  }
  const int nc = n > 0 ? eig.cluster_of.back() + 1 : 0;
  eig.cluster_size.assign(nc, 0);
  eig.cluster_value.assign(nc, 0.0);
  for (int i = 0; i < n; ++i) {
    eig.cluster_size[eig.cluster_of[i]] += 1;
    eig.cluster_value[eig.cluster_of[i]] += eig.lambda(i);
  }
  eig.nd = 0;
  for (int c = 0; c < nc; ++c) {
    eig.cluster_value[c] /= eig.cluster_size[c];
    eig.nd = std::max(eig.nd, eig.cluster_size[c]);
  }
  return eig;
}

RankReport rank_tests(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigenstructure& eig, int n_max) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  RankReport rep;
  rep.n = n;
  rep.nd = eig.nd;

  if (n <= n_max) {
    Eigen::MatrixXd ctrb(n, static_cast<long>(n) * m);
    Eigen::MatrixXd cur = B;
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(static_cast<long>(k) * m, m) = cur;
      if (k + 1 < n) cur = A * cur;
    }
    // Unit column norms: rank-preserving, and keeps the block decay |A^k B|
    // from drowning the trailing singular values in roundoff.
    for (long c = 0; c < ctrb.cols(); ++c) {
      const double len = ctrb.col(c).norm();
      if (len > 0.0) ctrb.col(c) /= len;
    }
    rep.kalman_rank = svd_rank(ctrb, &rep.tol);
  }

  Eigen::MatrixXd pbh(n, n + m);
  for (int c = 0; c < eig.num_clusters(); ++c) {
    pbh.leftCols(n) = eig.cluster_value[c] * Eigen::MatrixXd::Identity(n, n) - A;
    pbh.rightCols(m) = B;
    if (svd_rank(pbh) < n) rep.deficient_clusters.push_back(c);
  }

  const bool kalman_ok = rep.kalman_rank == -1 || rep.kalman_rank == n;
  rep.full_rank = kalman_ok && rep.deficient_clusters.empty();
  return rep;
}

Eigen::MatrixXd gramian_finite(const Eigen::MatrixXd& A,
                               const std::function<Eigen::MatrixXd(double)>& map,
                               GramianKind kind, double t0, double t1, int steps) {
  if (steps < 2 || steps % 2 != 0)
    throw std::invalid_argument("simpson rule needs an even step count");
  const int n = static_cast<int>(A.rows());
  const double h = (t1 - t0) / steps;

  const Eigen::MatrixXd Aeff =
      kind == GramianKind::controllability ? A : Eigen::MatrixXd(A.transpose());
  const Eigen::MatrixXd E = (Aeff * h).exp();

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const Eigen::MatrixXd Mt = map(t0 + k * h);
    const Eigen::MatrixXd G = kind == GramianKind::controllability
                                  ? Eigen::MatrixXd(Mt * Mt.transpose())
                                  : Eigen::MatrixXd(Mt.transpose() * Mt);
    W.noalias() += (w * h / 3.0) * (Phi * G * Phi.transpose());
    if (k < steps) Phi = Phi * E;
  }
  return 0.5 * (W + W.transpose());
}

Eigen::MatrixXd gramian_closed(const Eigen::MatrixXd& A, const Eigen::MatrixXd& map,
                               GramianKind kind, double horizon) {
  const int n = static_cast<int>(A.rows());
  const bool ctrl = kind == GramianKind::controllability;
  const Eigen::MatrixXd Aeff = ctrl ? A : Eigen::MatrixXd(A.transpose());
  const Eigen::MatrixXd Q =
      ctrl ? Eigen::MatrixXd(map * map.transpose()) : Eigen::MatrixXd(map.transpose() * map);

  // exp([[-Aeff, Q], [0, Aeff']] T) = [[*, G], [0, F]] gives W = F' G
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = -Aeff;
  H.topRightCorner(n, n) = Q;
  H.bottomRightCorner(n, n) = Aeff.transpose();
  const Eigen::MatrixXd F = (H * horizon).exp();
  Eigen::MatrixXd W =
      F.bottomRightCorner(n, n).transpose() * F.topRightCorner(n, n);
  return 0.5 * (W + W.transpose());
}

Eigen::MatrixXd gramian_lyapunov(const Eigenstructure& eig, const Eigen::MatrixXd& map,
                                 GramianKind kind) {
  const int n = static_cast<int>(eig.lambda.size());
  if (eig.lambda(n - 1) >= 0.0)
    throw std::domain_error("stationary gramian needs a Hurwitz system");
  const bool ctrl = kind == GramianKind::controllability;
  const Eigen::MatrixXd Q =
      ctrl ? Eigen::MatrixXd(map * map.transpose()) : Eigen::MatrixXd(map.transpose() * map);

  // Lyapunov equation in the eigenbasis: X_ij = -P_ij / (lambda_i + lambda_j)
  Eigen::MatrixXd P = ctrl ? Eigen::MatrixXd(eig.Vinv * Q * eig.Vinv.transpose())
                           : Eigen::MatrixXd(eig.V.transpose() * Q * eig.V);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) /= -(eig.lambda(i) + eig.lambda(j));
  Eigen::MatrixXd W = ctrl ? Eigen::MatrixXd(eig.V * P * eig.V.transpose())
                           : Eigen::MatrixXd(eig.Vinv.transpose() * P * eig.Vinv);
  return 0.5 * (W + W.transpose());
}

Discrete discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt,
                    DiscretizeMethod method) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Discrete d;
  d.dt = dt;

  if (method == DiscretizeMethod::bilinear) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    // the factors commute, so the one-sided solve is exact
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - 0.5 * dt * A);
    d.Ad = lu.solve(I + 0.5 * dt * A);
    d.Bd = A.partialPivLu().solve((d.Ad - I) * B);
  } else {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + m, n + m);
    H.topLeftCorner(n, n) = A;
    H.topRightCorner(n, m) = B;
    const Eigen::MatrixXd F = (H * dt).exp();
    d.Ad = F.topLeftCorner(n, n);
    d.Bd = F.topRightCorner(n, m);
  }
  d.rho = spectral_radius(d.Ad);
  return d;
}

}  // namespace pbf
