#include "pbfcontrol/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace pbf {

Eigen::MatrixXd gramian_discrete_c(const Eigen::MatrixXd& Ad,
                                   const std::function<Eigen::MatrixXd(int)>& Bd, int K) {
  const int n = static_cast<int>(Ad.rows());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXd PB = P * Bd(k);
    W.noalias() += PB * PB.transpose();
    if (k + 1 < K) P = Ad * P;
  }
  return 0.5 * (W + W.transpose());
}

Eigen::MatrixXd gramian_discrete_c(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                   int K) {
  return gramian_discrete_c(Ad, [&](int) { return Bd; }, K);
}

Eigen::MatrixXd gramian_discrete_o(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                                   int K) {
  const int n = static_cast<int>(Ad.rows());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd L = Cd;
  for (int k = 0; k <= K; ++k) {
    W.noalias() += L.transpose() * L;
    if (k < K) L = L * Ad;
  }
  return 0.5 * (W + W.transpose());
}

MinEnergyResult min_control_energy(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                   const Eigen::MatrixXd& Wc, const Eigen::VectorXd& xf,
                                   int K) {
  const int n = static_cast<int>(Ad.rows());
  const int m = static_cast<int>(Bd.cols());
  MinEnergyResult r;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Wc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = n * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol)
      inv(i) = 1.0 / sv(i);
    else
      ++r.dropped;
  }
  const Eigen::VectorXd p =
      svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * xf);
  r.energy = xf.dot(p);

  // least-norm sequence, then replay it to expose unreachable targets
  r.u.resize(m, K);
  Eigen::VectorXd v = p;
  for (int k = K - 1; k >= 0; --k) {
    r.u.col(k) = Bd.transpose() * v;
    v = Ad.transpose() * v;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < K; ++k) x = Ad * x + Bd * r.u.col(k);
  const double scale = std::max(xf.norm(), std::numeric_limits<double>::min());
  r.residual_rel = (x - xf).norm() / scale;
  r.reachable = r.residual_rel <= 1e-6;
  return r;
}

double observation_energy(const Eigen::MatrixXd& Wo, const Eigen::VectorXd& x0) {
  return x0.dot(Wo * x0);
}

double observation_energy_sim(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                              const Eigen::VectorXd& x0, int K) {
  double total = 0.0;
  Eigen::VectorXd x = x0;
  for (int k = 0; k <= K; ++k) {
    total += (Cd * x).squaredNorm();
    if (k < K) x = Ad * x;
  }
  return total;
}

std::vector<ModalBound> modal_bounds(const Eigenstructure& eig, double dt,
                                     DiscretizeMethod method,
                                     const std::function<Eigen::MatrixXd(int)>& Bd, int K,
                                     bool clip_last) {
  const int n = static_cast<int>(eig.lambda.size());
  Eigen::VectorXd lam_d(n);
  for (int i = 0; i < n; ++i) {
    const double l = eig.lambda(i);
    lam_d(i) = method == DiscretizeMethod::bilinear
                   ? (1.0 + 0.5 * dt * l) / (1.0 - 0.5 * dt * l)
                   : std::exp(l * dt);
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  const int k_max = clip_last ? K - 1 : K;
  for (int k = 0; k <= k_max; ++k) {
    const Eigen::MatrixXd G = eig.Vinv * Bd(k);
    const Eigen::VectorXd rn2 = G.rowwise().squaredNorm();
    for (int i = 0; i < n; ++i)
      acc(i) += std::pow(lam_d(i), 2.0 * (K - k - 1)) * rn2(i);
  }

  std::vector<ModalBound> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].mode = i;
    out[i].lambda = eig.lambda(i);
    out[i].lambda_d = lam_d(i);
    out[i].eta_star = std::sqrt(acc(i));
  }
  std::sort(out.begin(), out.end(),
            [](const ModalBound& a, const ModalBound& b) { return a.eta_star > b.eta_star; });
  return out;
}

std::vector<SweepRow> energy_sweep(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                                   const std::vector<std::array<double, 3>>& coords,
                                   const std::array<double, 3>& center,
                                   const std::vector<double>& radii, SweepMode mode, int K) {
  const int n = static_cast<int>(coords.size());
  const Eigen::MatrixXd Wo = gramian_discrete_o(Ad, Cd, K);

  std::vector<SweepRow> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    SweepRow row;
    row.radius = r;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      const double dx = coords[i][0] - center[0];
      const double dy = coords[i][1] - center[1];
      const double dz = coords[i][2] - center[2];
      if (std::sqrt(dx * dx + dy * dy + dz * dz) <= r + 1e-12) {
        x0(i) = 1.0;
        ++row.enclosed;
      }
    }
    if (mode == SweepMode::unit_norm && row.enclosed > 0) x0 /= x0.norm();
    row.energy = observation_energy(Wo, x0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pbf
