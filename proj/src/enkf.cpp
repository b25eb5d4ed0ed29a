#include "pbfcontrol/enkf.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

namespace pbf {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Eigen::MatrixXd pinv_truncated(const Eigen::MatrixXd& X, int rank_dim) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol =
      rank_dim * std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Eigen::MatrixXd reference_simulate(const ThermalModel& model, const Mesh& mesh,
                                   const std::vector<LaserConfig>& lasers,
                                   double process_power, double dt, int steps,
                                   int substeps, const Eigen::VectorXd& x0,
                                   std::uint64_t seed) {
  const int n = model.n();
  const double h = dt / substeps;

  SpMat lhs = model.K;
  for (int i = 0; i < n; ++i) lhs.coeffRef(i, i) += model.M(i) / h;
  lhs.makeCompressed();
  Eigen::SimplicialLDLT<SpMat> solver(lhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("reference model factorization failed");

  std::mt19937_64 rng(mix(seed, 0));
  std::normal_distribution<double> gauss;
  const double w_std = process_power > 0.0 ? std::sqrt(process_power / h) : 0.0;

  Eigen::MatrixXd T(steps + 1, n);
  Eigen::VectorXd x = x0;
  if (!x.allFinite()) throw std::runtime_error("non-finite reference state");
  T.row(0) = x.transpose();

  for (int k = 0; k < steps; ++k) {
    for (int s = 0; s < substeps; ++s) {
      const double t_next = (static_cast<double>(k) * substeps + s + 1) * h;
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      for (const auto& laser : lasers) {
        double scale = 1.0;
        if (w_std > 0.0 && laser.P0 != 0.0)
          scale = 1.0 + w_std * gauss(rng) / laser.P0;
        r += gaussian_load(model, mesh, {laser}, t_next, scale);
      }
      Eigen::VectorXd rhs = (model.M.array() / h * x.array()).matrix() + r + model.f;
      x = solver.solve(rhs);
    }
    if (!x.allFinite()) throw std::runtime_error("non-finite reference state");
    T.row(k + 1) = x.transpose();
  }
  return T;
}

Eigen::MatrixXd enkf_update(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& Cd) {
  const int N = static_cast<int>(Z.cols());
  const int p = static_cast<int>(Cd.rows());

  const Eigen::MatrixXd Za = Z.colwise() - Z.rowwise().mean().eval();
  const Eigen::MatrixXd Ya = Y.colwise() - Y.rowwise().mean().eval();
  const Eigen::MatrixXd S = Cd * Za;

  const double scale = 1.0 / (N - 1);
  const Eigen::MatrixXd Pyy = scale * (S * S.transpose() + Ya * Ya.transpose());
  const Eigen::MatrixXd Pzy = scale * (Za * S.transpose());

  const Eigen::MatrixXd gain = Pzy * pinv_truncated(Pyy, p);
  return Z + gain * (Y - Cd * Z);
}

FilterRun run_filter(const CaseSystem& sys, const ThermalModel& model, const Mesh& mesh,
                     const std::vector<LaserConfig>& lasers, const FilterConfig& cfg) {
  const int n = model.n();
  const double T0 = model.T0;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, T0);

  // truth integrates its own material set at the fine step
  ThermalModel truth_model =
      reduce_dirichlet(assemble_global(mesh, cfg.truth_material), mesh, T0);
  Eigen::MatrixXd truth =
      reference_simulate(truth_model, mesh, lasers, cfg.noise.process_power, cfg.dt,
                         cfg.steps, cfg.substeps, x0, mix(cfg.seed, 1));

  // filter model: bilinear transition, exact hold on the per-step load
  const Eigen::MatrixXd A = Eigen::MatrixXd(sys.A);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Ad =
      (I - 0.5 * cfg.dt * A).partialPivLu().solve(I + 0.5 * cfg.dt * A);
  const Eigen::MatrixXd G = A.partialPivLu().solve(Ad - I);

  FilterRun run;
  run.t.resize(cfg.steps + 1);
  for (int k = 0; k <= cfg.steps; ++k) run.t(k) = k * cfg.dt;
  run.truth = truth;
  run.mean_cl.resize(cfg.steps + 1, n);
  run.mean_ol.resize(cfg.steps + 1, n);
  run.rms_cl.resize(cfg.steps + 1);
  run.rms_ol.resize(cfg.steps + 1);

  const int N = cfg.N;
  Eigen::MatrixXd Z = x0.replicate(1, N);
  Eigen::VectorXd x_ol = x0;
  run.mean_cl.row(0) = x0.transpose();
  run.mean_ol.row(0) = x0.transpose();
  run.rms_cl(0) = 0.0;
  run.rms_ol(0) = 0.0;

  const double w_std =
      cfg.noise.process_power > 0.0 ? std::sqrt(cfg.noise.process_power / cfg.dt) : 0.0;
  const double v_std = cfg.noise.measurement_power > 0.0
                           ? std::sqrt(cfg.noise.measurement_power / cfg.dt)
                           : 0.0;
  std::vector<std::mt19937_64> member_rng;
  member_rng.reserve(N);
  for (int j = 0; j < N; ++j) member_rng.emplace_back(mix(cfg.seed, 1000 + j));
  std::mt19937_64 meas_rng(mix(cfg.seed, 2));
  std::normal_distribution<double> gauss;

  const int n_lasers = static_cast<int>(lasers.size());
  for (int k = 1; k <= cfg.steps; ++k) {
    const double t_prev = (k - 1) * cfg.dt;

    // per-laser loads at the hold instant, premultiplied by M^{-1}
    std::vector<Eigen::VectorXd> L(n_lasers);
    Eigen::VectorXd base = (model.f.array() / model.M.array()).matrix();
    for (int i = 0; i < n_lasers; ++i) {
      L[i] = (gaussian_load(model, mesh, {lasers[i]}, t_prev).array() /
              model.M.array())
                 .matrix();
      base += L[i];
    }
    const Eigen::VectorXd drive = G * base;

    x_ol = Ad * x_ol + drive;

    Z = (Ad * Z).eval();
    Z.colwise() += drive;
    if (w_std > 0.0) {
      for (int j = 0; j < N; ++j)
        for (int i = 0; i < n_lasers; ++i)
          if (lasers[i].P0 != 0.0)
            Z.col(j) += (w_std * gauss(member_rng[j]) / lasers[i].P0) * (G * L[i]);
    }

    // analysis with perturbed measurements of the sampled truth
    const Eigen::MatrixXd Cd = sys.C(run.t(k));
    const int p = static_cast<int>(Cd.rows());
    Eigen::VectorXd y = Cd * truth.row(k).transpose();
    for (int r = 0; r < p; ++r) y(r) += v_std * gauss(meas_rng);
    Eigen::MatrixXd Y(p, N);
    for (int j = 0; j < N; ++j) {
      Y.col(j) = y;
      for (int r = 0; r < p; ++r) Y(r, j) += v_std * gauss(meas_rng);
    }
    Z = enkf_update(Z, Y, Cd);

    run.mean_cl.row(k) = Z.rowwise().mean().transpose();
    run.mean_ol.row(k) = x_ol.transpose();
    run.rms_cl(k) = (truth.row(k) - run.mean_cl.row(k)).norm() / std::sqrt(double(n));
    run.rms_ol(k) = (truth.row(k) - run.mean_ol.row(k)).norm() / std::sqrt(double(n));
  }
  run.final_ratio = run.rms_cl(cfg.steps) / run.rms_ol(cfg.steps);
  return run;
}

}  // namespace pbf
