#include "pbfcontrol/system.hpp"

#include <cmath>
#include <stdexcept>

namespace pbf {

namespace {

constexpr double kGauss = 0.5773502691896257;

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

// quadrature data of one exposed top face: global free ids, per-node weight
// at each gauss point, gauss point positions
struct FaceQuad {
  std::vector<int> free_ids;            // -1 for constrained nodes
  std::vector<std::array<double, 2>> gp_xy;
  std::vector<Eigen::VectorXd> gp_w;    // N_a * dS at each gauss point
};

std::vector<FaceQuad> top_face_quadrature(const ThermalModel& model, const Mesh& mesh) {
  std::vector<FaceQuad> out;
  out.reserve(mesh.omega_elems.size());
  for (int e : mesh.omega_elems) {
    auto ids = mesh.top_face_nodes(e);
    const int nfp = static_cast<int>(ids.size());
    FaceQuad fq;
    for (int id : ids) fq.free_ids.push_back(model.node2free[id]);
    if (nfp == 2) {
      const auto& a = mesh.nodes[ids[0]];
      const auto& b = mesh.nodes[ids[1]];
      const double len = std::abs(b[0] - a[0]);
      for (int g = 0; g < 2; ++g) {
        const double xi = g ? kGauss : -kGauss;
        Eigen::VectorXd w(2);
        w << 0.5 * (1 - xi) * 0.5 * len, 0.5 * (1 + xi) * 0.5 * len;
        fq.gp_w.push_back(w);
        fq.gp_xy.push_back({0.5 * (a[0] + b[0]) + 0.5 * xi * (b[0] - a[0]), 0.0});
      }
    } else {
      // square face, nodes counterclockwise seen from above
      std::array<std::array<double, 2>, 4> X;
      for (int i = 0; i < 4; ++i) X[i] = {mesh.nodes[ids[i]][0], mesh.nodes[ids[i]][1]};
      const double area = mesh.h * mesh.h;
      for (int g = 0; g < 4; ++g) {
        const double xi = (g & 1) ? kGauss : -kGauss;
        const double eta = (g & 2) ? kGauss : -kGauss;
        const std::array<double, 4> sx{-1, 1, 1, -1}, sy{-1, -1, 1, 1};
        Eigen::VectorXd w(4);
        double px = 0.0, py = 0.0;
        for (int a = 0; a < 4; ++a) {
          const double N = 0.25 * (1 + sx[a] * xi) * (1 + sy[a] * eta);
          w(a) = N * area / 4.0;  // |J| = area/4 on an axis-aligned square
          px += N * X[a][0];
          py += N * X[a][1];
        }
        fq.gp_w.push_back(w);
        fq.gp_xy.push_back({px, py});
      }
    }
    out.push_back(std::move(fq));
  }
  return out;
}

double combined_peak_speed(const std::vector<LaserConfig>& lasers) {
  double v = 0.0;
  for (const auto& l : lasers)
    v = std::max(v, std::hypot(l.path.max_speed_x(), l.path.max_speed_y()));
  return v;
}

}  // namespace

double gaussian_flux(const std::vector<LaserConfig>& lasers, double x, double y, double t) {
  double q = 0.0;
  for (const auto& l : lasers) {
    const double dx = x - l.path.x(t);
    const double dy = y - l.path.y(t);
    q += l.P0 / std::sqrt(2.0 * M_PI * l.sigma2_0) *
         std::exp(-(dx * dx + dy * dy) / (2.0 * l.sigma2_0));
  }
  return q;
}

Eigen::MatrixXd build_B_uniform(const ThermalModel& model, const Mesh& mesh) {
  const int m = static_cast<int>(mesh.omega_elems.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(model.n(), m);
  for (int j = 0; j < m; ++j) {
    const int e = mesh.omega_elems[j];
    auto ids = mesh.top_face_nodes(e);
    Eigen::MatrixXd X(static_cast<int>(ids.size()), mesh.dim == 3 ? 3 : 2);
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const auto& p = mesh.nodes[ids[a]];
      if (mesh.dim == 3)
        X.row(static_cast<int>(a)) << p[0], p[1], p[2];
      else
        X.row(static_cast<int>(a)) << p[0], p[2];
    }
    Eigen::VectorXd w = surface_load_weights(X);
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const int fr = model.node2free[ids[a]];
      if (fr >= 0) B(fr, j) = w(static_cast<int>(a)) / model.M(fr);
    }
  }
  return B;
}

Eigen::VectorXd gaussian_load(const ThermalModel& model, const Mesh& mesh,
                              const std::vector<LaserConfig>& lasers, double t,
                              double power_scale) {
  auto faces = top_face_quadrature(model, mesh);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(model.n());
  for (const auto& fq : faces)
    for (std::size_t g = 0; g < fq.gp_xy.size(); ++g) {
      const double q = power_scale * gaussian_flux(lasers, fq.gp_xy[g][0], fq.gp_xy[g][1], t);
      for (std::size_t a = 0; a < fq.free_ids.size(); ++a)
        if (fq.free_ids[a] >= 0) r(fq.free_ids[a]) += fq.gp_w[g](static_cast<int>(a)) * q;
    }
  return r;
}

std::function<Eigen::MatrixXd(double)> build_B_gaussian(const ThermalModel& model,
                                                        const Mesh& mesh,
                                                        const std::vector<LaserConfig>& lasers,
                                                        const RampConfig& ramp) {
  if (lasers.empty()) throw std::invalid_argument("linearized actuation needs a laser");
  auto faces = top_face_quadrature(model, mesh);
  const int n = model.n();
  const int m = 2 * static_cast<int>(lasers.size());

  // node positions and top-surface membership for gating and flooring
  std::vector<std::array<double, 2>> pos(n);
  std::vector<std::uint8_t> on_top(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto& p = mesh.nodes[model.free2node[i]];
    pos[i] = {p[0], p[1]};
    on_top[i] = (mesh.labels[model.free2node[i]] & kOmega) ? 1 : 0;
  }
  const double vpeak = combined_peak_speed(lasers);

  return [=, lasers = lasers, M = model.M](double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, m);
    for (std::size_t li = 0; li < lasers.size(); ++li) {
      const auto& l = lasers[li];
      const double bx = l.path.x(t), by = l.path.y(t);
      const double s2 = l.sigma2_0;
      const double norm = 1.0 / std::sqrt(2.0 * M_PI * s2);
      const int cp = 2 * static_cast<int>(li), cs = cp + 1;
      for (const auto& fq : faces)
        for (std::size_t g = 0; g < fq.gp_xy.size(); ++g) {
          const double dx = fq.gp_xy[g][0] - bx, dy = fq.gp_xy[g][1] - by;
          const double d2 = dx * dx + dy * dy;
          const double gPhi = norm * std::exp(-d2 / (2.0 * s2));
          const double dP = gPhi;
          const double dS = l.P0 * gPhi * (-0.5 / s2 + d2 / (2.0 * s2 * s2));
          for (std::size_t a = 0; a < fq.free_ids.size(); ++a) {
            const int fr = fq.free_ids[a];
            if (fr < 0) continue;
            B(fr, cp) += fq.gp_w[g](static_cast<int>(a)) * dP;
            B(fr, cs) += fq.gp_w[g](static_cast<int>(a)) * dS;
          }
        }
      // scale by the capacities, then gate to the 6 sigma footprint and
      // apply the sign-preserving floor: final entries vary smoothly yet
      // never vanish on the top surface
      B.col(cp).array() /= M.array();
      B.col(cs).array() /= M.array();
      const double sigma = std::sqrt(s2);
      const double r_cut = 6.0 * sigma;
      double band = std::max(0.5 * sigma, 1.5 * vpeak * ramp.tau);
      band = std::min(band, 0.5 * r_cut);
      for (int i = 0; i < n; ++i) {
        if (!on_top[i]) {
          B(i, cp) = B(i, cs) = 0.0;  // interior rows carry no actuation
          continue;
        }
        const double d = std::hypot(pos[i][0] - bx, pos[i][1] - by);
        const double gate = smoothstep((r_cut - d) / band);
        for (int c : {cp, cs}) {
          double v = B(i, c) * gate;
          B(i, c) = v + (v < 0.0 ? -ramp.eps_B : ramp.eps_B);
        }
      }
    }
    return B;
  };
}

Eigen::MatrixXd build_C_fixed(const ThermalModel& model, const Mesh& mesh,
                              const CameraConfig& cam) {
  const int n = model.n();
  std::vector<int> picks;
  if (cam.pyrometer) {
    int best = -1;
    double best_d = 0.0;
    for (int i = 0; i < n; ++i) {
      const int nd = model.free2node[i];
      if (!(mesh.labels[nd] & kOmega)) continue;
      const auto& p = mesh.nodes[nd];
      const double d = std::hypot(p[0] - cam.cx, mesh.dim == 3 ? p[1] - cam.cy : 0.0);
      if (best < 0 || d < best_d) {  // ties keep the lowest node id
        best = i;
        best_d = d;
      }
    }
    if (best < 0) throw std::invalid_argument("no top-surface nodes to observe");
    picks.push_back(best);
  } else {
    for (int i = 0; i < n; ++i) {
      const int nd = model.free2node[i];
      if (!(mesh.labels[nd] & kOmega)) continue;
      const auto& p = mesh.nodes[nd];
      if (std::abs(p[0] - cam.cx) > cam.wx / 2) continue;
      if (mesh.dim == 3 && std::abs(p[1] - cam.cy) > cam.wy / 2) continue;
      picks.push_back(i);
    }
    if (picks.empty()) throw std::invalid_argument("fixed window covers no nodes");
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<int>(picks.size()), n);
  for (std::size_t r = 0; r < picks.size(); ++r) C(static_cast<int>(r), picks[r]) = 1.0;
  return C;
}

std::function<Eigen::MatrixXd(double)> build_C_coaxial(const ThermalModel& model,
                                                       const Mesh& mesh,
                                                       const std::vector<LaserConfig>& lasers,
                                                       const CameraConfig& cam,
                                                       const RampConfig& ramp) {
  if (lasers.empty()) throw std::invalid_argument("a moving window tracks the first laser");
  const int n = model.n();
  std::vector<int> rows;  // free ids of top nodes, ascending
  for (int i = 0; i < n; ++i)
    if (mesh.labels[model.free2node[i]] & kOmega) rows.push_back(i);
  if (rows.empty()) throw std::invalid_argument("no top-surface nodes to observe");

  double wx = cam.pyrometer ? mesh.h : cam.wx;
  double wy = cam.pyrometer ? mesh.h : cam.wy;
  if (!(wx > 0.0) || (mesh.dim == 3 && !(wy > 0.0)))
    throw std::invalid_argument("window extents must be positive");
  const RasterPath& path = lasers.front().path;

  // margin in normalized window units so the entry slope never exceeds
  // (1 - eps_C)/tau
  double vn = path.max_speed_x() / (wx / 2);
  if (mesh.dim == 3) vn = std::max(vn, path.max_speed_y() / (wy / 2));
  const double margin = std::max(1.5 * vn * ramp.tau, 1e-9);

  std::vector<std::array<double, 2>> pos(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& p = mesh.nodes[model.free2node[rows[r]]];
    pos[r] = {p[0], p[1]};
  }
  const int dim = mesh.dim;
  const double eps_C = ramp.eps_C;
  const double ox = cam.cx, oy = cam.cy;

  return [=, rows = rows, pos = pos](double t) -> Eigen::MatrixXd {
    const double cx = path.x(t) + ox;
    const double cy = path.y(t) + oy;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double d = std::abs(pos[r][0] - cx) / (wx / 2);
      if (dim == 3) d = std::max(d, std::abs(pos[r][1] - cy) / (wy / 2));
      const double s = smoothstep((1.0 + margin - d) / margin);
      C(static_cast<int>(r), rows[r]) = eps_C + (1.0 - eps_C) * s;
    }
    return C;
  };
}

CaseSystem build_case(int case_id, const ThermalModel& model, const Mesh& mesh,
                      const std::vector<LaserConfig>& lasers, const CameraConfig& cam,
                      const RampConfig& ramp) {
  if (case_id < 1 || case_id > 4) throw std::invalid_argument("case id must be 1..4");
  const bool tv_B = case_id >= 3;
  const bool tv_C = case_id == 2 || case_id == 4;
  if (tv_B && lasers.empty()) throw std::invalid_argument("cases 3 and 4 need a laser");

  CaseSystem s;
  s.case_id = case_id;
  s.A = build_A(model);
  s.n = model.n();
  s.M = model.M;
  s.f = model.f;
  s.free2node = model.free2node;
  s.coords.resize(model.n());
  for (int i = 0; i < model.n(); ++i) s.coords[i] = mesh.nodes[model.free2node[i]];
  for (int i = 0; i < model.n(); ++i)
    if (mesh.labels[model.free2node[i]] & kOmega) s.omega_free.push_back(i);

  if (tv_B) {
    s.m = 2 * static_cast<int>(lasers.size());
    s.B = build_B_gaussian(model, mesh, lasers, ramp);
    s.u0.resize(s.m);
    for (std::size_t i = 0; i < lasers.size(); ++i) {
      s.u0(2 * i) = lasers[i].P0;
      s.u0(2 * i + 1) = lasers[i].sigma2_0;
    }
    for (int i : s.omega_free)
      for (int c = 0; c < s.m; ++c) s.b_pattern.emplace_back(i, c);
  } else {
    s.B0 = build_B_uniform(model, mesh);
    s.m = static_cast<int>(s.B0.cols());
    s.B = [B0 = s.B0](double) { return B0; };
    for (int j = 0; j < s.B0.cols(); ++j)
      for (int i = 0; i < s.B0.rows(); ++i)
        if (s.B0(i, j) != 0.0) s.b_pattern.emplace_back(i, j);
  }

  if (tv_C) {
    auto C = build_C_coaxial(model, mesh, lasers, cam, ramp);
    Eigen::MatrixXd C0 = C(0.0);
    s.p = static_cast<int>(C0.rows());
    s.C = std::move(C);
    for (int r = 0; r < s.p; ++r)
      for (int j = 0; j < C0.cols(); ++j)
        if (C0(r, j) != 0.0) s.c_pattern.emplace_back(r, j);
  } else {
    s.C0 = build_C_fixed(model, mesh, cam);
    s.p = static_cast<int>(s.C0.rows());
    s.C = [C0 = s.C0](double) { return C0; };
    for (int r = 0; r < s.p; ++r)
      for (int j = 0; j < s.C0.cols(); ++j)
        if (s.C0(r, j) != 0.0) s.c_pattern.emplace_back(r, j);
  }
  return s;
}

}  // namespace pbf
