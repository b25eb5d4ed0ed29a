#include <doctest.h>

#include <cmath>
#include <random>

#include "pbfcontrol/system.hpp"

using namespace pbf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// 4 x 4 x 2 solid block, unit materials for easy hand numbers
Mesh block_mesh(int nx = 4, int ny = 4, int nz = 2) {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.occupancy.assign(static_cast<std::size_t>(nx) * ny * nz, 1);
  return build_mesh(g);
}

ThermalModel unit_model(const Mesh& mesh) {
  Material m;
  m.k = 1.0;
  m.rho = 1.0;
  m.c = 1.0;
  return reduce_dirichlet(assemble_global(mesh, m), mesh, 0.0);
}

LaserConfig centered_laser(double P0, double sigma2, double x_min, double x_max, double v) {
  LaserConfig l;
  l.P0 = P0;
  l.sigma2_0 = sigma2;
  l.path.x_min = x_min;
  l.path.x_max = x_max;
  l.path.v = v;
  return l;
}

}  // namespace

TEST_CASE("raster path anchors and peak speed") {
  RasterPath p;
  p.x_min = 0.0;
  p.x_max = 10.0;
  p.v = 954.0;
  CHECK(p.x(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  const double T = 2.0 * (p.x_max - p.x_min) / p.v;
  CHECK(p.x(T / 2) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(p.x(T) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(p.x(1e-3) == doctest::Approx(0.22288620869240372).epsilon(1e-12));
  CHECK(p.max_speed_x() == doctest::Approx(954.0 * M_PI / 2).epsilon(1e-12));

  // finite-difference speed never exceeds the reported peak
  for (int i = 0; i < 200; ++i) {
    double t = i * T / 200;
    double fd = std::abs(p.x(t + 1e-7) - p.x(t)) / 1e-7;
    CHECK(fd <= p.max_speed_x() * (1 + 1e-6));
  }

  p.y0 = 1.0;
  p.y1 = 3.0;
  p.t_final = 2.0;
  CHECK(p.y(0.0) == doctest::Approx(1.0));
  CHECK(p.y(1.0) == doctest::Approx(2.0));
  CHECK(p.y(5.0) == doctest::Approx(3.0));  // clamps past the end
  CHECK(p.max_speed_y() == doctest::Approx(1.0));
}

TEST_CASE("gaussian flux peak value and decay") {
  auto l = centered_laser(100.0, 0.04, 2.0, 2.0, 0.0);  // static beam at x=2
  std::vector<LaserConfig> lasers{l};
  // peak = P / sqrt(2 pi sigma^2)
  CHECK(gaussian_flux(lasers, 2.0, 0.0, 0.0) == doctest::Approx(199.47114020071635).epsilon(1e-12));
  double at_sigma = gaussian_flux(lasers, 2.2, 0.0, 0.0);
  CHECK(at_sigma == doctest::Approx(199.47114020071635 * std::exp(-0.5)).epsilon(1e-12));
  // two lasers superpose
  std::vector<LaserConfig> two{l, l};
  CHECK(gaussian_flux(two, 2.0, 0.0, 0.0) == doctest::Approx(2 * 199.47114020071635).epsilon(1e-12));
}

TEST_CASE("uniform quantized actuation on a single cube") {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = g.ny = g.nz = 1;
  g.occupancy = {1};
  Mesh mesh = build_mesh(g);
  ThermalModel model = unit_model(mesh);
  REQUIRE(model.n() == 4);  // top four nodes free

  MatrixXd B = build_B_uniform(model, mesh);
  REQUIRE(B.rows() == 4);
  REQUIRE(B.cols() == 1);
  // quarter of unit face area divided by the lumped capacity 1/8
  for (int i = 0; i < 4; ++i) CHECK(B(i, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("uniform actuation: one column per top element, nonnegative, local support") {
  Mesh mesh = block_mesh();
  ThermalModel model = unit_model(mesh);
  MatrixXd B = build_B_uniform(model, mesh);
  REQUIRE(B.cols() == static_cast<int>(mesh.omega_elems.size()));
  CHECK(B.minCoeff() >= 0.0);
  for (int j = 0; j < B.cols(); ++j) {
    int nnz = 0;
    for (int i = 0; i < B.rows(); ++i) nnz += B(i, j) > 0 ? 1 : 0;
    CHECK(nnz == 4);  // a hex top face touches four nodes
  }
}

TEST_CASE("linearized laser columns match finite differences of the nonlinear load") {
  Mesh mesh = block_mesh();
  ThermalModel model = unit_model(mesh);
  auto l = centered_laser(50.0, 0.5, 2.0, 2.0, 0.0);
  l.path.y0 = l.path.y1 = 2.0;  // beam parked mid-surface
  std::vector<LaserConfig> lasers{l};
  RampConfig ramp;

  auto B = build_B_gaussian(model, mesh, lasers, ramp);
  MatrixXd Bt = B(0.0);
  REQUIRE(Bt.cols() == 2);
  REQUIRE(Bt.rows() == model.n());

  // finite differences of the assembled nonlinear load, M-scaled
  const double hP = 1e-3;
  VectorXd rp = gaussian_load(model, mesh, lasers, 0.0, (l.P0 + hP) / l.P0);
  VectorXd rm = gaussian_load(model, mesh, lasers, 0.0, (l.P0 - hP) / l.P0);
  VectorXd dP_fd = (rp - rm).cwiseQuotient(model.M) / (2 * hP);

  auto lasers_s = lasers;
  const double hS = 1e-5;
  lasers_s[0].sigma2_0 = l.sigma2_0 + hS;
  VectorXd rsp = gaussian_load(model, mesh, lasers_s, 0.0);
  lasers_s[0].sigma2_0 = l.sigma2_0 - hS;
  VectorXd rsm = gaussian_load(model, mesh, lasers_s, 0.0);
  VectorXd dS_fd = (rsp - rsm).cwiseQuotient(model.M) / (2 * hS);

  // compare on nodes well inside the footprint (gate = 1, floor negligible)
  const double sigma = std::sqrt(l.sigma2_0);
  int checked = 0;
  for (int i = 0; i < model.n(); ++i) {
    const auto& x = mesh.nodes[model.free2node[i]];
    if (!(mesh.labels[model.free2node[i]] & kOmega)) {
      CHECK(Bt(i, 0) == 0.0);  // interior nodes carry no actuation
      continue;
    }
    double d = std::hypot(x[0] - 2.0, x[1] - 2.0);
    if (d < 2.0 * sigma) {
      CHECK(Bt(i, 0) == doctest::Approx(dP_fd(i)).epsilon(1e-6));
      CHECK(Bt(i, 1) == doctest::Approx(dS_fd(i)).epsilon(1e-4));
      ++checked;
    }
  }
  CHECK(checked >= 4);

  // power columns are nonnegative; the variance column is negative at the
  // beam center (spreading the beam cools the peak)
  double center_dsig = 0.0;
  for (int i = 0; i < model.n(); ++i) {
    const auto& x = mesh.nodes[model.free2node[i]];
    if ((mesh.labels[model.free2node[i]] & kOmega)) CHECK(Bt(i, 0) > 0.0);
    if (x[0] == 2.0 && x[1] == 2.0 && (mesh.labels[model.free2node[i]] & kOmega))
      center_dsig = Bt(i, 1);
  }
  CHECK(center_dsig < 0.0);
}

TEST_CASE("linearized laser columns floor far outside the footprint") {
  Mesh mesh = block_mesh(8, 1, 1);
  ThermalModel model = unit_model(mesh);
  auto l = centered_laser(50.0, 0.01, 0.0, 0.0, 0.0);  // sigma = 0.1, parked at x=0
  l.path.y0 = l.path.y1 = 0.5;
  RampConfig ramp;
  auto B = build_B_gaussian(model, mesh, std::vector<LaserConfig>{l}, ramp);
  MatrixXd Bt = B(0.0);
  for (int i = 0; i < model.n(); ++i) {
    const auto& x = mesh.nodes[model.free2node[i]];
    if (!(mesh.labels[model.free2node[i]] & kOmega)) continue;
    double d = std::hypot(x[0] - 0.0, x[1] - 0.5);
    if (d > 6.0 * 0.1) {
      CHECK(std::abs(Bt(i, 0)) == doctest::Approx(ramp.eps_B).epsilon(1e-12));
      CHECK(std::abs(Bt(i, 1)) == doctest::Approx(ramp.eps_B).epsilon(1e-12));
    }
  }
}

TEST_CASE("moving window entries: plateau, floor, slope bound, constant pattern") {
  Mesh mesh = block_mesh(6, 1, 1);  // thin wall, top nodes along x
  ThermalModel model = unit_model(mesh);
  auto l = centered_laser(10.0, 0.04, 1.0, 5.0, 200.0);
  l.path.y0 = l.path.y1 = 0.0;
  std::vector<LaserConfig> lasers{l};

  CameraConfig cam;
  cam.moving = true;
  cam.cx = 0.0;
  cam.cy = 0.0;
  cam.wx = 2.0;
  cam.wy = 100.0;  // blanket the y extent
  RampConfig ramp;
  ramp.tau = 1e-3;

  auto C = build_C_coaxial(model, mesh, lasers, cam, ramp);
  MatrixXd C0 = C(0.0);
  const int p = static_cast<int>(C0.rows());
  REQUIRE(p > 0);

  // each row watches one top node: entry bounds and the exact plateau/floor
  // at t=0 the window is [0,2] around the beam at x=1
  for (int i = 0; i < p; ++i) {
    int nnz = 0;
    for (int j = 0; j < C0.cols(); ++j)
      if (C0(i, j) != 0.0) {
        ++nnz;
        CHECK(C0(i, j) >= ramp.eps_C);
        CHECK(C0(i, j) <= 1.0);
      }
    CHECK(nnz == 1);
  }

  // window [0,2]: a node at x=1 sits at the center -> exactly 1;
  // a node at x=6 is far outside every margin -> exactly eps_C
  auto entry_for_x = [&](const MatrixXd& Cm, double x_target) -> double {
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < Cm.cols(); ++j) {
        if (Cm(i, j) == 0.0) continue;
        const auto& x = mesh.nodes[model.free2node[j]];
        if (x[0] == x_target) return Cm(i, j);
      }
    return -1.0;
  };
  CHECK(entry_for_x(C0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entry_for_x(C0, 6.0) == doctest::Approx(ramp.eps_C).epsilon(1e-12));

  // slope bound |c(t+d) - c(t)| <= (1 - eps_C) d / tau, and the pattern
  // never changes
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 0.04);
  const double dstep = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    double t = ut(rng);
    MatrixXd Ca = C(t), Cb = C(t + dstep);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < Ca.cols(); ++j) {
        CHECK((Ca(i, j) != 0.0) == (Cb(i, j) != 0.0));
        CHECK(std::abs(Cb(i, j) - Ca(i, j)) <= (1.0 - ramp.eps_C) * dstep / ramp.tau * (1 + 1e-9));
      }
  }
}

TEST_CASE("case assembly wires the right maps") {
  Mesh mesh = block_mesh();
  ThermalModel model = unit_model(mesh);
  auto l = centered_laser(50.0, 0.5, 1.0, 3.0, 100.0);
  l.path.y0 = l.path.y1 = 2.0;
  std::vector<LaserConfig> lasers{l};
  CameraConfig cam;
  cam.cx = 2.0;
  cam.cy = 2.0;
  cam.wx = 2.0;
  cam.wy = 2.0;

  SUBCASE("case 1: both maps constant") {
    CaseSystem s = build_case(1, model, mesh, lasers, cam);
    CHECK(s.case_id == 1);
    CHECK(s.m == static_cast<int>(mesh.omega_elems.size()));
    CHECK(s.B0.cols() == s.m);
    CHECK(s.C0.rows() == s.p);
    CHECK((s.B(0.1) - s.B0).norm() == 0.0);
    CHECK((s.C(0.2) - s.C0).norm() == 0.0);
    CHECK(static_cast<int>(s.b_pattern.size()) == (s.B0.array() != 0.0).count());
  }
  SUBCASE("case 2: moving window") {
    CameraConfig mcam = cam;
    mcam.moving = true;
    CaseSystem s = build_case(2, model, mesh, lasers, mcam);
    CHECK(s.p == 25);  // every top node has a row
    CHECK((s.B(0.1) - s.B0).norm() == 0.0);
    MatrixXd Ca = s.C(0.0), Cb = s.C(0.01);
    CHECK((Ca - Cb).norm() > 0.0);  // the window moved
    CHECK(static_cast<int>(s.c_pattern.size()) == s.p);
  }
  SUBCASE("case 3: linearized laser, fixed window") {
    CaseSystem s = build_case(3, model, mesh, lasers, cam);
    CHECK(s.m == 2);
    REQUIRE(s.u0.size() == 2);
    CHECK(s.u0(0) == doctest::Approx(50.0));
    CHECK(s.u0(1) == doctest::Approx(0.5));
    CHECK((s.C(0.5) - s.C0).norm() == 0.0);
  }
  SUBCASE("case 4: both time-varying") {
    CameraConfig mcam = cam;
    mcam.moving = true;
    CaseSystem s = build_case(4, model, mesh, lasers, mcam);
    CHECK(s.m == 2);
    CHECK(s.p == 25);
    CHECK((s.B(0.0) - s.B(0.005)).norm() > 0.0);
  }
  SUBCASE("cases 3 and 4 need a laser") {
    CHECK_THROWS_AS(build_case(3, model, mesh, {}, cam), std::invalid_argument);
  }
  SUBCASE("unknown case id") {
    CHECK_THROWS_AS(build_case(5, model, mesh, lasers, cam), std::invalid_argument);
  }
}

TEST_CASE("fixed window selection and pyrometer tie-break") {
  Mesh mesh = block_mesh();
  ThermalModel model = unit_model(mesh);

  CameraConfig cam;
  cam.cx = 2.0;
  cam.cy = 2.0;
  cam.wx = 2.0;
  cam.wy = 2.0;
  MatrixXd C = build_C_fixed(model, mesh, cam);
  // window [1,3]x[1,3] on a 5x5 top grid -> 9 nodes
  REQUIRE(C.rows() == 9);
  for (int i = 0; i < C.rows(); ++i) {
    CHECK(C.row(i).sum() == doctest::Approx(1.0));
    CHECK(C.row(i).maxCoeff() == doctest::Approx(1.0));
  }

  CameraConfig pyro;
  pyro.pyrometer = true;
  pyro.cx = 1.5;  // equidistant between the x=1 and x=2 node columns
  pyro.cy = 2.0;
  MatrixXd Cp = build_C_fixed(model, mesh, pyro);
  REQUIRE(Cp.rows() == 1);
  int sel = -1;
  for (int j = 0; j < Cp.cols(); ++j)
    if (Cp(0, j) == 1.0) sel = j;
  REQUIRE(sel >= 0);
  // ties resolve to the lowest node id, which lies on the x=1 column
  const auto& xs = mesh.nodes[model.free2node[sel]];
  CHECK(xs[0] == 1.0);
  CHECK(xs[1] == 2.0);
}

TEST_CASE("fixed window covering no nodes is rejected") {
  Mesh mesh = block_mesh();
  ThermalModel model = unit_model(mesh);
  CameraConfig cam;
  cam.cx = -50.0;
  cam.cy = -50.0;
  cam.wx = 0.5;
  cam.wy = 0.5;
  CHECK_THROWS_AS(build_C_fixed(model, mesh, cam), std::invalid_argument);
}
