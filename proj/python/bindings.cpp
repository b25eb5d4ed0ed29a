// Python bindings for the thermal build-analysis core. Composite inputs
// (geometry, lasers, camera) arrive as JSON text with the same schema the
// command-line tool reads; matrices cross as numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbfcontrol/energy.hpp"
#include "pbfcontrol/enkf.hpp"
#include "pbfcontrol/jsonio.hpp"
#include "pbfcontrol/structural.hpp"

namespace py = pybind11;
using pbf::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw pbf::ConfigError(e.what());
  }
}

struct Built {
  pbf::Mesh mesh;
  pbf::Material material;
  pbf::ThermalModel model;
  std::vector<pbf::LaserConfig> lasers;
  pbf::CaseSystem sys;
};

// Composes mesh, reduced model and case system from one config object with
// the sections the command-line tool uses (geometry, material, T0_K, lasers,
// camera, ramp, case). Sections beyond geometry are optional here; the
// default case is 1.
Built build_from_config(const std::string& text) {
  json cfg = parse(text);
  if (!cfg.is_object()) throw pbf::ConfigError("config: expected a JSON object");
  Built b;
  if (!cfg.contains("geometry")) throw pbf::ConfigError("config: missing \"geometry\"");
  b.mesh = pbf::build_mesh(pbf::geometry_from_json(cfg["geometry"]));
  b.material = cfg.contains("material") ? pbf::material_from_json(cfg["material"])
                                        : pbf::Material{};
  const double T0 = cfg.value("T0_K", 0.0);
  b.model = pbf::reduce_dirichlet(pbf::assemble_global(b.mesh, b.material), b.mesh, T0);

  if (cfg.contains("lasers")) b.lasers = pbf::lasers_from_json(cfg["lasers"]);
  pbf::CameraConfig cam;
  if (cfg.contains("camera")) cam = pbf::camera_from_json(cfg["camera"]);
  pbf::RampConfig ramp;
  if (cfg.contains("ramp")) ramp = pbf::ramp_from_json(cfg["ramp"]);
  const int case_id = cfg.value("case", 1);
  if (cfg.contains("camera"))
    b.sys = pbf::build_case(case_id, b.model, b.mesh, b.lasers, cam, ramp);
  return b;
}

pbf::GramianKind kind_of(const std::string& s) {
  if (s == "controllability") return pbf::GramianKind::controllability;
  if (s == "observability") return pbf::GramianKind::observability;
  throw pbf::ConfigError("kind: expected \"controllability\" or \"observability\"");
}

pbf::DiscretizeMethod method_of(const std::string& s) {
  if (s == "bilinear") return pbf::DiscretizeMethod::bilinear;
  if (s == "zoh") return pbf::DiscretizeMethod::zoh;
  throw pbf::ConfigError("method: expected \"bilinear\" or \"zoh\"");
}

Eigen::MatrixXd coords_matrix(const std::vector<std::array<double, 3>>& coords) {
  Eigen::MatrixXd X(static_cast<int>(coords.size()), 3);
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = coords[i][j];
  return X;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "finite-element thermal models of powder-bed builds: "
            "controllability, observability, energy, ensemble filtering";

  py::register_exception<pbf::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<pbf::Mesh>(m, "Mesh")
      .def_readonly("dim", &pbf::Mesh::dim)
      .def_readonly("h", &pbf::Mesh::h)
      .def_property_readonly("num_nodes", &pbf::Mesh::num_nodes)
      .def_property_readonly("num_elems", &pbf::Mesh::num_elems)
      .def_readonly("labels", &pbf::Mesh::labels)
      .def_readonly("omega_elems", &pbf::Mesh::omega_elems)
      .def_property_readonly("nodes",
                             [](const pbf::Mesh& mesh) { return coords_matrix(mesh.nodes); })
      .def("__repr__", [](const pbf::Mesh& mesh) {
        return "<Mesh dim=" + std::to_string(mesh.dim) +
               " nodes=" + std::to_string(mesh.num_nodes()) +
               " elems=" + std::to_string(mesh.num_elems()) + ">";
      });

  py::class_<pbf::ThermalModel>(m, "ThermalModel")
      .def_property_readonly("n", &pbf::ThermalModel::n)
      .def_readonly("T0", &pbf::ThermalModel::T0)
      .def_readonly("stable", &pbf::ThermalModel::stable)
      .def_readonly("M", &pbf::ThermalModel::M)
      .def_readonly("f", &pbf::ThermalModel::f)
      .def_readonly("free2node", &pbf::ThermalModel::free2node)
      .def_property_readonly("K", [](const pbf::ThermalModel& t) { return t.K; });

  py::class_<pbf::CaseSystem>(m, "CaseSystem")
      .def_readonly("case_id", &pbf::CaseSystem::case_id)
      .def_readonly("n", &pbf::CaseSystem::n)
      .def_readonly("m", &pbf::CaseSystem::m)
      .def_readonly("p", &pbf::CaseSystem::p)
      .def_property_readonly("A", [](const pbf::CaseSystem& s) { return s.A; })
      .def_readonly("B0", &pbf::CaseSystem::B0)
      .def_readonly("C0", &pbf::CaseSystem::C0)
      .def("B", [](const pbf::CaseSystem& s, double t) { return s.B(t); }, py::arg("t"))
      .def("C", [](const pbf::CaseSystem& s, double t) { return s.C(t); }, py::arg("t"))
      .def_readonly("omega_free", &pbf::CaseSystem::omega_free)
      .def_property_readonly("coords", [](const pbf::CaseSystem& s) {
        return coords_matrix(s.coords);
      });

  py::class_<pbf::Eigenstructure>(m, "Eigenstructure")
      .def_readonly("lam", &pbf::Eigenstructure::lambda)
      .def_readonly("V", &pbf::Eigenstructure::V)
      .def_readonly("Vinv", &pbf::Eigenstructure::Vinv)
      .def_readonly("nd", &pbf::Eigenstructure::nd)
      .def_readonly("cluster_value", &pbf::Eigenstructure::cluster_value)
      .def_property_readonly("num_clusters", &pbf::Eigenstructure::num_clusters);

  py::class_<pbf::Discrete>(m, "Discrete")
      .def_readonly("Ad", &pbf::Discrete::Ad)
      .def_readonly("Bd", &pbf::Discrete::Bd)
      .def_readonly("dt", &pbf::Discrete::dt)
      .def_readonly("rho", &pbf::Discrete::rho);

  py::class_<pbf::FilterRun>(m, "FilterRun")
      .def_readonly("t", &pbf::FilterRun::t)
      .def_readonly("rms_cl", &pbf::FilterRun::rms_cl)
      .def_readonly("rms_ol", &pbf::FilterRun::rms_ol)
      .def_readonly("truth", &pbf::FilterRun::truth)
      .def_readonly("mean_cl", &pbf::FilterRun::mean_cl)
      .def_readonly("mean_ol", &pbf::FilterRun::mean_ol)
      .def_readonly("final_ratio", &pbf::FilterRun::final_ratio);

  m.def("build_mesh", [](const std::string& config) {
    json cfg = parse(config);
    return pbf::build_mesh(pbf::geometry_from_json(
        cfg.is_object() && cfg.contains("geometry") ? cfg["geometry"] : cfg));
  }, py::arg("config"), "Mesh from a geometry config (JSON text)");

  m.def("assemble", [](const std::string& config) {
    Built b = build_from_config(config);
    return py::make_tuple(b.mesh, b.model);
  }, py::arg("config"), "(mesh, reduced thermal model) from a config with "
                        "geometry, optional material and T0_K");

  m.def("build_case", [](const std::string& config) {
    Built b = build_from_config(config);
    if (b.sys.n == 0)
      throw pbf::ConfigError("config: \"camera\" is required to build a case system");
    return py::make_tuple(b.mesh, b.model, b.sys);
  }, py::arg("config"), "(mesh, model, case system) from a full case config");

  m.def("structural_report", [](const pbf::CaseSystem& sys) {
    pbf::SystemGraph g = pbf::graph_from_case(sys);
    pbf::StructuralReport r = pbf::structural_report(g, pbf::pattern_components(g));
    py::dict d;
    d["n"] = r.n;
    d["matching_size"] = r.matching_size;
    d["perfect_matching"] = r.perfect_matching;
    d["components"] = r.num_components;
    d["controllable"] = r.controllable;
    d["observable"] = r.observable;
    d["nd_lower_bound"] = r.nd_lower_bound;
    return d;
  }, py::arg("sys"), "Structural controllability/observability verdicts");

  m.def("ssc_check", [](const pbf::CaseSystem& sys, int n_limit) {
    pbf::SscReport r = pbf::ssc_check(pbf::graph_from_case(sys), n_limit);
    py::dict d;
    d["g0_holds"] = r.g0_holds;
    d["g1_holds"] = r.g1_holds;
    d["ssc"] = r.ssc;
    d["witness"] = r.witness;
    d["witness_is_g0"] = r.witness_is_g0;
    d["subsets_examined"] = r.subsets_examined;
    return d;
  }, py::arg("sys"), py::arg("n_limit") = 20,
     "Exhaustive strong structural controllability test (exponential in n)");

  m.def("instantiate_and_rank", [](const pbf::CaseSystem& sys, std::uint64_t seed,
                                   int trials) {
    pbf::InstantiateResult r =
        pbf::instantiate_and_rank(pbf::graph_from_case(sys), seed, trials);
    py::dict d;
    d["trials"] = r.trials;
    d["controllable"] = r.controllable;
    d["fraction"] = r.fraction;
    return d;
  }, py::arg("sys"), py::arg("seed"), py::arg("trials") = 100,
     "Kalman rank over random numeric realizations of the pattern");

  m.def("eigendecompose", [](const pbf::ThermalModel& model, double rel_tol) {
    return pbf::eigendecompose_real(model.K, model.M, rel_tol);
  }, py::arg("model"), py::arg("rel_tol") = 1e-8,
     "Real spectrum of A = -M^-1 K with eigenvalue clustering");

  m.def("rank_tests", [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const pbf::Eigenstructure& eig, int n_max) {
    pbf::RankReport r = pbf::rank_tests(A, B, eig, n_max);
    py::dict d;
    d["kalman_rank"] = r.kalman_rank;
    d["full_rank"] = r.full_rank;
    d["deficient_clusters"] = r.deficient_clusters;
    d["nd"] = r.nd;
    d["tol"] = r.tol;
    return d;
  }, py::arg("A"), py::arg("B"), py::arg("eig"), py::arg("n_max") = 200,
     "Kalman and PBH rank tests; pass (A', C') for observability");

  m.def("gramian_finite", [](const Eigen::MatrixXd& A,
                             const std::function<Eigen::MatrixXd(double)>& map,
                             const std::string& kind, double t0, double t1, int steps) {
    return pbf::gramian_finite(A, map, kind_of(kind), t0, t1, steps);
  }, py::arg("A"), py::arg("map"), py::arg("kind"), py::arg("t0"), py::arg("t1"),
     py::arg("steps"), "Finite-horizon gramian by composite Simpson quadrature");

  m.def("gramian_closed", [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& map,
                             const std::string& kind, double horizon) {
    return pbf::gramian_closed(A, map, kind_of(kind), horizon);
  }, py::arg("A"), py::arg("map"), py::arg("kind"), py::arg("horizon"));

  m.def("gramian_lyapunov", [](const pbf::Eigenstructure& eig, const Eigen::MatrixXd& map,
                               const std::string& kind) {
    return pbf::gramian_lyapunov(eig, map, kind_of(kind));
  }, py::arg("eig"), py::arg("map"), py::arg("kind"));

  m.def("discretize", [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt,
                         const std::string& method) {
    return pbf::discretize(A, B, dt, method_of(method));
  }, py::arg("A"), py::arg("B"), py::arg("dt"), py::arg("method") = "bilinear");

  m.def("gramian_discrete_c", [](const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                 int K) { return pbf::gramian_discrete_c(Ad, Bd, K); },
        py::arg("Ad"), py::arg("Bd"), py::arg("K"));

  m.def("gramian_discrete_o", &pbf::gramian_discrete_o, py::arg("Ad"), py::arg("Cd"),
        py::arg("K"));

  m.def("min_control_energy", [](const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                                 const Eigen::MatrixXd& Wc, const Eigen::VectorXd& xf,
                                 int K) {
    pbf::MinEnergyResult r = pbf::min_control_energy(Ad, Bd, Wc, xf, K);
    py::dict d;
    d["energy"] = r.energy;
    d["u"] = r.u;
    d["residual_rel"] = r.residual_rel;
    d["reachable"] = r.reachable;
    d["dropped"] = r.dropped;
    return d;
  }, py::arg("Ad"), py::arg("Bd"), py::arg("Wc"), py::arg("xf"), py::arg("K"),
     "Minimum-energy transfer 0 -> xf in K steps with least-norm input replay");

  m.def("observation_energy", &pbf::observation_energy, py::arg("Wo"), py::arg("x0"));
  m.def("observation_energy_sim", &pbf::observation_energy_sim, py::arg("Ad"),
        py::arg("Cd"), py::arg("x0"), py::arg("K"));

  m.def("modal_bounds", [](const pbf::Eigenstructure& eig, double dt,
                           const std::string& method, const Eigen::MatrixXd& Bd, int K,
                           bool clip_last) {
    auto bounds = pbf::modal_bounds(eig, dt, method_of(method),
                                    [&](int) { return Bd; }, K, clip_last);
    py::list out;
    for (const auto& b : bounds) {
      py::dict d;
      d["mode"] = b.mode;
      d["lam"] = b.lambda;
      d["lambda_d"] = b.lambda_d;
      d["eta_star"] = b.eta_star;
      out.append(d);
    }
    return out;
  }, py::arg("eig"), py::arg("dt"), py::arg("method"), py::arg("Bd"), py::arg("K"),
     py::arg("clip_last") = false,
     "Per-mode reachability bounds over unit-total-energy inputs, sorted descending");

  m.def("energy_sweep", [](const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Cd,
                           const pbf::CaseSystem& sys, const std::array<double, 3>& center,
                           const std::vector<double>& radii, const std::string& mode,
                           int K) {
    pbf::SweepMode sm;
    if (mode == "const_T") sm = pbf::SweepMode::const_T;
    else if (mode == "unit_norm") sm = pbf::SweepMode::unit_norm;
    else throw pbf::ConfigError("mode: expected \"const_T\" or \"unit_norm\"");
    auto rows = pbf::energy_sweep(Ad, Cd, sys.coords, center, radii, sm, K);
    py::list out;
    for (const auto& r : rows) out.append(py::make_tuple(r.radius, r.enclosed, r.energy));
    return out;
  }, py::arg("Ad"), py::arg("Cd"), py::arg("sys"), py::arg("center"), py::arg("radii"),
     py::arg("mode"), py::arg("K"),
     "Observation energy of target sets growing around a surface point; "
     "returns (radius, enclosed, energy) tuples");

  m.def("run_filter", [](const std::string& config, py::object seed) {
    json cfg = parse(config);
    Built b = build_from_config(config);
    if (b.sys.n == 0)
      throw pbf::ConfigError("config: \"camera\" is required for a filter run");
    pbf::FilterConfig fc;
    if (cfg.contains("filter")) {
      const json& fj = cfg["filter"];
      fc.N = fj.value("N", fc.N);
      fc.dt = fj.value("dt_s", fc.dt);
      fc.steps = fj.value("steps", fc.steps);
      fc.substeps = fj.value("substeps", fc.substeps);
      fc.seed = fj.value("seed", fc.seed);
      fc.noise.process_power = fj.value("process_power_mW2_s", 0.0);
      fc.noise.measurement_power = fj.value("measurement_power_K2_s", 0.0);
    }
    fc.truth_material = cfg.contains("truth_material")
                            ? pbf::material_from_json(cfg["truth_material"])
                            : b.material;
    if (!seed.is_none()) fc.seed = seed.cast<std::uint64_t>();
    return pbf::run_filter(b.sys, b.model, b.mesh, b.lasers, fc);
  }, py::arg("config"), py::arg("seed") = py::none(),
     "Twin-experiment ensemble Kalman filter from a full run config");
}
