// pbfctl: command-line front end for the thermal build-analysis library.
//
// Every subcommand reads one JSON config, writes its artifacts atomically,
// and prints a one-line JSON summary to stdout. Exit codes: 0 success,
// 2 config error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "pbfcontrol/energy.hpp"
#include "pbfcontrol/enkf.hpp"
#include "pbfcontrol/jsonio.hpp"
#include "pbfcontrol/structural.hpp"

namespace fs = std::filesystem;
using pbf::ConfigError;
using pbf::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void allow_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

const json& require_key(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key \"" + key + "\"");
  return *it;
}

double number_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return it->get<double>();
}

int int_or(const json& j, const char* key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return it->get<int>();
}

std::uint64_t u64_or(const json& j, const char* key, std::uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() &&
                                   it->get<std::int64_t>() < 0))
    throw ConfigError(std::string(key) + ": expected a nonnegative integer");
  return it->get<std::uint64_t>();
}

std::string resolve_out(const std::string& out, const std::string& out_dir) {
  fs::path p(out);
  if (p.is_absolute() || out_dir.empty()) return out;
  return (fs::path(out_dir) / p).string();
}

void emit(const std::string& path, const json& doc) {
  pbf::atomic_write(path, doc.dump(2) + "\n");
}

void summary(const json& line) { std::cout << line.dump() << std::endl; }

// assembled context shared by the analysis subcommands
struct Pipeline {
  pbf::Mesh mesh;
  pbf::Material material;
  pbf::ThermalModel model;
  std::vector<pbf::LaserConfig> lasers;
  pbf::CameraConfig camera;
  pbf::RampConfig ramp;
  pbf::CaseSystem sys;
  int case_id = 1;
};

Pipeline build_pipeline(const json& cfg, const std::string& where, bool needs_case) {
  Pipeline p;
  p.mesh = pbf::build_mesh(pbf::geometry_from_json(require_key(cfg, where, "geometry")));
  p.material = cfg.contains("material") ? pbf::material_from_json(cfg["material"])
                                        : pbf::Material{};
  const double T0 = number_or(cfg, "T0_K", 0.0);
  p.model =
      pbf::reduce_dirichlet(pbf::assemble_global(p.mesh, p.material), p.mesh, T0);
  if (needs_case) {
    p.lasers = pbf::lasers_from_json(require_key(cfg, where, "lasers"));
    p.camera = pbf::camera_from_json(require_key(cfg, where, "camera"));
    p.ramp = cfg.contains("ramp") ? pbf::ramp_from_json(cfg["ramp"]) : pbf::RampConfig{};
    p.case_id = int_or(cfg, "case", 1);
    if (p.case_id < 1 || p.case_id > 4)
      throw ConfigError(where + ".case: expected 1..4");
    p.sys = pbf::build_case(p.case_id, p.model, p.mesh, p.lasers, p.camera, p.ramp);
  }
  return p;
}

int cmd_mesh(const std::string& config, const std::string& out) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "mesh config", {"geometry"});
  pbf::Mesh mesh =
      pbf::build_mesh(pbf::geometry_from_json(require_key(cfg, "mesh config", "geometry")));
  auto comps = pbf::connected_components(mesh);

  json nodes = json::array();
  for (const auto& x : mesh.nodes) nodes.push_back({x[0], x[1], x[2]});
  json elements = json::array();
  for (int e = 0; e < mesh.num_elems(); ++e) {
    json conn = json::array();
    for (int a = 0; a < mesh.nodes_per_elem; ++a) conn.push_back(mesh.elem(e)[a]);
    elements.push_back(conn);
  }
  json labels = json::array();
  for (auto l : mesh.labels) labels.push_back(static_cast<int>(l));

  json doc{{"command", "mesh"},
           {"dim", mesh.dim},
           {"h_mm", mesh.h},
           {"nodes", nodes},
           {"elements", elements},
           {"labels", labels},
           {"surface_elements", mesh.omega_elems},
           {"components", comps.size()}};
  emit(out, doc);
  summary(json{{"command", "mesh"},
               {"nodes", mesh.num_nodes()},
               {"elements", mesh.num_elems()},
               {"components", comps.size()},
               {"out", out}});
  return 0;
}

int cmd_assemble(const std::string& config, const std::string& out) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "assemble config", {"geometry", "material", "T0_K"});
  Pipeline p = build_pipeline(cfg, "assemble config", false);

  json rows = json::array(), cols = json::array(), vals = json::array();
  for (int c = 0; c < p.model.K.outerSize(); ++c)
    for (pbf::SpMat::InnerIterator it(p.model.K, c); it; ++it) {
      rows.push_back(static_cast<int>(it.row()));
      cols.push_back(static_cast<int>(it.col()));
      vals.push_back(it.value());
    }
  json doc{{"command", "assemble"},
           {"n", p.model.n()},
           {"T0_K", p.model.T0},
           {"stable", p.model.stable},
           {"M_mJ_per_K", std::vector<double>(p.model.M.data(), p.model.M.data() + p.model.n())},
           {"f_mW", std::vector<double>(p.model.f.data(), p.model.f.data() + p.model.n())},
           {"K_mW_per_K", json{{"rows", rows}, {"cols", cols}, {"values", vals}}},
           {"free2node", p.model.free2node}};
  emit(out, doc);
  summary(json{{"command", "assemble"},
               {"n", p.model.n()},
               {"nnz", p.model.K.nonZeros()},
               {"stable", p.model.stable},
               {"out", out}});
  return 0;
}

int cmd_structural(const std::string& config, const std::string& out,
                   std::uint64_t seed, bool seed_given) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "structural config",
             {"geometry", "material", "T0_K", "lasers", "camera", "ramp", "case",
              "trials", "ssc_limit", "seed"});
  Pipeline p = build_pipeline(cfg, "structural config", true);
  const int trials = int_or(cfg, "trials", 100);
  const int ssc_limit = int_or(cfg, "ssc_limit", 20);
  if (trials < 1 || ssc_limit < 1)
    throw ConfigError("structural config: trials and ssc_limit must be >= 1");
  if (!seed_given) seed = u64_or(cfg, "seed", 0);

  pbf::SystemGraph g = pbf::graph_from_case(p.sys);
  auto comps = pbf::pattern_components(g);
  pbf::StructuralReport rep = pbf::structural_report(g, comps);

  json doc{{"command", "analyze-structural"},
           {"case", p.case_id},
           {"n", g.n},
           {"m", g.m},
           {"p", g.p},
           {"matching_size", rep.matching_size},
           {"perfect_matching", rep.perfect_matching},
           {"components", rep.num_components},
           {"controllable", rep.controllable},
           {"observable", rep.observable},
           {"nd_lower_bound", rep.nd_lower_bound}};

  if (g.n <= ssc_limit) {
    pbf::SscReport ssc = pbf::ssc_check(g, ssc_limit);
    doc["ssc"] = json{{"checked", true},
                      {"g0_holds", ssc.g0_holds},
                      {"g1_holds", ssc.g1_holds},
                      {"ssc", ssc.ssc},
                      {"witness", ssc.witness},
                      {"witness_is_g0", ssc.witness_is_g0},
                      {"subsets_examined", ssc.subsets_examined}};
  } else {
    doc["ssc"] = json{{"checked", false},
                      {"reason", "n exceeds the exhaustive-search limit"},
                      {"limit", ssc_limit}};
  }

  pbf::InstantiateResult inst = pbf::instantiate_and_rank(g, seed, trials);
  doc["instantiate"] = json{{"trials", inst.trials},
                            {"controllable", inst.controllable},
                            {"fraction", inst.fraction},
                            {"seed", seed}};
  doc["tolerances"] =
      json{{"rank_threshold", "n * eps * sigma_max"}, {"pattern_prune", 0.0}};

  emit(out, doc);
  summary(json{{"command", "analyze-structural"},
               {"controllable", rep.controllable},
               {"observable", rep.observable},
               {"fraction", inst.fraction},
               {"out", out}});
  return 0;
}

int cmd_classical(const std::string& config, const std::string& out) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "classical config",
             {"geometry", "material", "T0_K", "lasers", "camera", "ramp", "case",
              "horizon_s", "gramian_steps", "rank_n_max", "cluster_tol"});
  Pipeline p = build_pipeline(cfg, "classical config", true);
  const double horizon = number_or(cfg, "horizon_s", 1.0);
  const int steps = int_or(cfg, "gramian_steps", 400);
  const int n_max = int_or(cfg, "rank_n_max", 200);
  const double cluster_tol = number_or(cfg, "cluster_tol", 1e-8);
  if (!(horizon > 0.0) || steps < 2 || steps % 2 != 0 || n_max < 1 || !(cluster_tol > 0.0))
    throw ConfigError(
        "classical config: horizon_s > 0, gramian_steps even and >= 2, "
        "rank_n_max >= 1, cluster_tol > 0");

  pbf::Eigenstructure eig =
      pbf::eigendecompose_real(p.model.K, p.model.M, cluster_tol);
  const int n = p.sys.n;
  const bool hurwitz = eig.lambda(n - 1) < 0.0;

  Eigen::MatrixXd A = Eigen::MatrixXd(p.sys.A);
  pbf::RankReport ctrl = pbf::rank_tests(A, p.sys.B0, eig, n_max);
  pbf::RankReport obsv =
      pbf::rank_tests(A.transpose(), p.sys.C0.transpose(), eig, n_max);

  auto cmap = [&](double t) { return p.sys.C(t); };
  Eigen::MatrixXd Wo =
      pbf::gramian_finite(A, cmap, pbf::GramianKind::observability, 0.0, horizon, steps);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Wo);
  const double trace = Wo.trace();
  const double min_eig = es.eigenvalues().minCoeff();
  const double pd_tol = 1e-10 * trace;

  json doc{{"command", "analyze-classical"},
           {"case", p.case_id},
           {"n", n},
           {"eigenvalues",
            std::vector<double>(eig.lambda.data(), eig.lambda.data() + n)},
           {"num_clusters", eig.num_clusters()},
           {"nd", eig.nd},
           {"hurwitz", hurwitz},
           {"controllability",
            json{{"kalman_rank", ctrl.kalman_rank},
                 {"full_rank", ctrl.full_rank},
                 {"deficient_clusters", ctrl.deficient_clusters},
                 {"tolerance", ctrl.tol}}},
           {"observability",
            json{{"kalman_rank", obsv.kalman_rank},
                 {"full_rank", obsv.full_rank},
                 {"deficient_clusters", obsv.deficient_clusters},
                 {"tolerance", obsv.tol}}},
           {"observability_gramian",
            json{{"horizon_s", horizon},
                 {"simpson_steps", steps},
                 {"trace", trace},
                 {"min_eigenvalue", min_eig},
                 {"positive_definite", min_eig > pd_tol},
                 {"tolerance", pd_tol}}},
           {"tolerances",
            json{{"cluster_rel_tol", cluster_tol},
                 {"rank_threshold", "n * eps * sigma_max"},
                 {"gramian_pd", "1e-10 * trace"}}}};
  emit(out, doc);
  summary(json{{"command", "analyze-classical"},
               {"hurwitz", hurwitz},
               {"controllable", ctrl.full_rank},
               {"observable", obsv.full_rank},
               {"gramian_pd", min_eig > pd_tol},
               {"out", out}});
  return 0;
}

int cmd_energy(const std::string& config, const std::string& out,
               const std::string& out_csv) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "energy config",
             {"geometry", "material", "T0_K", "lasers", "camera", "ramp", "case",
              "dt_s", "method", "steps", "sweep", "clip_last"});
  Pipeline p = build_pipeline(cfg, "energy config", true);

  const double dt = number_or(cfg, "dt_s", 1e-3);
  if (!(dt > 0.0)) throw ConfigError("energy config.dt_s: must be > 0");
  const int K = int_or(cfg, "steps", 100);
  if (K < 1) throw ConfigError("energy config.steps: must be >= 1");
  const std::string method_s =
      cfg.contains("method") ? cfg["method"].get<std::string>() : "bilinear";
  pbf::DiscretizeMethod method;
  if (method_s == "bilinear")
    method = pbf::DiscretizeMethod::bilinear;
  else if (method_s == "zoh")
    method = pbf::DiscretizeMethod::zoh;
  else
    throw ConfigError("energy config.method: expected \"bilinear\" or \"zoh\"");
  const bool clip_last = cfg.contains("clip_last") && cfg["clip_last"].get<bool>();

  Eigen::MatrixXd A = Eigen::MatrixXd(p.sys.A);
  pbf::Discrete d = pbf::discretize(A, p.sys.B0, dt, method);
  pbf::Eigenstructure eig = pbf::eigendecompose_real(p.model.K, p.model.M);
  auto bd = [&](int) { return d.Bd; };
  auto bounds = pbf::modal_bounds(eig, dt, method, bd, K, clip_last);

  json jb = json::array();
  const std::size_t top = std::min<std::size_t>(bounds.size(), 10);
  for (std::size_t i = 0; i < top; ++i)
    jb.push_back(json{{"mode", bounds[i].mode},
                      {"lambda", bounds[i].lambda},
                      {"lambda_d", bounds[i].lambda_d},
                      {"eta_star", bounds[i].eta_star}});

  json doc{{"command", "energy"},
           {"case", p.case_id},
           {"n", p.sys.n},
           {"dt_s", dt},
           {"method", method_s},
           {"steps", K},
           {"spectral_radius", d.rho},
           {"modal_bounds", jb},
           {"tolerances",
            json{{"pinv_threshold", "n * eps * sigma_max"},
                 {"replay_residual", 1e-6}}}};

  if (cfg.contains("sweep")) {
    const json& sj = cfg["sweep"];
    allow_keys(sj, "energy config.sweep", {"center", "radii", "mode"});
    const json& cj = require_key(sj, "energy config.sweep", "center");
    if (!cj.is_array() || cj.size() != 3)
      throw ConfigError("energy config.sweep.center: expected [x, y, z]");
    std::array<double, 3> center{cj[0].get<double>(), cj[1].get<double>(),
                                 cj[2].get<double>()};
    std::vector<double> radii =
        require_key(sj, "energy config.sweep", "radii").get<std::vector<double>>();
    const std::string mode_s =
        require_key(sj, "energy config.sweep", "mode").get<std::string>();
    pbf::SweepMode mode;
    if (mode_s == "const_T")
      mode = pbf::SweepMode::const_T;
    else if (mode_s == "unit_norm")
      mode = pbf::SweepMode::unit_norm;
    else
      throw ConfigError("energy config.sweep.mode: expected \"const_T\" or \"unit_norm\"");

    auto rows = pbf::energy_sweep(d.Ad, p.sys.C0, p.sys.coords, center, radii, mode, K);
    std::vector<std::vector<double>> table;
    table.reserve(rows.size());
    bool increasing = true, nonincreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      table.push_back({rows[i].radius, double(rows[i].enclosed), rows[i].energy});
      if (i > 0) {
        increasing = increasing && rows[i].energy > rows[i - 1].energy;
        nonincreasing = nonincreasing && rows[i].energy <= rows[i - 1].energy;
      }
    }
    pbf::atomic_write(out_csv, pbf::csv_table({"radius_mm", "enclosed", "energy"}, table));
    doc["sweep"] = json{{"mode", mode_s},
                        {"rows", rows.size()},
                        {"strictly_increasing", increasing},
                        {"non_increasing", nonincreasing},
                        {"csv", out_csv}};
  }

  emit(out, doc);
  json s{{"command", "energy"}, {"spectral_radius", d.rho}, {"out", out}};
  if (doc.contains("sweep")) s["sweep_csv"] = out_csv;
  summary(s);
  return 0;
}

int cmd_enkf(const std::string& config, const std::string& out,
             const std::string& out_csv, std::uint64_t seed, bool seed_given) {
  json cfg = read_json_file(config);
  allow_keys(cfg, "enkf config",
             {"geometry", "material", "truth_material", "T0_K", "lasers", "camera",
              "ramp", "filter"});
  Pipeline p = build_pipeline(cfg, "enkf config", true);

  const json& fj = require_key(cfg, "enkf config", "filter");
  allow_keys(fj, "enkf config.filter",
             {"N", "dt_s", "steps", "substeps", "seed", "process_power_mW2_s",
              "measurement_power_K2_s"});
  pbf::FilterConfig fc;
  fc.N = int_or(fj, "N", 100);
  fc.dt = number_or(fj, "dt_s", 1e-4);
  fc.steps = int_or(fj, "steps", 400);
  fc.substeps = int_or(fj, "substeps", 10);
  fc.seed = u64_or(fj, "seed", 0);
  if (seed_given) fc.seed = seed;
  fc.noise.process_power = number_or(fj, "process_power_mW2_s", 0.0);
  fc.noise.measurement_power = number_or(fj, "measurement_power_K2_s", 0.0);
  fc.truth_material = cfg.contains("truth_material")
                          ? pbf::material_from_json(cfg["truth_material"])
                          : p.material;
  if (fc.N < 2 || fc.steps < 1 || fc.substeps < 1 || !(fc.dt > 0.0))
    throw ConfigError("enkf config.filter: N >= 2, steps >= 1, substeps >= 1, dt_s > 0");

  pbf::FilterRun run = pbf::run_filter(p.sys, p.model, p.mesh, p.lasers, fc);

  // per-node closed-loop error series; layout (k, node, error)
  std::vector<std::vector<double>> table;
  table.reserve(static_cast<std::size_t>(fc.steps + 1) * p.sys.n);
  for (int k = 0; k <= fc.steps; ++k)
    for (int i = 0; i < p.sys.n; ++i)
      table.push_back(
          {double(k), double(i), run.truth(k, i) - run.mean_cl(k, i)});
  pbf::atomic_write(out_csv, pbf::csv_table({"k", "node", "error"}, table));

  json doc{{"command", "enkf"},
           {"case", p.case_id},
           {"n", p.sys.n},
           {"N", fc.N},
           {"dt_s", fc.dt},
           {"steps", fc.steps},
           {"substeps", fc.substeps},
           {"seed", fc.seed},
           {"process_power_mW2_s", fc.noise.process_power},
           {"measurement_power_K2_s", fc.noise.measurement_power},
           {"rms_cl", std::vector<double>(run.rms_cl.data(), run.rms_cl.data() + fc.steps + 1)},
           {"rms_ol", std::vector<double>(run.rms_ol.data(), run.rms_ol.data() + fc.steps + 1)},
           {"rms_cl_max", run.rms_cl.maxCoeff()},
           {"rms_ol_max", run.rms_ol.maxCoeff()},
           {"final_ratio", run.final_ratio},
           {"error_csv", out_csv},
           {"tolerances", json{{"gain_pinv", "p * eps * sigma_max"}}}};
  emit(out, doc);
  summary(json{{"command", "enkf"},
               {"final_ratio", run.final_ratio},
               {"seed", fc.seed},
               {"out", out},
               {"error_csv", out_csv}});
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  json doc{{"command", "report"}, {"tool", "pbfctl"}, {"version", "0.1.0"}};
  json sections = json::object();
  for (const auto& path : inputs) {
    if (!fs::exists(path)) throw ConfigError("missing artifact: " + path);
    json j = read_json_file(path);
    const std::string name =
        j.is_object() && j.contains("command") ? j["command"].get<std::string>()
                                               : fs::path(path).stem().string();
    sections[name] = j;
  }
  doc["sections"] = sections;

  json verdicts = json::object();
  if (sections.contains("analyze-structural")) {
    verdicts["structurally_controllable"] = sections["analyze-structural"]["controllable"];
    verdicts["structurally_observable"] = sections["analyze-structural"]["observable"];
    if (sections["analyze-structural"]["ssc"].contains("ssc"))
      verdicts["ssc"] = sections["analyze-structural"]["ssc"]["ssc"];
  }
  if (sections.contains("analyze-classical")) {
    verdicts["hurwitz"] = sections["analyze-classical"]["hurwitz"];
    verdicts["gramian_pd"] =
        sections["analyze-classical"]["observability_gramian"]["positive_definite"];
  }
  if (sections.contains("energy") && sections["energy"].contains("sweep")) {
    verdicts["sweep_strictly_increasing"] =
        sections["energy"]["sweep"]["strictly_increasing"];
    verdicts["sweep_non_increasing"] = sections["energy"]["sweep"]["non_increasing"];
  }
  if (sections.contains("enkf"))
    verdicts["enkf_final_ratio"] = sections["enkf"]["final_ratio"];
  doc["verdicts"] = verdicts;

  emit(out, doc);
  summary(json{{"command", "report"},
               {"sections", sections.size()},
               {"out", out}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermal build models: meshing, analysis, energy, estimation"};
  app.require_subcommand(1);

  std::string out_dir;
  app.add_option("--out-dir", out_dir, "directory for relative output paths")
      ->envname("PBFCTL_OUT_DIR");

  std::string config, out, out_csv;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;

  auto* c_mesh = app.add_subcommand("mesh", "voxel geometry to labeled mesh");
  c_mesh->add_option("--config", config, "geometry JSON")->required();
  c_mesh->add_option("--out", out, "mesh JSON path")->required();

  auto* c_asm = app.add_subcommand("assemble", "mesh to reduced thermal system");
  c_asm->add_option("--config", config, "geometry+material JSON")->required();
  c_asm->add_option("--out", out, "system JSON path")->required();

  auto* c_str = app.add_subcommand("analyze-structural",
                                   "pattern graph, matching, SSC, instantiation");
  c_str->add_option("--config", config, "case JSON")->required();
  c_str->add_option("--out", out, "report JSON path")->required();
  auto* str_seed = c_str->add_option("--seed", seed, "instantiation seed");

  auto* c_cls = app.add_subcommand("analyze-classical",
                                   "eigenstructure, rank tests, gramian");
  c_cls->add_option("--config", config, "case JSON")->required();
  c_cls->add_option("--out", out, "report JSON path")->required();

  auto* c_noise = app.add_subcommand("energy", "discretization, bounds, sweeps");
  c_noise->add_option("--config", config, "case JSON")->required();
  c_noise->add_option("--out", out, "summary JSON path")->required();
  c_noise->add_option("--out-csv", out_csv, "sweep CSV path (default: <out>.csv)");

  auto* c_enkf = app.add_subcommand("enkf", "twin-experiment ensemble filter");
  c_enkf->add_option("--config", config, "run JSON")->required();
  c_enkf->add_option("--out", out, "summary JSON path")->required();
  c_enkf->add_option("--out-csv", out_csv, "error CSV path (default: <out>.csv)");
  auto* enkf_seed = c_enkf->add_option("--seed", seed, "master seed override");

  auto* c_rep = app.add_subcommand("report", "merge analysis artifacts");
  c_rep->add_option("--in", inputs, "artifact JSON paths")->required();
  c_rep->add_option("--out", out, "merged report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    out = resolve_out(out, out_dir);
    if (out_csv.empty() && !out.empty()) {
      fs::path p(out);
      p.replace_extension(".csv");
      out_csv = p.string();
    } else {
      out_csv = resolve_out(out_csv, out_dir);
    }

    if (c_mesh->parsed()) return cmd_mesh(config, out);
    if (c_asm->parsed()) return cmd_assemble(config, out);
    if (c_str->parsed()) return cmd_structural(config, out, seed, !str_seed->empty());
    if (c_cls->parsed()) return cmd_classical(config, out);
    if (c_noise->parsed()) return cmd_energy(config, out, out_csv);
    if (c_enkf->parsed()) return cmd_enkf(config, out, out_csv, seed, !enkf_seed->empty());
    if (c_rep->parsed()) return cmd_report(inputs, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
