#include "pbfcontrol/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace pbf {

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      throw ConfigError(std::string(where) + ": unknown key \"" + it.key() + "\"");
}

const json& require(const json& j, const char* where, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string(where) + ": missing key \"" + key + "\"");
  return *it;
}

double finite_number(const json& v, const char* where, const char* key) {
  if (!v.is_number())
    throw ConfigError(std::string(where) + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ConfigError(std::string(where) + "." + key + ": not finite");
  return x;
}

double positive_number(const json& v, const char* where, const char* key) {
  const double x = finite_number(v, where, key);
  if (!(x > 0.0))
    throw ConfigError(std::string(where) + "." + key + ": must be > 0");
  return x;
}

double get_positive(const json& j, const char* where, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : positive_number(*it, where, key);
}

}  // namespace

BuildGeometry geometry_from_json(const json& j) {
  const char* w = "geometry";
  check_keys(j, w, {"voxel_size_mm", "dims", "occupancy", "element_size_mm"});
  BuildGeometry g;
  g.voxel_size_mm = positive_number(require(j, w, "voxel_size_mm"), w, "voxel_size_mm");
  g.element_size_mm =
      positive_number(require(j, w, "element_size_mm"), w, "element_size_mm");

  const json& dims = require(j, w, "dims");
  if (!dims.is_array() || dims.size() != 3)
    throw ConfigError("geometry.dims: expected [nx, ny, nz]");
  int d[3];
  for (int i = 0; i < 3; ++i) {
    if (!dims[i].is_number_integer())
      throw ConfigError("geometry.dims: entries must be integers");
    d[i] = dims[i].get<int>();
    if (d[i] < 0) throw ConfigError("geometry.dims: entries must be >= 0");
  }
  g.nx = d[0];
  g.ny = d[1];
  g.nz = d[2];
  if (g.nx < 1 || g.nz < 1)
    throw ConfigError("geometry.dims: nx and nz must be >= 1");

  const json& occ = require(j, w, "occupancy");
  if (!occ.is_array()) throw ConfigError("geometry.occupancy: expected an array");
  const std::size_t cells =
      static_cast<std::size_t>(g.nx) * std::max(g.ny, 1) * g.nz;
  if (occ.size() != cells)
    throw ConfigError("geometry.occupancy: expected " + std::to_string(cells) +
                      " cells, got " + std::to_string(occ.size()));
  g.occupancy.reserve(cells);
  for (const auto& v : occ) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
      throw ConfigError("geometry.occupancy: entries must be 0 or 1");
    g.occupancy.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return g;
}

json geometry_to_json(const BuildGeometry& g) {
  json occ = json::array();
  for (auto v : g.occupancy) occ.push_back(static_cast<int>(v));
  return json{{"voxel_size_mm", g.voxel_size_mm},
              {"dims", {g.nx, g.ny, g.nz}},
              {"occupancy", occ},
              {"element_size_mm", g.element_size_mm}};
}

Material material_from_json(const json& j) {
  const char* w = "material";
  check_keys(j, w, {"k_mW_per_mmK", "rho_tonne_per_mm3", "c_mJ_per_tonneK"});
  Material m;  // defaults are the nominal aluminum column
  m.k = get_positive(j, w, "k_mW_per_mmK", m.k);
  m.rho = get_positive(j, w, "rho_tonne_per_mm3", m.rho);
  m.c = get_positive(j, w, "c_mJ_per_tonneK", m.c);
  return m;
}

json material_to_json(const Material& m) {
  return json{{"k_mW_per_mmK", m.k},
              {"rho_tonne_per_mm3", m.rho},
              {"c_mJ_per_tonneK", m.c}};
}

std::vector<LaserConfig> lasers_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("lasers: expected an array");
  std::vector<LaserConfig> out;
  out.reserve(j.size());
  for (const auto& lj : j) {
    const char* w = "lasers[]";
    check_keys(lj, w, {"P0_mW", "sigma2_mm2", "path"});
    LaserConfig l;
    l.P0 = finite_number(require(lj, w, "P0_mW"), w, "P0_mW");
    if (l.P0 < 0.0) throw ConfigError("lasers[].P0_mW: must be >= 0");
    l.sigma2_0 = positive_number(require(lj, w, "sigma2_mm2"), w, "sigma2_mm2");

    const json& pj = require(lj, w, "path");
    const char* wp = "lasers[].path";
    check_keys(pj, wp,
               {"x_min_mm", "x_max_mm", "v_mm_per_s", "y0_mm", "y1_mm", "t_final_s"});
    l.path.x_min = finite_number(require(pj, wp, "x_min_mm"), wp, "x_min_mm");
    l.path.x_max = finite_number(require(pj, wp, "x_max_mm"), wp, "x_max_mm");
    l.path.v = positive_number(require(pj, wp, "v_mm_per_s"), wp, "v_mm_per_s");
    l.path.y0 = finite_number(require(pj, wp, "y0_mm"), wp, "y0_mm");
    l.path.y1 = finite_number(require(pj, wp, "y1_mm"), wp, "y1_mm");
    l.path.t_final = positive_number(require(pj, wp, "t_final_s"), wp, "t_final_s");
    if (!(l.path.x_max > l.path.x_min))
      throw ConfigError("lasers[].path: x_max_mm must exceed x_min_mm");
    out.push_back(l);
  }
  return out;
}

CameraConfig camera_from_json(const json& j) {
  const char* w = "camera";
  check_keys(j, w, {"mode", "center", "width", "pyrometer"});
  CameraConfig c;
  const json& mode = require(j, w, "mode");
  if (!mode.is_string()) throw ConfigError("camera.mode: expected a string");
  const std::string m = mode.get<std::string>();
  if (m == "fixed")
    c.moving = false;
  else if (m == "coaxial")
    c.moving = true;
  else
    throw ConfigError("camera.mode: expected \"fixed\" or \"coaxial\"");

  const json& ctr = require(j, w, "center");
  const json& wid = require(j, w, "width");
  if (!ctr.is_array() || ctr.size() != 2)
    throw ConfigError("camera.center: expected [x, y]");
  if (!wid.is_array() || wid.size() != 2)
    throw ConfigError("camera.width: expected [wx, wy]");
  c.cx = finite_number(ctr[0], w, "center");
  c.cy = finite_number(ctr[1], w, "center");
  c.wx = positive_number(wid[0], w, "width");
  c.wy = positive_number(wid[1], w, "width");
  if (auto it = j.find("pyrometer"); it != j.end()) {
    if (!it->is_boolean()) throw ConfigError("camera.pyrometer: expected a boolean");
    c.pyrometer = it->get<bool>();
  }
  return c;
}

RampConfig ramp_from_json(const json& j) {
  const char* w = "ramp";
  check_keys(j, w, {"eps_B", "eps_C", "tau_s"});
  RampConfig r;
  r.eps_B = get_positive(j, w, "eps_B", r.eps_B);
  r.eps_C = get_positive(j, w, "eps_C", r.eps_C);
  r.tau = get_positive(j, w, "tau_s", r.tau);
  return r;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace pbf
