#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pbfcontrol/jsonio.hpp"

using namespace pbf;
namespace fs = std::filesystem;

namespace {

json valid_geometry() {
  return json{{"voxel_size_mm", 2.0},
              {"dims", {2, 0, 1}},
              {"occupancy", {1, 1}},
              {"element_size_mm", 1.0}};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("geometry json round trip") {
  BuildGeometry g = geometry_from_json(valid_geometry());
  CHECK(g.voxel_size_mm == 2.0);
  CHECK(g.nx == 2);
  CHECK(g.ny == 0);
  CHECK(g.nz == 1);
  CHECK(g.occupancy == std::vector<std::uint8_t>{1, 1});
  CHECK(g.element_size_mm == 1.0);
  CHECK(g.planar());

  BuildGeometry h = geometry_from_json(geometry_to_json(g));
  CHECK(h.voxel_size_mm == g.voxel_size_mm);
  CHECK(h.nx == g.nx);
  CHECK(h.ny == g.ny);
  CHECK(h.nz == g.nz);
  CHECK(h.occupancy == g.occupancy);
  CHECK(h.element_size_mm == g.element_size_mm);
}

TEST_CASE("geometry json is strict") {
  json j = valid_geometry();
  j["colour"] = "red";
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j.erase("occupancy");
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["occupancy"] = {1, 1, 1};  // dims say 2 cells
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["occupancy"] = {1, 2};
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["voxel_size_mm"] = 0.0;
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["element_size_mm"] = -1.0;
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["dims"] = {2, 0};
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);

  j = valid_geometry();
  j["dims"] = {-1, 0, 1};
  CHECK_THROWS_AS(geometry_from_json(j), ConfigError);
}

TEST_CASE("material json: aluminum defaults and strict keys") {
  Material def = material_from_json(json::object());
  CHECK(def.k == 250.0);
  CHECK(def.rho == 2.7e-9);
  CHECK(def.c == 9e8);

  Material m = material_from_json(json{{"k_mW_per_mmK", 200.0},
                                       {"rho_tonne_per_mm3", 2.5e-9},
                                       {"c_mJ_per_tonneK", 1.248e9}});
  CHECK(m.k == 200.0);
  CHECK(m.rho == 2.5e-9);
  CHECK(m.c == 1.248e9);

  Material r = material_from_json(material_to_json(m));
  CHECK(r.k == m.k);
  CHECK(r.rho == m.rho);
  CHECK(r.c == m.c);

  CHECK_THROWS_AS(material_from_json(json{{"conductivity", 1.0}}), ConfigError);
  CHECK_THROWS_AS(material_from_json(json{{"k_mW_per_mmK", -5.0}}), ConfigError);
  CHECK_THROWS_AS(
      material_from_json(json{{"k_mW_per_mmK", std::numeric_limits<double>::quiet_NaN()}}),
      ConfigError);
}

TEST_CASE("laser array json") {
  json j = json::array({json{{"P0_mW", 1500.0},
                             {"sigma2_mm2", 0.04},
                             {"path",
                              json{{"x_min_mm", 0.0},
                                   {"x_max_mm", 10.0},
                                   {"v_mm_per_s", 50.0},
                                   {"y0_mm", 0.2},
                                   {"y1_mm", 0.8},
                                   {"t_final_s", 1.0}}}}});
  auto lasers = lasers_from_json(j);
  REQUIRE(lasers.size() == 1);
  CHECK(lasers[0].P0 == 1500.0);
  CHECK(lasers[0].sigma2_0 == 0.04);
  CHECK(lasers[0].path.x_min == 0.0);
  CHECK(lasers[0].path.x_max == 10.0);
  CHECK(lasers[0].path.v == 50.0);
  CHECK(lasers[0].path.y0 == 0.2);
  CHECK(lasers[0].path.y1 == 0.8);
  CHECK(lasers[0].path.t_final == 1.0);

  json bad = j;
  bad[0]["sigma2_mm2"] = 0.0;  // variance must be positive
  CHECK_THROWS_AS(lasers_from_json(bad), ConfigError);

  bad = j;
  bad[0]["path"]["speed"] = 1.0;
  CHECK_THROWS_AS(lasers_from_json(bad), ConfigError);

  CHECK_THROWS_AS(lasers_from_json(json::object()), ConfigError);
}

TEST_CASE("camera json") {
  CameraConfig fixed = camera_from_json(json{{"mode", "fixed"},
                                             {"center", {1.0, 2.0}},
                                             {"width", {3.0, 4.0}}});
  CHECK_FALSE(fixed.moving);
  CHECK_FALSE(fixed.pyrometer);
  CHECK(fixed.cx == 1.0);
  CHECK(fixed.cy == 2.0);
  CHECK(fixed.wx == 3.0);
  CHECK(fixed.wy == 4.0);

  CameraConfig co = camera_from_json(json{{"mode", "coaxial"},
                                          {"center", {0.0, 0.0}},
                                          {"width", {1.0, 1.0}},
                                          {"pyrometer", true}});
  CHECK(co.moving);
  CHECK(co.pyrometer);

  CHECK_THROWS_AS(camera_from_json(json{{"mode", "sideways"},
                                        {"center", {0.0, 0.0}},
                                        {"width", {1.0, 1.0}}}),
                  ConfigError);
  CHECK_THROWS_AS(camera_from_json(json{{"mode", "fixed"},
                                        {"center", {0.0, 0.0}},
                                        {"width", {-1.0, 1.0}}}),
                  ConfigError);
}

TEST_CASE("ramp json defaults") {
  RampConfig def = ramp_from_json(json::object());
  CHECK(def.eps_B == 1e-12);
  CHECK(def.eps_C == 1e-9);
  CHECK(def.tau == 5e-4);

  RampConfig r = ramp_from_json(json{{"eps_B", 1e-11}, {"eps_C", 1e-8}, {"tau_s", 1e-3}});
  CHECK(r.eps_B == 1e-11);
  CHECK(r.eps_C == 1e-8);
  CHECK(r.tau == 1e-3);

  CHECK_THROWS_AS(ramp_from_json(json{{"tau", 1.0}}), ConfigError);
  CHECK_THROWS_AS(ramp_from_json(json{{"eps_C", 0.0}}), ConfigError);
}

TEST_CASE("atomic writes leave no partial files behind") {
  fs::path dir = fs::temp_directory_path() / "pbf_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path target = dir / "out.json";

  atomic_write(target.string(), "{\"a\":1}\n");
  CHECK(read_file(target) == "{\"a\":1}\n");

  atomic_write(target.string(), "second\n");
  CHECK(read_file(target) == "second\n");

  int entries = 0;
  for (auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);  // no temp residue
  fs::remove_all(dir);
}

TEST_CASE("csv tables print with full precision") {
  std::string csv = csv_table({"k", "value"}, {{0.0, 1.0 / 3.0}, {1.0, 0.5}});
  CHECK(csv ==
        "k,value\n"
        "0,0.33333333333333331\n"
        "1,0.5\n");
}
