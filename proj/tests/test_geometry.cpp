#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pbfcontrol/geometry.hpp"
#include "test_util.hpp"

using namespace pbf;

namespace {

BuildGeometry single_voxel() {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = g.ny = g.nz = 1;
  g.occupancy = {1};
  return g;
}

int count_label(const Mesh& m, std::uint8_t bit) {
  int c = 0;
  for (auto l : m.labels) c += (l & bit) ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("single voxel: nodes, ordering and labels") {
  Mesh m = build_mesh(single_voxel());
  REQUIRE(m.dim == 3);
  REQUIRE(m.num_nodes() == 8);
  REQUIRE(m.num_elems() == 1);
  CHECK(m.nodes_per_elem == 8);

  // lexicographic (z, y, x): node 0 = origin, node 1 = +x, node 2 = +y, node 4 = +z
  CHECK(m.nodes[0] == std::array<double, 3>{0, 0, 0});
  CHECK(m.nodes[1] == std::array<double, 3>{1, 0, 0});
  CHECK(m.nodes[2] == std::array<double, 3>{0, 1, 0});
  CHECK(m.nodes[4] == std::array<double, 3>{0, 0, 1});

  // bottom 4 nodes are constrained, top 4 are on the actuation surface;
  // every node also touches a side face
  for (int i = 0; i < 4; ++i) {
    CHECK((m.labels[i] & kLambda));
    CHECK_FALSE((m.labels[i] & kOmega));
    CHECK((m.labels[i] & kGamma));
  }
  for (int i = 4; i < 8; ++i) {
    CHECK((m.labels[i] & kOmega));
    CHECK_FALSE((m.labels[i] & kLambda));
    CHECK((m.labels[i] & kGamma));
  }

  REQUIRE(m.omega_elems == std::vector<int>{0});
  auto top = m.top_face_nodes(0);
  std::sort(top.begin(), top.end());
  CHECK(top == std::vector<int>{4, 5, 6, 7});
}

TEST_CASE("2x2x2 block: counts and interior node") {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = g.ny = g.nz = 2;
  g.occupancy.assign(8, 1);
  Mesh m = build_mesh(g);
  REQUIRE(m.num_nodes() == 27);
  REQUIRE(m.num_elems() == 8);
  CHECK(count_label(m, kOmega) == 9);
  CHECK(count_label(m, kLambda) == 9);
  // center node (1,1,1) = index 13 carries no label
  CHECK(m.labels[13] == 0);
  CHECK(m.omega_elems.size() == 4);
}

TEST_CASE("voxel subdivision matches an equivalent finer grid") {
  BuildGeometry g = single_voxel();
  g.element_size_mm = 0.5;
  Mesh m = build_mesh(g);
  CHECK(m.h == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.num_nodes() == 27);
  CHECK(m.num_elems() == 8);
}

TEST_CASE("planar mesh: quads, unit thickness, top/bottom labels") {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = 3;
  g.ny = 0;
  g.nz = 2;
  g.occupancy.assign(6, 1);
  Mesh m = build_mesh(g);
  REQUIRE(m.dim == 2);
  CHECK(m.nodes_per_elem == 4);
  REQUIRE(m.num_nodes() == 12);
  REQUIRE(m.num_elems() == 6);
  for (const auto& p : m.nodes) CHECK(p[1] == 0.0);
  CHECK(count_label(m, kOmega) == 4);   // z = 2 row
  CHECK(count_label(m, kLambda) == 4);  // z = 0 row
  // top face of a quad is its upper edge
  auto top = m.top_face_nodes(m.omega_elems[0]);
  CHECK(top.size() == 2);
}

TEST_CASE("re-entrant step: upward-exposed node is Omega and Gamma") {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = 2;
  g.ny = 0;
  g.nz = 2;
  // tall column at x=0, single voxel at x=1
  g.occupancy = {1, 1, 1, 0};
  Mesh m = build_mesh(g);
  // the step corner (1,0,1) is upward-exposed from the low element and on
  // the side wall of the column
  int corner = -1;
  for (int i = 0; i < m.num_nodes(); ++i)
    if (m.nodes[i] == std::array<double, 3>{1, 0, 1}) corner = i;
  REQUIRE(corner >= 0);
  CHECK((m.labels[corner] & kOmega));
  CHECK((m.labels[corner] & kGamma));
  CHECK(m.omega_elems.size() == 2);
}

TEST_CASE("two detached voxels form two components partitioning the mesh") {
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = 3;
  g.ny = 1;
  g.nz = 1;
  g.occupancy = {1, 0, 1};
  Mesh m = build_mesh(g);
  REQUIRE(m.num_elems() == 2);
  auto comps = connected_components(m);
  REQUIRE(comps.size() == 2);
  std::set<int> seen;
  int total = 0;
  for (const auto& c : comps) {
    total += static_cast<int>(c.nodes.size());
    seen.insert(c.nodes.begin(), c.nodes.end());
    CHECK(std::is_sorted(c.nodes.begin(), c.nodes.end()));
  }
  CHECK(total == m.num_nodes());
  CHECK(static_cast<int>(seen.size()) == m.num_nodes());
}

TEST_CASE("a column sharing only an edge is still one component") {
  // diagonal voxels share a node-line, which couples them thermally in the
  // assembled system, so they count as one component
  BuildGeometry g;
  g.voxel_size_mm = 1.0;
  g.element_size_mm = 1.0;
  g.nx = 2;
  g.ny = 0;
  g.nz = 2;
  g.occupancy = {1, 0, 0, 1};
  Mesh m = build_mesh(g);
  CHECK(connected_components(m).size() == 1);
}

TEST_CASE("malformed input is rejected") {
  BuildGeometry g = single_voxel();
  g.occupancy = {1, 1};
  CHECK_THROWS_AS(build_mesh(g), std::invalid_argument);

  g = single_voxel();
  g.element_size_mm = 0.3;  // does not divide 1.0
  CHECK_THROWS_AS(build_mesh(g), std::invalid_argument);

  g = single_voxel();
  g.occupancy = {0};
  CHECK_THROWS_AS(build_mesh(g), std::invalid_argument);

  g = single_voxel();
  g.voxel_size_mm = -1.0;
  CHECK_THROWS_AS(build_mesh(g), std::invalid_argument);
}

TEST_CASE("random blobs keep node ordering and label sanity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    bool planar = trial % 2 == 0;
    auto g = testutil::random_blob(rng, planar, 4, 3, 4);
    Mesh m = build_mesh(g);
    REQUIRE(m.num_nodes() > 0);
    // lexicographic order of node coordinates: (z, y, x) strictly increasing
    for (int i = 1; i < m.num_nodes(); ++i) {
      const auto& a = m.nodes[i - 1];
      const auto& b = m.nodes[i];
      bool less = (a[2] < b[2]) || (a[2] == b[2] && (a[1] < b[1] || (a[1] == b[1] && a[0] < b[0])));
      CHECK(less);
    }
    // every element with an exposed top face has its nodes labeled Omega
    for (int e : m.omega_elems)
      for (int nd : m.top_face_nodes(e)) CHECK((m.labels[nd] & kOmega));
    // base layer is fully built, so z=0 nodes are constrained
    CHECK(count_label(m, kLambda) > 0);
  }
}
