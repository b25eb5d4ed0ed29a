#include "pbfcontrol/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace pbf {

namespace {

// cells per voxel edge; element_size must divide voxel_size
int subdivision(const BuildGeometry& g) {
  if (g.voxel_size_mm <= 0.0 || g.element_size_mm <= 0.0)
    throw std::invalid_argument("voxel and element sizes must be positive");
  double ratio = g.voxel_size_mm / g.element_size_mm;
  int r = static_cast<int>(std::lround(ratio));
  if (r < 1 || std::abs(ratio - r) > 1e-9 * ratio)
    throw std::invalid_argument("element size must divide voxel size");
  return r;
}

struct Disjoint {
  std::vector<int> parent;
  explicit Disjoint(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<int> Mesh::top_face_nodes(int e) const {
  const int* c = elem(e);
  if (dim == 3) return {c[4], c[5], c[6], c[7]};
  return {c[3], c[2]};  // upper edge of the quad, ascending x
}

Mesh build_mesh(const BuildGeometry& g) {
  const int r = subdivision(g);
  const bool planar = g.planar();
  if (g.nx < 1 || g.nz < 1 || (!planar && g.ny < 1))
    throw std::invalid_argument("grid dims must be positive");
  const int vy = planar ? 1 : g.ny;
  const std::size_t expect = static_cast<std::size_t>(g.nx) * vy * g.nz;
  if (g.occupancy.size() != expect)
    throw std::invalid_argument("occupancy length does not match dims");

  // cell lattice (voxels subdivided r times per axis; planar domains have a
  // single cell sheet in y handled as dim 2)
  const int cx = g.nx * r, cy = planar ? 1 : g.ny * r, cz = g.nz * r;
  auto occupied = [&](int x, int y, int z) -> bool {
    if (x < 0 || y < 0 || z < 0 || x >= cx || y >= cy || z >= cz) return false;
    const std::size_t vi = static_cast<std::size_t>(z / r) * vy * g.nx +
                           static_cast<std::size_t>(planar ? 0 : y / r) * g.nx + (x / r);
    return g.occupancy[vi] != 0;
  };

  Mesh m;
  m.dim = planar ? 2 : 3;
  m.h = g.voxel_size_mm / r;
  m.nodes_per_elem = planar ? 4 : 8;

  // corner lattice: (cx+1) x (cy+1) x (cz+1); planar collapses y to one plane
  const int px = cx + 1, py = planar ? 1 : cy + 1, pz = cz + 1;
  auto corner_id = [&](int x, int y, int z) -> long {
    return (static_cast<long>(z) * py + y) * px + x;
  };
  auto corner_used = [&](int x, int y, int z) -> bool {
    if (planar)
      return occupied(x - 1, 0, z - 1) || occupied(x, 0, z - 1) || occupied(x - 1, 0, z) ||
             occupied(x, 0, z);
    for (int dz = -1; dz <= 0; ++dz)
      for (int dy = -1; dy <= 0; ++dy)
        for (int dx = -1; dx <= 0; ++dx)
          if (occupied(x + dx, y + dy, z + dz)) return true;
    return false;
  };

  std::unordered_map<long, int> node_of;
  for (int z = 0; z < pz; ++z)
    for (int y = 0; y < py; ++y)
      for (int x = 0; x < px; ++x)
        if (corner_used(x, y, z)) {
          node_of.emplace(corner_id(x, y, z), m.num_nodes());
          m.nodes.push_back({x * m.h, y * m.h, z * m.h});
        }
  if (m.nodes.empty()) throw std::invalid_argument("no occupied voxels");
  m.labels.assign(m.nodes.size(), 0);

  auto nid = [&](int x, int y, int z) { return node_of.at(corner_id(x, y, z)); };

  for (int z = 0; z < cz; ++z)
    for (int y = 0; y < cy; ++y)
      for (int x = 0; x < cx; ++x) {
        if (!occupied(x, y, z)) continue;
        const int e = m.num_elems();
        if (planar) {
          m.conn.insert(m.conn.end(), {nid(x, 0, z), nid(x + 1, 0, z), nid(x + 1, 0, z + 1),
                                       nid(x, 0, z + 1)});
        } else {
          m.conn.insert(m.conn.end(),
                        {nid(x, y, z), nid(x + 1, y, z), nid(x + 1, y + 1, z), nid(x, y + 1, z),
                         nid(x, y, z + 1), nid(x + 1, y, z + 1), nid(x + 1, y + 1, z + 1),
                         nid(x, y + 1, z + 1)});
        }

        // exposed faces classify their corner nodes
        auto mark = [&](const std::vector<int>& ids, std::uint8_t lab) {
          for (int i : ids) m.labels[i] |= lab;
        };
        if (!occupied(x, y, z + 1)) {  // +z: actuation surface
          mark(m.top_face_nodes(e), kOmega);
          m.omega_elems.push_back(e);
        }
        if (!occupied(x, y, z - 1))  // -z: build plate when at z = 0
          mark(planar ? std::vector<int>{nid(x, 0, z), nid(x + 1, 0, z)}
                      : std::vector<int>{nid(x, y, z), nid(x + 1, y, z), nid(x + 1, y + 1, z),
                                         nid(x, y + 1, z)},
               z == 0 ? kLambda : kGamma);
        if (!occupied(x - 1, y, z))
          mark(planar ? std::vector<int>{nid(x, 0, z), nid(x, 0, z + 1)}
                      : std::vector<int>{nid(x, y, z), nid(x, y + 1, z), nid(x, y, z + 1),
                                         nid(x, y + 1, z + 1)},
               kGamma);
        if (!occupied(x + 1, y, z))
          mark(planar ? std::vector<int>{nid(x + 1, 0, z), nid(x + 1, 0, z + 1)}
                      : std::vector<int>{nid(x + 1, y, z), nid(x + 1, y + 1, z),
                                         nid(x + 1, y, z + 1), nid(x + 1, y + 1, z + 1)},
               kGamma);
        if (!planar) {
          if (!occupied(x, y - 1, z))
            mark({nid(x, y, z), nid(x + 1, y, z), nid(x, y, z + 1), nid(x + 1, y, z + 1)},
                 kGamma);
          if (!occupied(x, y + 1, z))
            mark({nid(x, y + 1, z), nid(x + 1, y + 1, z), nid(x, y + 1, z + 1),
                  nid(x + 1, y + 1, z + 1)},
                 kGamma);
        }
      }
  return m;
}

std::vector<MeshComponent> connected_components(const Mesh& mesh) {
  Disjoint dj(mesh.num_nodes());
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const int* c = mesh.elem(e);
    for (int a = 1; a < mesh.nodes_per_elem; ++a) dj.unite(c[0], c[a]);
  }
  // component order: first appearance in node order
  std::unordered_map<int, int> comp_of_root;
  std::vector<MeshComponent> comps;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    int root = dj.find(i);
    auto [it, fresh] = comp_of_root.emplace(root, static_cast<int>(comps.size()));
    if (fresh) comps.emplace_back();
    comps[it->second].nodes.push_back(i);
  }
  for (int e = 0; e < mesh.num_elems(); ++e)
    comps[comp_of_root.at(dj.find(mesh.elem(e)[0]))].elems.push_back(e);
  return comps;
}

}  // namespace pbf
