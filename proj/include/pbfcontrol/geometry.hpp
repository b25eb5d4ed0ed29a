#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace pbf {

/// Axis-aligned voxel description of a build. The occupancy grid is stored
/// flat with x fastest, then y, then z. A planar (x-z, unit thickness in y)
/// domain is marked by ny == 0.
struct BuildGeometry {
  double voxel_size_mm = 1.0;
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> occupancy;
  double element_size_mm = 1.0;

  bool planar() const { return ny == 0; }
};

/// Node boundary labels. A node may carry several labels; a constrained
/// (kLambda) node is removed from the state regardless of other labels.
enum NodeLabel : std::uint8_t {
  kOmega = 1,   // exposed face with outward normal +z: actuation and sensing
  kLambda = 2,  // exposed face at z = 0: prescribed temperature
  kGamma = 4,   // every other exposed face
};

/// Structured first-order mesh over the occupied cells. Elements are cubes
/// (hexahedra) or unit-thickness squares (quads) of edge h. Node ordering is
/// lexicographic by (z, y, x); element ordering likewise by cell index.
///
/// Local node ordering per element: bottom face counterclockwise, then top
/// face counterclockwise, so the exposed +z face is local {4,5,6,7} for a
/// hex and local {2,3} (the z = z1 edge) for a quad.
struct Mesh {
  int dim = 3;  // 2 = planar x-z domain, 3 = solid
  double h = 1.0;
  std::vector<std::array<double, 3>> nodes;  // mm; y = 0 on planar meshes
  int nodes_per_elem = 8;
  std::vector<int> conn;  // nodes_per_elem entries per element
  std::vector<std::uint8_t> labels;
  std::vector<int> omega_elems;  // elements owning an exposed +z face, ascending

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elems() const { return static_cast<int>(conn.size()) / nodes_per_elem; }
  const int* elem(int e) const { return conn.data() + static_cast<std::size_t>(e) * nodes_per_elem; }

  /// Global node ids of element e's exposed +z face (4 for hex, 2 for quad).
  std::vector<int> top_face_nodes(int e) const;
};

/// Builds the mesh from the voxel grid. Each voxel is subdivided into
/// (voxel_size/element_size)^dim cells; element_size_mm must divide
/// voxel_size_mm to within 1e-9. Throws std::invalid_argument on malformed
/// input (size mismatch, nonpositive sizes, no occupied voxels).
Mesh build_mesh(const BuildGeometry& g);

/// One node-connected piece of the mesh: elements sharing at least one node
/// are in the same component. Components partition both the element list and
/// the node list.
struct MeshComponent {
  std::vector<int> elems;
  std::vector<int> nodes;  // ascending global ids
};

std::vector<MeshComponent> connected_components(const Mesh& mesh);

}  // namespace pbf
