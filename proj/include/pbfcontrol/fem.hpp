#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pbfcontrol/geometry.hpp"

namespace pbf {

using SpMat = Eigen::SparseMatrix<double>;

/// Isotropic thermal properties in mm/mW/mJ/tonne/K units.
struct Material {
  double k = 250.0;     // conductivity, mW/(mm*K)
  double rho = 2.7e-9;  // density, tonne/mm^3
  double c = 9.0e8;     // specific heat, mJ/(tonne*K)

  double rho_c() const { return rho * c; }  // volumetric heat capacity, mJ/(mm^3*K)
};

/// Element conductivity and lumped capacity matrices by 2x2(x2) Gauss
/// quadrature on the isoparametric element. X_e is nodes_per_elem x dim
/// (planar elements carry unit thickness). The consistent capacity matrix is
/// lumped by row sum, so Me is returned as a vector. Throws
/// std::domain_error on a nonpositive Jacobian.
void element_matrices(const Eigen::MatrixXd& X_e, double k, double rho_c,
                      Eigen::MatrixXd& Ke, Eigen::VectorXd& Me);

/// Integrals of the shape functions over one exposed face (an edge of a quad
/// or a quadrilateral face of a hex): the nodal weights that distribute a
/// uniform unit flux on the face. X_f is face nodes x dim ordered along the
/// face boundary. Weights sum to the face measure (mm for edges with unit
/// thickness, mm^2 for faces).
Eigen::VectorXd surface_load_weights(const Eigen::MatrixXd& X_f);

/// Global conductivity (sparse, symmetric) and lumped capacity (diagonal,
/// positive) over all mesh nodes. Optional per-element scale factors
/// multiply k (conductivity) and rho*c (capacity); empty means 1 everywhere.
struct Assembled {
  SpMat K;            // mW/K
  Eigen::VectorXd M;  // mJ/K
};

Assembled assemble_global(const Mesh& mesh, const Material& mat,
                          const Eigen::VectorXd& k_scale = {},
                          const Eigen::VectorXd& c_scale = {});

/// State-space-ready model after eliminating prescribed-temperature nodes.
/// States are temperatures of free nodes relative to the build plate value
/// T0; the elimination load is constant because the prescribed value is.
struct ThermalModel {
  SpMat K;                     // free-free conductivity block
  Eigen::VectorXd M;           // free lumped capacities
  Eigen::VectorXd f;           // elimination load -K_fc * (T0 * 1), mW
  std::vector<int> free2node;  // free index -> mesh node id
  std::vector<int> node2free;  // mesh node id -> free index, -1 if constrained
  double T0 = 0.0;
  bool stable = true;  // false when some component has no prescribed node

  int n() const { return static_cast<int>(free2node.size()); }
};

ThermalModel reduce_dirichlet(const Assembled& a, const Mesh& mesh, double T0);

/// A = -M^{-1} K on the free nodes: Hurwitz when every component touches the
/// build plate, diagonalizable with real spectrum always.
SpMat build_A(const ThermalModel& model);

}  // namespace pbf
