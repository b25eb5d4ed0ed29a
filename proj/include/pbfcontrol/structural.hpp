#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbfcontrol/geometry.hpp"
#include "pbfcontrol/system.hpp"

namespace pbf {

/// Directed system graph over state, input and output nodes. A nonzero
/// A(i,j) is the state edge j -> i; B(i,j) the driver edge u_j -> i;
/// C(i,j) the sensor edge j -> y_i.
struct SystemGraph {
  int n = 0, m = 0, p = 0;
  std::vector<std::vector<int>> succ;     // state j -> successor states i
  std::vector<std::vector<int>> driven;   // input j -> driven states
  std::vector<std::vector<int>> sensed;   // output i -> sensed states
};

SystemGraph graph_from_pattern(const SpMat& A,
                               const std::vector<std::pair<int, int>>& b_pattern,
                               const std::vector<std::pair<int, int>>& c_pattern,
                               int m, int p);
SystemGraph graph_from_case(const CaseSystem& sys);

/// Maximum matching of the bipartite out-copy/in-copy graph of the state
/// edges. match_in[i] is the out-copy matched to state i's in-copy, -1 if
/// unmatched. A perfect matching (size n) certifies the absence of
/// dilations.
struct MatchingResult {
  int size = 0;
  std::vector<int> match_in;
};

MatchingResult maximum_matching(const SystemGraph& g);

/// Component-wise structural verdicts. For these meshes every diagonal of A
/// is nonzero (self-loops) so the matching is always perfect, and
/// structural controllability reduces to: every component contains a driven
/// node. Observability is the dual with sensed nodes. The number of
/// components lower-bounds the number of drivers (and sensors) needed.
struct StructuralReport {
  int n = 0;
  int matching_size = 0;
  bool perfect_matching = false;
  int num_components = 0;
  std::vector<std::uint8_t> comp_driven, comp_sensed;
  bool controllable = false;
  bool observable = false;
  int nd_lower_bound = 0;
};

/// components gives the state indices of each connected component (every
/// state appears exactly once; pass a single full set for a connected
/// system).
StructuralReport structural_report(const SystemGraph& g,
                                   const std::vector<std::vector<int>>& components);

/// Strong structural controllability by exhaustive test of the two subset
/// conditions: every nonempty subset N of states has a node with exactly one
/// successor in N (an input allowed as that node), and every nonempty
/// predecessor-closed subset has such a node outside N. Exact and
/// exponential; refuses n > n_limit.
struct SscReport {
  bool g0_holds = false;
  bool g1_holds = false;
  bool ssc = false;
  std::vector<int> witness;  // a violating subset, empty when ssc holds
  bool witness_is_g0 = false;
  std::uint64_t subsets_examined = 0;
};

SscReport ssc_check(const SystemGraph& g, int n_limit = 20);

/// The observability dual: state edges reversed, sensor edges as drivers.
SystemGraph dual_graph(const SystemGraph& g);

/// Undirected components of the state-edge pattern (bidirectional for these
/// systems), each a sorted list of state indices.
std::vector<std::vector<int>> pattern_components(const SystemGraph& g);

/// Random numeric realizations of a pattern, staying inside the model class:
/// capacities M_i and the magnitudes of symmetric conductivity couplings are
/// drawn uniformly from [0.5, 1.5] (off-diagonals with random sign), the
/// diagonal is made strictly dominant so K stays PD, B entries are drawn on
/// the driver pattern, and A = -M^{-1}K gets a Kalman rank test.
/// mirror_nodes (copy, original) force twin values so duplicated components
/// have exactly repeated spectra.
struct InstantiateOptions {
  std::vector<std::pair<int, int>> mirror_nodes;
};

struct InstantiateResult {
  int trials = 0;
  int controllable = 0;
  double fraction = 0.0;
};

InstantiateResult instantiate_and_rank(const SystemGraph& g, std::uint64_t seed, int trials,
                                       const InstantiateOptions& opt = {});

}  // namespace pbf
