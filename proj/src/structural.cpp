#include "pbfcontrol/structural.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

namespace pbf {

namespace {

// Kuhn's augmenting path search on the out-copy/in-copy bipartite graph
bool augment(const SystemGraph& g, int out, std::vector<int>& match_in,
             std::vector<std::uint8_t>& visited) {
  for (int in : g.succ[out]) {
    if (visited[in]) continue;
    visited[in] = 1;
    if (match_in[in] < 0 || augment(g, match_in[in], match_in, visited)) {
      match_in[in] = out;
      return true;
    }
  }
  return false;
}

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int numerical_rank(const Eigen::MatrixXd& X) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double thresh =
      std::max(X.rows(), X.cols()) * std::numeric_limits<double>::epsilon() * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) r += sv(i) > thresh ? 1 : 0;
  return r;
}

}  // namespace

SystemGraph graph_from_pattern(const SpMat& A,
                               const std::vector<std::pair<int, int>>& b_pattern,
                               const std::vector<std::pair<int, int>>& c_pattern,
                               int m, int p) {
  SystemGraph g;
  g.n = static_cast<int>(A.rows());
  g.m = m;
  g.p = p;
  g.succ.assign(g.n, {});
  for (int col = 0; col < A.outerSize(); ++col)
    for (SpMat::InnerIterator it(A, col); it; ++it)
      if (it.value() != 0.0) g.succ[static_cast<int>(it.col())].push_back(static_cast<int>(it.row()));
  for (auto& s : g.succ) std::sort(s.begin(), s.end());
  g.driven.assign(m, {});
  for (auto [row, col] : b_pattern) g.driven[col].push_back(row);
  g.sensed.assign(p, {});
  for (auto [row, col] : c_pattern) g.sensed[row].push_back(col);
  return g;
}

SystemGraph graph_from_case(const CaseSystem& sys) {
  return graph_from_pattern(sys.A, sys.b_pattern, sys.c_pattern, sys.m, sys.p);
}

MatchingResult maximum_matching(const SystemGraph& g) {
  MatchingResult r;
  r.match_in.assign(g.n, -1);
  for (int out = 0; out < g.n; ++out) {
    std::vector<std::uint8_t> visited(g.n, 0);
    if (augment(g, out, r.match_in, visited)) ++r.size;
  }
  return r;
}

std::vector<std::vector<int>> pattern_components(const SystemGraph& g) {
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int j = 0; j < g.n; ++j)
    for (int i : g.succ[j]) parent[find(i)] = find(j);
  std::map<int, std::vector<int>> by_root;
  for (int i = 0; i < g.n; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<int>> comps;
  comps.reserve(by_root.size());
  for (auto& [root, nodes] : by_root) comps.push_back(std::move(nodes));
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

StructuralReport structural_report(const SystemGraph& g,
                                   const std::vector<std::vector<int>>& components) {
  StructuralReport rep;
  rep.n = g.n;
  auto mr = maximum_matching(g);
  rep.matching_size = mr.size;
  rep.perfect_matching = mr.size == g.n;
  rep.num_components = static_cast<int>(components.size());
  rep.nd_lower_bound = rep.num_components;

  std::vector<std::uint8_t> is_driven(g.n, 0), is_sensed(g.n, 0);
  for (const auto& d : g.driven)
    for (int v : d) is_driven[v] = 1;
  for (const auto& s : g.sensed)
    for (int v : s) is_sensed[v] = 1;

  rep.comp_driven.resize(components.size());
  rep.comp_sensed.resize(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    rep.comp_driven[c] = rep.comp_sensed[c] = 0;
    for (int v : components[c]) {
      if (is_driven[v]) rep.comp_driven[c] = 1;
      if (is_sensed[v]) rep.comp_sensed[c] = 1;
    }
  }
  auto all = [](const std::vector<std::uint8_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
  };
  rep.controllable = rep.perfect_matching && all(rep.comp_driven);
  rep.observable = rep.perfect_matching && all(rep.comp_sensed);
  return rep;
}

SscReport ssc_check(const SystemGraph& g, int n_limit) {
  if (g.n > n_limit) throw std::length_error("exhaustive subset check limited to n_limit states");
  SscReport rep;
  const int n = g.n;
  const std::uint32_t full = (n >= 32) ? 0xffffffffu : ((1u << n) - 1u);

  // successor masks for states and inputs; state predecessor masks
  std::vector<std::uint32_t> succ_mask(n, 0), pred_mask(n, 0), input_mask(g.m, 0);
  std::uint32_t driven_any = 0;
  for (int j = 0; j < n; ++j)
    for (int i : g.succ[j]) {
      succ_mask[j] |= 1u << i;
      pred_mask[i] |= 1u << j;
    }
  for (int u = 0; u < g.m; ++u)
    for (int i : g.driven[u]) {
      input_mask[u] |= 1u << i;
      driven_any |= 1u << i;
    }

  auto witness_from = [&](std::uint32_t mask) {
    std::vector<int> w;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) w.push_back(i);
    return w;
  };

  rep.g0_holds = true;
  rep.g1_holds = true;
  for (std::uint32_t N = 1; N <= full; ++N) {
    ++rep.subsets_examined;

    bool g0_ok = false;
    for (int j = 0; j < n && !g0_ok; ++j)
      g0_ok = std::popcount(succ_mask[j] & N) == 1;
    for (int u = 0; u < g.m && !g0_ok; ++u)
      g0_ok = std::popcount(input_mask[u] & N) == 1;
    if (!g0_ok && rep.g0_holds) {
      rep.g0_holds = false;
      rep.witness = witness_from(N);
      rep.witness_is_g0 = true;
    }

    // predecessor-closed: no driven member, and state predecessors inside
    if ((N & driven_any) == 0) {
      bool closed = true;
      for (int i = 0; i < n && closed; ++i)
        if (N & (1u << i)) closed = (pred_mask[i] & ~N) == 0;
      if (closed) {
        bool g1_ok = false;
        for (int j = 0; j < n && !g1_ok; ++j)
          if (!(N & (1u << j))) g1_ok = std::popcount(succ_mask[j] & N) == 1;
        for (int u = 0; u < g.m && !g1_ok; ++u)
          g1_ok = std::popcount(input_mask[u] & N) == 1;
        if (!g1_ok && rep.g1_holds) {
          rep.g1_holds = false;
          if (rep.witness.empty() || rep.witness_is_g0) {
            // keep the first overall witness; prefer reporting G0's if both
            if (rep.g0_holds) {
              rep.witness = witness_from(N);
              rep.witness_is_g0 = false;
            }
          }
        }
      }
    }
    if (!rep.g0_holds && !rep.g1_holds) break;
  }
  rep.ssc = rep.g0_holds && rep.g1_holds;
  if (rep.ssc) rep.witness.clear();
  return rep;
}

SystemGraph dual_graph(const SystemGraph& g) {
  SystemGraph d;
  d.n = g.n;
  d.m = g.p;
  d.p = g.m;
  d.succ.assign(g.n, {});
  for (int j = 0; j < g.n; ++j)
    for (int i : g.succ[j]) d.succ[i].push_back(j);
  for (auto& s : d.succ) std::sort(s.begin(), s.end());
  d.driven = g.sensed;
  d.sensed = g.driven;
  return d;
}

InstantiateResult instantiate_and_rank(const SystemGraph& g, std::uint64_t seed, int trials,
                                       const InstantiateOptions& opt) {
  const int n = g.n;
  // symmetrized coupling pattern (the model class has symmetric K)
  std::vector<std::pair<int, int>> pairs;  // i < j
  std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i : g.succ[j])
      if (i != j) adj[std::min(i, j)][std::max(i, j)] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj[i][j]) pairs.push_back({i, j});

  // twin map: copy -> original
  std::vector<int> twin(n, -1);
  for (auto [copy, orig] : opt.mirror_nodes) twin[copy] = orig;
  auto mirrored = [&](int i) { return twin[i] >= 0 ? twin[i] : i; };

  InstantiateResult res;
  res.trials = trials;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = seed;
    (void)splitmix(s);
    s ^= static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ull;
    std::mt19937_64 rng(splitmix(s));
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::uniform_int_distribution<int> coin(0, 1);

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (auto [i, j] : pairs) {
      double v = mag(rng) * (coin(rng) ? 1.0 : -1.0);
      K(i, j) = K(j, i) = v;
    }
    Eigen::VectorXd extra(n), M(n);
    for (int i = 0; i < n; ++i) extra(i) = mag(rng);
    for (int i = 0; i < n; ++i) M(i) = mag(rng);

    // twins copy the original's couplings, dominance extra and capacity so
    // duplicated components reproduce the spectrum exactly
    for (auto [i, j] : pairs) {
      const int oi = mirrored(i), oj = mirrored(j);
      if (oi != i || oj != j) K(i, j) = K(j, i) = K(std::min(oi, oj), std::max(oi, oj));
    }
    for (int i = 0; i < n; ++i)
      if (twin[i] >= 0) {
        extra(i) = extra(twin[i]);
        M(i) = M(twin[i]);
      }
    for (int i = 0; i < n; ++i) K(i, i) = K.row(i).cwiseAbs().sum() + extra(i);

    Eigen::MatrixXd A = -(M.cwiseInverse().asDiagonal() * K);

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, std::max(g.m, 1));
    for (int u = 0; u < g.m; ++u)
      for (int i : g.driven[u]) B(i, u) = mag(rng);

    // Kalman controllability matrix rank. Columns are scaled to unit norm
    // first: positive column scaling preserves exact rank but undoes the
    // |lambda|^k decay across blocks that would otherwise sink the trailing
    // singular values below the threshold for purely numerical reasons.
    Eigen::MatrixXd ctrb(n, static_cast<long>(n) * B.cols());
    Eigen::MatrixXd cur = B;
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(static_cast<long>(k) * B.cols(), B.cols()) = cur;
      if (k + 1 < n) cur = A * cur;
    }
    for (long c = 0; c < ctrb.cols(); ++c) {
      const double len = ctrb.col(c).norm();
      if (len > 0.0) ctrb.col(c) /= len;
    }
    if (numerical_rank(ctrb) == n) ++res.controllable;
  }
  res.fraction = trials > 0 ? static_cast<double>(res.controllable) / trials : 0.0;
  return res;
}

}  // namespace pbf
