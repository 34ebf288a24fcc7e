#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/decomposition.hpp"
#include "stpath/errors.hpp"
#include "stpath/graph.hpp"
#include "stpath/lp_core.hpp"
#include "stpath/spanning_tree.hpp"

namespace stpath {

struct HamPath {
  std::vector<int> order;
  Rational cost;

  std::string to_string() const {
    std::string out;
    for (int v : order) out += (out.empty() ? "" : " ") + std::to_string(v);
    return out;
  }
};

struct TJoin {
  VertexMask T = 0;
  std::vector<Edge> edges;
  Rational cost;
};

// Independent validation of an s-t Hamiltonian path: a permutation of V
// from s to t whose cost re-sums to the stored value.
inline std::optional<std::string> path_violation(const Instance& inst, const HamPath& path) {
  if (static_cast<int>(path.order.size()) != inst.n()) return "path does not visit every vertex once";
  std::vector<bool> seen(inst.n(), false);
  for (int v : path.order) {
    if (v < 0 || v >= inst.n() || seen[v]) return "path repeats or leaves the vertex set";
    seen[v] = true;
  }
  if (path.order.front() != inst.s() || path.order.back() != inst.t()) return "path endpoints are not s,t";
  Rational sum;
  for (std::size_t i = 1; i < path.order.size(); ++i) sum += inst.cost(path.order[i - 1], path.order[i]);
  if (sum != path.cost) return "stored cost " + path.cost.to_string() + " != " + sum.to_string();
  return std::nullopt;
}

inline VertexMask odd_degree_vertices(int n, const std::vector<Edge>& edges) {
  std::vector<int> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  VertexMask out = 0;
  for (int v = 0; v < n; ++v) {
    if (deg[v] % 2) out |= bit(v);
  }
  return out;
}

// Terminals of even tree degree and inner vertices of odd tree degree.
inline VertexMask wrong_degree_set(const SpanningTree& tree, int s, int t) {
  VertexMask out = 0;
  for (int v = 0; v < tree.n(); ++v) {
    const bool odd = tree.degree(v) % 2 == 1;
    const bool terminal = v == s || v == t;
    if (terminal != odd) out |= bit(v);
  }
  if (popcount(out) % 2 != 0) throw StructuralError("parity", "wrong-degree set has odd cardinality");
  return out;
}

inline constexpr int kMaxTJoinTerminals = 20;

// Minimum-cost T-join: a minimum perfect matching on T under shortest-path
// distances (bitmask dynamic program, pairing the lowest unmatched
// terminal first), each pair joined by a shortest path, overlapping edges
// cancelled by symmetric difference.
inline TJoin min_tjoin(const Instance& inst, VertexMask T) {
  if (popcount(T) % 2 != 0) throw std::invalid_argument("T must have even cardinality");
  if (popcount(T) > kMaxTJoinTerminals) throw std::invalid_argument("too many T vertices for exact matching");
  TJoin out;
  out.T = T;
  if (T == 0) return out;
  const auto term = members(T);
  const int k = static_cast<int>(term.size());
  const auto dist = shortest_distances(inst);
  std::vector<std::vector<Rational>> d(k, std::vector<Rational>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (!dist[term[i]][term[j]]) throw std::invalid_argument("not connected");
      d[i][j] = *dist[term[i]][term[j]];
    }
  }
  // Integer image of the distances keeps the 2^|T| table in machine words.
  mpz_class den = 1;
  for (const auto& row : d) {
    for (const auto& v : row) den = lcm(den, v.denominator());
  }
  std::vector<std::vector<long>> w(k, std::vector<long>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const mpz_class v = d[i][j].numerator() * (den / d[i][j].denominator());
      if (!v.fits_slong_p()) throw std::overflow_error("distances too large to scale");
      w[i][j] = v.get_si();
    }
  }
  const std::uint32_t full = (std::uint32_t{1} << k) - 1;
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  std::vector<long> best(full + 1, kInf);
  std::vector<int> partner(full + 1, -1);
  best[0] = 0;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) % 2) continue;
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask & ~(std::uint32_t{1} << i);
    for (int j = i + 1; j < k; ++j) {
      if (!((rest >> j) & 1U)) continue;
      const std::uint32_t sub = rest & ~(std::uint32_t{1} << j);
      const long cand = best[sub] + w[i][j];
      if (cand < best[mask]) {
        best[mask] = cand;
        partner[mask] = j;
      }
    }
  }
  std::map<Edge, int> parity;
  for (std::uint32_t mask = full; mask != 0;) {
    const int i = std::countr_zero(mask);
    const int j = partner[mask];
    std::vector<Edge> path;
    const Edge direct(term[i], term[j]);
    if (inst.has_edge(direct) && inst.cost(direct) == d[i][j]) {
      path.push_back(direct);
    } else {
      path = shortest_path_edges(inst, term[i], term[j]);
    }
    for (const Edge& e : path) parity[e] ^= 1;
    mask &= ~((std::uint32_t{1} << i) | (std::uint32_t{1} << j));
  }
  for (const auto& [e, p] : parity) {
    if (p) out.edges.push_back(e);
  }
  out.cost = cost_of(inst, out.edges);
  if (odd_degree_vertices(inst.n(), out.edges) != T) throw std::logic_error("T-join parity mismatch");
  if (out.cost * Rational(mpq_class(den)) != Rational(mpq_class(best[full]))) {
    throw std::logic_error("T-join cost differs from the matching value");
  }
  return out;
}

// Eulerian s-t trail of the multigraph (multiplicities from x), always
// leaving a vertex along its lowest-id unused neighbour, shortcut to a
// Hamiltonian s-t path by skipping repeated vertices (and t until the end).
inline HamPath euler_shortcut(const Instance& inst, const EdgeVector& multigraph) {
  const int n = inst.n();
  std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
  std::vector<Edge> support;
  Rational total;
  std::vector<int> deg(n, 0);
  for (const auto& [e, val] : multigraph) {
    if (!val.is_integer() || val.sign() < 0 || !val.numerator().fits_sint_p()) {
      throw std::invalid_argument("multigraph multiplicities must be nonnegative integers");
    }
    const int k = static_cast<int>(val.numerator().get_si());
    mult[e.u][e.v] = mult[e.v][e.u] = k;
    deg[e.u] += k;
    deg[e.v] += k;
    support.push_back(e);
    total += inst.cost(e) * val;
  }
  if (!is_connected(n, support)) throw std::invalid_argument("multigraph is not connected and spanning");
  VertexMask odd = 0;
  for (int v = 0; v < n; ++v) {
    if (deg[v] % 2) odd |= bit(v);
  }
  if (odd != inst.terminals()) throw std::invalid_argument("odd-degree vertices of the multigraph are not {s,t}");

  std::vector<int> stack{inst.s()};
  std::vector<int> trail;
  while (!stack.empty()) {
    const int v = stack.back();
    int next = -1;
    for (int w = 0; w < n; ++w) {
      if (mult[v][w] > 0) {
        next = w;
        break;
      }
    }
    if (next < 0) {
      trail.push_back(v);
      stack.pop_back();
    } else {
      --mult[v][next];
      --mult[next][v];
      stack.push_back(next);
    }
  }
  std::reverse(trail.begin(), trail.end());
  if (trail.front() != inst.s() || trail.back() != inst.t()) throw std::logic_error("Euler trail endpoints");

  HamPath path;
  std::vector<bool> seen(n, false);
  for (int v : trail) {
    if (seen[v] || v == inst.t()) continue;
    seen[v] = true;
    path.order.push_back(v);
  }
  path.order.push_back(inst.t());
  for (std::size_t i = 1; i < path.order.size(); ++i) path.cost += inst.cost(path.order[i - 1], path.order[i]);
  if (path.cost > total) throw std::logic_error("shortcutting increased the cost");
  return path;
}

inline EdgeVector tree_plus_join(const SpanningTree& tree, const TJoin& join) {
  EdgeVector m = tree.indicator();
  for (const Edge& e : join.edges) m.add(e, 1);
  return m;
}

// Minimum spanning tree, minimum T-join on its wrong-degree vertices,
// Euler trail shortcut.
inline HamPath hoogeveen(const Instance& inst) {
  if (!inst.is_complete_metric()) throw std::invalid_argument("hoogeveen needs a complete metric instance");
  const SpanningTree mst = minimum_spanning_tree(inst);
  const TJoin join = min_tjoin(inst, wrong_degree_set(mst, inst.s(), inst.t()));
  HamPath path = euler_shortcut(inst, tree_plus_join(mst, join));
  if (auto bad = path_violation(inst, path)) throw std::logic_error(*bad);
  return path;
}

inline constexpr int kBruteForcePathLimit = 11;

// Exact minimum-cost s-t Hamiltonian path by depth-first enumeration of
// inner-vertex orders with cost pruning.
inline HamPath brute_force_hamiltonian_path(const Instance& inst) {
  const int n = inst.n();
  if (n > kBruteForcePathLimit) throw std::invalid_argument("brute-force path oracle limited to 11 vertices");
  if (!inst.is_complete_metric()) throw std::invalid_argument("brute-force path oracle needs a complete instance");
  mpz_class den = 1;
  for (const auto& [e, c] : inst.costs()) den = lcm(den, c.denominator());
  std::vector<std::vector<long>> w(n, std::vector<long>(n, 0));
  for (const auto& [e, c] : inst.costs()) {
    const mpz_class v = c.numerator() * (den / c.denominator());
    if (!v.fits_slong_p()) throw std::overflow_error("costs too large to scale");
    w[e.u][e.v] = w[e.v][e.u] = v.get_si();
  }
  long best = std::numeric_limits<long>::max();
  std::vector<int> order{inst.s()}, best_order;
  std::vector<bool> used(n, false);
  used[inst.s()] = used[inst.t()] = true;
  std::function<void(long)> rec = [&](long cost) {
    if (cost >= best) return;
    if (static_cast<int>(order.size()) == n - 1) {
      const long total = cost + w[order.back()][inst.t()];
      if (total < best) {
        best = total;
        best_order = order;
        best_order.push_back(inst.t());
      }
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      const long step = w[order.back()][v];
      order.push_back(v);
      rec(cost + step);
      order.pop_back();
      used[v] = false;
    }
  };
  rec(0);
  HamPath path{best_order, {}};
  for (std::size_t i = 1; i < path.order.size(); ++i) path.cost += inst.cost(path.order[i - 1], path.order[i]);
  return path;
}

// One Christofides run seeded by a decomposition tree.
struct TreeRun {
  TreeRun(Rational l, SpanningTree j) : lambda(std::move(l)), tree(std::move(j)) {}

  Rational lambda;
  SpanningTree tree;
  VertexMask T = 0;
  Rational tree_cost;
  TJoin join;
  std::vector<Edge> st_path;        // P: the s-t path inside the tree
  Rational st_path_cost;
  Rational tree_minus_path_cost;    // c(J \ P), itself a T-join
  HamPath path;

  Rational repair_cost() const { return tree_cost + join.cost; }
};

struct BestOfMany {
  std::vector<TreeRun> runs;
  std::size_t best = 0;
  Rational expected_repair_cost;  // sum lambda_i (c(J_i) + c(F_i))

  const HamPath& best_path() const { return runs.at(best).path; }
};

inline TreeRun run_christofides_on_tree(const Instance& inst, const SpanningTree& tree, const Rational& lambda) {
  TreeRun run(lambda, tree);
  run.T = wrong_degree_set(tree, inst.s(), inst.t());
  run.tree_cost = cost_of(inst, tree.edges());
  run.join = min_tjoin(inst, run.T);
  run.st_path = tree.path(inst.s(), inst.t());
  run.st_path_cost = cost_of(inst, run.st_path);
  std::vector<Edge> rest;
  for (const Edge& e : tree.edges()) {
    if (std::find(run.st_path.begin(), run.st_path.end(), e) == run.st_path.end()) rest.push_back(e);
  }
  if (odd_degree_vertices(inst.n(), rest) != run.T) {
    throw StructuralError("rest-tjoin", "J \\ P is not a T-join for the wrong-degree set of " + tree.to_string());
  }
  run.tree_minus_path_cost = cost_of(inst, rest);
  if (run.join.cost > run.tree_minus_path_cost) throw std::logic_error("minimum T-join costlier than J \\ P");
  run.path = euler_shortcut(inst, tree_plus_join(tree, run.join));
  if (auto bad = path_violation(inst, run.path)) throw std::logic_error(*bad);
  return run;
}

// Christofides from every tree of the decomposition; the cheapest path wins
// (first tree on ties).
inline BestOfMany best_of_many(const Instance& inst, const ConvexDecomposition& dec) {
  if (!inst.is_complete_metric()) throw std::invalid_argument("best_of_many needs a complete metric instance");
  BestOfMany out;
  for (const auto& term : dec.terms) {
    out.runs.push_back(run_christofides_on_tree(inst, term.tree, term.lambda));
    out.expected_repair_cost += term.lambda * out.runs.back().repair_cost();
    if (out.runs.back().path.cost < out.runs[out.best].path.cost) out.best = out.runs.size() - 1;
  }
  if (out.runs.empty()) throw std::invalid_argument("empty decomposition");
  return out;
}

inline bool is_half_integral(const EdgeVector& x) {
  for (const auto& [e, val] : x) {
    if (val != Rational(1, 2) && val != Rational(1)) return false;
  }
  return true;
}

struct HalfIntegralRounding {
  BestOfMany runs;
  Rational bound;  // (3/2) c(x)
  // x/2 checked against every tree's T-join polyhedron.
  std::vector<CheckResult> half_feasibility;

  const HamPath& path() const { return runs.best_path(); }
};

// Best-of-many on a half-integral solution of the path Held-Karp
// relaxation. For every tree, x/2 is certified to lie in the T-join
// polyhedron of its wrong-degree set, so each min T-join costs at most
// c(x)/2 and the returned path at most (3/2) c(x).
inline HalfIntegralRounding round_half_integral(const Instance& inst, const EdgeVector& x,
                                                const ConvexDecomposition& dec) {
  if (!is_half_integral(x)) throw std::invalid_argument("input is not half-integral");
  if (auto bad = lp1_violation(inst, x)) throw std::invalid_argument("input infeasible: " + *bad);
  if (!dec.decomposes(x)) throw std::invalid_argument("decomposition does not match x");
  HalfIntegralRounding out;
  out.runs = best_of_many(inst, dec);
  out.bound = Rational(3, 2) * cost_of(inst, x);
  const EdgeVector half = x.scaled(Rational(1, 2));
  for (const auto& run : out.runs.runs) {
    out.half_feasibility.push_back(check_tjoin_polyhedron(inst.n(), run.T, half));
    if (!out.half_feasibility.back().pass) {
      throw std::logic_error("x/2 outside the T-join polyhedron: " + out.half_feasibility.back().detail);
    }
    if (run.join.cost > out.bound - cost_of(inst, x)) throw std::logic_error("T-join exceeds c(x)/2");
  }
  if (out.runs.expected_repair_cost > out.bound) throw std::logic_error("expected repair exceeds (3/2) c(x)");
  if (out.path().cost > out.bound) throw std::logic_error("rounded path exceeds (3/2) c(x)");
  return out;
}

}  // namespace stpath
