#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/graph.hpp"

namespace stpath {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Edge set of a spanning tree on {0..n-1}, kept sorted; the sorted list is
// the tree's identity.
class SpanningTree {
 public:
  SpanningTree(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    if (static_cast<int>(edges_.size()) != n_ - 1) {
      throw std::invalid_argument("spanning tree needs n-1 edges");
    }
    DisjointSets ds(n_);
    for (const Edge& e : edges_) {
      if (e.v >= n_) throw std::invalid_argument("tree edge out of range");
      if (!ds.unite(e.u, e.v)) throw std::invalid_argument("tree edges contain a cycle");
    }
  }

  int n() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool contains(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

  int degree(int v) const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                          [v](const Edge& e) { return e.incident(v); }));
  }
  int crossing(VertexMask s) const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                          [s](const Edge& e) { return e.crosses(s); }));
  }
  int inside(VertexMask s) const {
    return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                          [s](const Edge& e) { return e.inside(s); }));
  }

  // Edges of the unique path between a and b, in order from a.
  std::vector<Edge> path(int a, int b) const {
    std::vector<std::vector<int>> adj(n_);
    for (const Edge& e : edges_) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<int> pred(n_, -1);
    std::vector<int> stack{a};
    pred[a] = a;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (pred[w] < 0) {
          pred[w] = v;
          stack.push_back(w);
        }
      }
    }
    std::vector<Edge> out;
    for (int v = b; v != a; v = pred[v]) out.emplace_back(pred[v], v);
    std::reverse(out.begin(), out.end());
    return out;
  }

  EdgeVector indicator() const { return stpath::indicator(edges_); }

  std::string to_string() const {
    std::string out;
    for (const Edge& e : edges_) {
      if (!out.empty()) out += " ";
      out += std::to_string(e.u) + "-" + std::to_string(e.v);
    }
    return out;
  }

  friend auto operator<=>(const SpanningTree&, const SpanningTree&) = default;
  friend bool operator==(const SpanningTree&, const SpanningTree&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

// Number of spanning trees of the simple graph (n, edges) by the
// matrix-tree theorem: any cofactor of the Laplacian, in exact arithmetic.
inline mpz_class matrix_tree_count(int n, const std::vector<Edge>& edges) {
  if (n == 1) return 1;
  const int k = n - 1;
  std::vector<std::vector<Rational>> lap(k, std::vector<Rational>(k));
  for (const Edge& e : edges) {
    if (e.u < k) lap[e.u][e.u] += 1;
    if (e.v < k) lap[e.v][e.v] += 1;
    if (e.u < k && e.v < k) {
      lap[e.u][e.v] -= 1;
      lap[e.v][e.u] -= 1;
    }
  }
  Rational det(1);
  for (int c = 0; c < k; ++c) {
    int p = c;
    while (p < k && lap[p][c].is_zero()) ++p;
    if (p == k) return 0;
    if (p != c) {
      std::swap(lap[p], lap[c]);
      det = -det;
    }
    det *= lap[c][c];
    for (int r = c + 1; r < k; ++r) {
      if (lap[r][c].is_zero()) continue;
      const Rational f = lap[r][c] / lap[c][c];
      for (int j = c; j < k; ++j) lap[r][j] -= f * lap[c][j];
    }
  }
  if (!det.is_integer()) throw std::logic_error("matrix-tree determinant is not integral");
  return det.numerator();
}

inline constexpr long kDefaultTreeLimit = 1'000'000;

// Every spanning tree of the simple graph (n, edges), in lexicographic
// order of sorted edge lists. The count is cross-checked against the
// matrix-tree theorem.
inline std::vector<SpanningTree> enumerate_spanning_trees(int n, std::vector<Edge> edges,
                                                          long limit = kDefaultTreeLimit) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const mpz_class expected = matrix_tree_count(n, edges);
  if (expected == 0) throw std::invalid_argument("support graph is not connected");
  if (expected > limit) {
    throw std::invalid_argument("spanning tree count " + expected.get_str() + " exceeds limit " +
                                std::to_string(limit));
  }
  std::vector<SpanningTree> out;
  std::vector<Edge> chosen;
  const int m = static_cast<int>(edges.size());
  // Include/exclude recursion; union-find state is rebuilt per branch,
  // which is cheap at these sizes.
  std::function<void(int)> rec = [&](int i) {
    if (static_cast<int>(chosen.size()) == n - 1) {
      out.emplace_back(n, chosen);
      return;
    }
    if (m - i < n - 1 - static_cast<int>(chosen.size())) return;
    DisjointSets ds(n);
    for (const Edge& e : chosen) ds.unite(e.u, e.v);
    if (ds.find(edges[i].u) != ds.find(edges[i].v)) {
      chosen.push_back(edges[i]);
      rec(i + 1);
      chosen.pop_back();
    }
    // Excluding edge i must leave the remaining graph able to connect.
    DisjointSets rest(n);
    for (const Edge& e : chosen) rest.unite(e.u, e.v);
    for (int j = i + 1; j < m; ++j) rest.unite(edges[j].u, edges[j].v);
    int roots = 0;
    for (int v = 0; v < n; ++v) roots += rest.find(v) == v;
    if (roots == 1) rec(i + 1);
  };
  rec(0);
  if (mpz_class(static_cast<long>(out.size())) != expected) {
    throw std::logic_error("spanning tree enumeration disagrees with the matrix-tree count");
  }
  return out;
}

// Kruskal with ties broken by the lexicographically smaller edge.
inline SpanningTree minimum_spanning_tree(const Instance& inst) {
  std::vector<std::pair<Rational, Edge>> order;
  for (const auto& [e, c] : inst.costs()) order.emplace_back(c, e);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  DisjointSets ds(inst.n());
  std::vector<Edge> chosen;
  for (const auto& [c, e] : order) {
    if (ds.unite(e.u, e.v)) chosen.push_back(e);
  }
  if (static_cast<int>(chosen.size()) != inst.n() - 1) throw std::invalid_argument("not connected");
  return SpanningTree(inst.n(), std::move(chosen));
}

}  // namespace stpath
