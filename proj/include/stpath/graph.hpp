#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stpath/rational.hpp"

namespace stpath {

// Subset-enumerating routines (cuts, partitions, tightness) are exact
// but exponential; they refuse instances above this many vertices.
inline constexpr int kEnumerationLimit = 22;

// Vertex subsets of instances with at most 64 vertices.
using VertexMask = std::uint64_t;

inline VertexMask bit(int v) { return VertexMask{1} << v; }
inline bool contains(VertexMask m, int v) { return (m >> v) & 1U; }
inline int popcount(VertexMask m) { return std::popcount(m); }
inline VertexMask full_mask(int n) { return n >= 64 ? ~VertexMask{0} : (bit(n) - 1); }

inline std::vector<int> members(VertexMask m) {
  std::vector<int> out;
  for (int v = 0; m != 0; ++v, m >>= 1) {
    if (m & 1U) out.push_back(v);
  }
  return out;
}

inline VertexMask mask_of(const std::vector<int>& vs) {
  VertexMask m = 0;
  for (int v : vs) m |= bit(v);
  return m;
}

inline std::string mask_to_string(VertexMask m) {
  std::string out = "{";
  bool first = true;
  for (int v : members(m)) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

// Unordered vertex pair, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  Edge() = default;
  Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {
    if (a == b) throw std::invalid_argument("edge endpoints must differ");
  }

  int other(int w) const { return w == u ? v : u; }
  bool crosses(VertexMask s) const { return contains(s, u) != contains(s, v); }
  bool inside(VertexMask s) const { return contains(s, u) && contains(s, v); }
  bool incident(int w) const { return u == w || v == w; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;

  std::string to_string() const {
    return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
  }
};

// Sparse nonnegative-by-convention edge weights; zero entries are not stored.
class EdgeVector {
 public:
  using Map = std::map<Edge, Rational>;

  EdgeVector() = default;
  EdgeVector(std::initializer_list<std::pair<const Edge, Rational>> init) {
    for (const auto& [e, val] : init) set(e, val);
  }

  Rational get(const Edge& e) const {
    auto it = entries_.find(e);
    return it == entries_.end() ? Rational(0) : it->second;
  }
  Rational operator[](const Edge& e) const { return get(e); }

  void set(const Edge& e, const Rational& val) {
    if (val.is_zero()) {
      entries_.erase(e);
    } else {
      entries_[e] = val;
    }
  }
  void add(const Edge& e, const Rational& val) { set(e, get(e) + val); }

  const Map& entries() const noexcept { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<Edge> support() const {
    std::vector<Edge> out;
    out.reserve(entries_.size());
    for (const auto& [e, val] : entries_) out.push_back(e);
    return out;
  }

  Rational total() const {
    Rational sum;
    for (const auto& [e, val] : entries_) sum += val;
    return sum;
  }

  EdgeVector scaled(const Rational& k) const {
    EdgeVector out;
    for (const auto& [e, val] : entries_) out.set(e, val * k);
    return out;
  }

  EdgeVector& operator+=(const EdgeVector& o) {
    for (const auto& [e, val] : o.entries_) add(e, val);
    return *this;
  }
  friend EdgeVector operator+(EdgeVector a, const EdgeVector& b) { return a += b; }

  bool nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& kv) { return kv.second.sign() >= 0; });
  }

  friend bool operator==(const EdgeVector&, const EdgeVector&) = default;

 private:
  Map entries_;
};

inline EdgeVector indicator(const std::vector<Edge>& edges) {
  EdgeVector out;
  for (const Edge& e : edges) out.add(e, 1);
  return out;
}

// A graph with terminals s != t and nonnegative symmetric costs on a
// declared edge set. When complete_metric is set, every pair carries a cost
// and the triangle inequality holds.
class Instance {
 public:
  Instance() = default;
  Instance(int n, int s, int t, std::map<Edge, Rational> costs, bool complete_metric = false)
      : n_(n), s_(s), t_(t), costs_(std::move(costs)), complete_metric_(complete_metric) {
    if (n_ < 2) throw std::invalid_argument("instance needs at least two vertices");
    if (n_ > 64) throw std::invalid_argument("instance limited to 64 vertices");
    if (s_ < 0 || s_ >= n_ || t_ < 0 || t_ >= n_) throw std::invalid_argument("terminal out of range");
    if (s_ == t_) throw std::invalid_argument("s and t must differ");
    for (const auto& [e, c] : costs_) {
      if (e.v >= n_) throw std::invalid_argument("edge " + e.to_string() + " out of range");
      if (c.sign() < 0) throw std::invalid_argument("negative cost on " + e.to_string());
    }
  }

  int n() const noexcept { return n_; }
  int s() const noexcept { return s_; }
  int t() const noexcept { return t_; }
  bool is_complete_metric() const noexcept { return complete_metric_; }
  const std::map<Edge, Rational>& costs() const noexcept { return costs_; }

  bool has_edge(const Edge& e) const { return costs_.count(e) != 0; }
  const Rational& cost(const Edge& e) const {
    auto it = costs_.find(e);
    if (it == costs_.end()) throw std::out_of_range("no edge " + e.to_string());
    return it->second;
  }
  const Rational& cost(int a, int b) const { return cost(Edge(a, b)); }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(costs_.size());
    for (const auto& [e, c] : costs_) out.push_back(e);
    return out;
  }

  VertexMask all() const { return full_mask(n_); }
  VertexMask terminals() const { return bit(s_) | bit(t_); }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int n_ = 2;
  int s_ = 0;
  int t_ = 1;
  std::map<Edge, Rational> costs_;
  bool complete_metric_ = false;
};

inline Rational cost_of(const Instance& inst, const EdgeVector& x) {
  Rational sum;
  for (const auto& [e, val] : x) sum += inst.cost(e) * val;
  return sum;
}

inline Rational cost_of(const Instance& inst, const std::vector<Edge>& edges) {
  Rational sum;
  for (const Edge& e : edges) sum += inst.cost(e);
  return sum;
}

// A nonempty proper vertex subset of an n-vertex graph.
class Cut {
 public:
  Cut(int n, VertexMask members) : n_(n), members_(members) {
    if (members_ == 0 || members_ == full_mask(n_) || (members_ & ~full_mask(n_)) != 0) {
      throw std::invalid_argument("cut must be a nonempty proper subset: " + mask_to_string(members));
    }
  }
  Cut(int n, const std::vector<int>& vs) : Cut(n, mask_of(vs)) {}

  int n() const noexcept { return n_; }
  VertexMask mask() const noexcept { return members_; }
  Cut complement() const { return Cut(n_, full_mask(n_) & ~members_); }
  // The side that contains vertex v; used to identify S with V\S.
  Cut side_containing(int v) const { return contains(members_, v) ? *this : complement(); }

  bool is_st_cut(int s, int t) const { return contains(members_, s) != contains(members_, t); }
  bool is_st_even(int s, int t) const { return !is_st_cut(s, t); }
  bool is_odd_for(VertexMask T) const { return popcount(members_ & T) % 2 == 1; }

  std::string to_string() const { return mask_to_string(members_); }

  friend auto operator<=>(const Cut&, const Cut&) = default;

 private:
  int n_;
  VertexMask members_;
};

inline Rational cut_value(const EdgeVector& x, VertexMask s) {
  Rational sum;
  for (const auto& [e, val] : x) {
    if (e.crosses(s)) sum += val;
  }
  return sum;
}
inline Rational cut_value(const EdgeVector& x, const Cut& s) { return cut_value(x, s.mask()); }

inline Rational inside_value(const EdgeVector& x, VertexMask s) {
  Rational sum;
  for (const auto& [e, val] : x) {
    if (e.inside(s)) sum += val;
  }
  return sum;
}

inline Rational degree(const EdgeVector& x, int v) { return cut_value(x, bit(v)); }

// Disjoint nonempty classes covering {0..n-1}.
class Partition {
 public:
  Partition(int n, std::vector<VertexMask> classes) : n_(n), classes_(std::move(classes)) {
    VertexMask seen = 0;
    for (VertexMask c : classes_) {
      if (c == 0) throw std::invalid_argument("partition class is empty");
      if ((seen & c) != 0) throw std::invalid_argument("partition classes overlap");
      seen |= c;
    }
    if (classes_.empty() || seen != full_mask(n_)) {
      throw std::invalid_argument("partition does not cover the vertex set");
    }
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return classes_.size(); }
  const std::vector<VertexMask>& classes() const noexcept { return classes_; }

  // Class index of every vertex.
  std::vector<int> labels() const {
    std::vector<int> out(n_, -1);
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      for (int v : members(classes_[i])) out[v] = static_cast<int>(i);
    }
    return out;
  }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      if (i) out += " ";
      out += mask_to_string(classes_[i]);
    }
    return out + "]";
  }

 private:
  int n_;
  std::vector<VertexMask> classes_;
};

// x(delta(W)): total weight on edges joining different classes.
inline Rational partition_value(const EdgeVector& x, const Partition& w) {
  const auto label = w.labels();
  Rational sum;
  for (const auto& [e, val] : x) {
    if (label[e.u] != label[e.v]) sum += val;
  }
  return sum;
}

inline bool is_connected(int n, const std::vector<Edge>& edges) {
  std::vector<VertexMask> adj(n, 0);
  for (const Edge& e : edges) {
    adj[e.u] |= bit(e.v);
    adj[e.v] |= bit(e.u);
  }
  VertexMask seen = bit(0);
  VertexMask frontier = seen;
  while (frontier != 0) {
    VertexMask next = 0;
    for (int v : members(frontier)) next |= adj[v];
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == full_mask(n);
}

// All-pairs shortest paths; nullopt marks unreachable pairs.
inline std::vector<std::vector<std::optional<Rational>>> shortest_distances(const Instance& inst) {
  const int n = inst.n();
  std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
  for (int v = 0; v < n; ++v) d[v][v] = Rational(0);
  for (const auto& [e, c] : inst.costs()) {
    if (!d[e.u][e.v] || c < *d[e.u][e.v]) {
      d[e.u][e.v] = c;
      d[e.v][e.u] = c;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!d[i][k]) continue;
      for (int j = 0; j < n; ++j) {
        if (!d[k][j]) continue;
        Rational via = *d[i][k] + *d[k][j];
        if (!d[i][j] || via < *d[i][j]) d[i][j] = std::move(via);
      }
    }
  }
  return d;
}

inline bool satisfies_triangle_inequality(const Instance& inst) {
  const int n = inst.n();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!inst.has_edge(Edge(u, v))) return false;
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      for (int w = u + 1; w < n; ++w) {
        if (w == v) continue;
        if (inst.cost(u, w) > inst.cost(u, v) + inst.cost(v, w)) return false;
      }
    }
  }
  return true;
}

// Complete graph on the same vertices whose costs are shortest-path
// distances in inst.
inline Instance metric_completion(const Instance& inst) {
  const auto d = shortest_distances(inst);
  std::map<Edge, Rational> costs;
  for (int u = 0; u < inst.n(); ++u) {
    for (int v = u + 1; v < inst.n(); ++v) {
      if (!d[u][v]) throw std::invalid_argument("not connected");
      costs.emplace(Edge(u, v), *d[u][v]);
    }
  }
  return Instance(inst.n(), inst.s(), inst.t(), std::move(costs), true);
}

// Edges of a shortest u-v path in inst; among equal-cost paths the one
// whose predecessor chain uses the smallest vertex ids is taken.
inline std::vector<Edge> shortest_path_edges(const Instance& inst, int from, int to) {
  const int n = inst.n();
  std::vector<std::optional<Rational>> dist(n);
  std::vector<int> pred(n, -1);
  std::vector<bool> done(n, false);
  std::vector<std::vector<std::pair<int, Rational>>> adj(n);
  for (const auto& [e, c] : inst.costs()) {
    adj[e.u].emplace_back(e.v, c);
    adj[e.v].emplace_back(e.u, c);
  }
  dist[from] = Rational(0);
  for (int round = 0; round < n; ++round) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!done[v] && dist[v] && (best < 0 || *dist[v] < *dist[best])) best = v;
    }
    if (best < 0) break;
    done[best] = true;
    for (const auto& [w, c] : adj[best]) {
      Rational via = *dist[best] + c;
      if (!dist[w] || via < *dist[w] || (via == *dist[w] && !done[w] && best < pred[w])) {
        dist[w] = via;
        pred[w] = best;
      }
    }
  }
  if (!dist[to]) throw std::invalid_argument("not connected");
  std::vector<Edge> path;
  for (int v = to; v != from; v = pred[v]) path.emplace_back(pred[v], v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace stpath
