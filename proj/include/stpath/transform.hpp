#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stpath/christofides.hpp"
#include "stpath/decomposition.hpp"
#include "stpath/errors.hpp"
#include "stpath/graph.hpp"
#include "stpath/lp_core.hpp"

namespace stpath {

inline constexpr int kSplittingLimit = 16;

class Multigraph {
 public:
  explicit Multigraph(int n) : n_(n), m_(static_cast<std::size_t>(n) * n, 0) {}

  int n() const { return n_; }
  long count(int a, int b) const { return m_[a * n_ + b]; }
  void add(int a, int b, long k) {
    if (a == b) throw std::invalid_argument("multigraph loops are not stored");
    m_[a * n_ + b] += k;
    m_[b * n_ + a] += k;
    if (m_[a * n_ + b] < 0) throw std::logic_error("negative multiplicity");
  }

  long degree(int v) const {
    long d = 0;
    for (int w = 0; w < n_; ++w) d += count(v, w);
    return d;
  }
  long cut(VertexMask s) const {
    long sum = 0;
    for (int a = 0; a < n_; ++a) {
      if (!contains(s, a)) continue;
      for (int b = 0; b < n_; ++b) {
        if (!contains(s, b)) sum += count(a, b);
      }
    }
    return sum;
  }

  // Removes (p,v),(v,q) and adds (p,q); the loop is dropped when p == q.
  void split(int v, int p, int q) {
    add(v, p, -1);
    add(v, q, -1);
    if (p != q) add(p, q, 1);
  }

  EdgeVector as_vector(const Rational& scale = Rational(1)) const {
    EdgeVector out;
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        if (count(a, b) != 0) out.set(Edge(a, b), Rational(count(a, b)) * scale);
      }
    }
    return out;
  }

  Rational cost(const Instance& inst) const {
    Rational sum;
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        if (count(a, b) != 0) sum += inst.cost(a, b) * Rational(count(a, b));
      }
    }
    return sum;
  }

  friend bool operator==(const Multigraph&, const Multigraph&) = default;

 private:
  int n_;
  std::vector<long> m_;
};

// Smallest |delta(S)| over proper nonempty S inside V \ {v}; nullopt when
// V \ {v} has a single vertex.
inline std::optional<std::pair<long, VertexMask>> min_cut_avoiding(const Multigraph& g, int v) {
  const int n = g.n();
  const VertexMask u = full_mask(n) & ~bit(v);
  std::optional<std::pair<long, VertexMask>> best;
  // Submasks of U other than the empty set and U itself.
  for (VertexMask s = (u - 1) & u; s != 0; s = (s - 1) & u) {
    const long c = g.cut(s);
    if (!best || c < best->first) best = std::make_pair(c, s);
  }
  return best;
}

inline bool split_keeps_condition(Multigraph g, int v, int p, int q, long d) {
  g.split(v, p, q);
  const auto m = min_cut_avoiding(g, v);
  return !m || m->first >= d;
}

struct SplitPair {
  int p, q;
  friend auto operator<=>(const SplitPair&, const SplitPair&) = default;
};

// A partition of the edges at v into pairs, each of which can be split off
// alone without any cut inside V \ {v} dropping below d. Pair types are
// tested once; the pairing itself is found by backtracking over
// multiplicities.
inline std::vector<SplitPair> split_at_vertex(const Multigraph& g, int v, long d) {
  const int n = g.n();
  if (n > kSplittingLimit) throw std::invalid_argument("splitting limited to 16 vertices");
  if (d <= 0) throw std::invalid_argument("d must be positive");
  for (int w = 0; w < n; ++w) {
    if (g.degree(w) % 2 != 0) throw std::invalid_argument("multigraph has a vertex of odd degree");
  }
  if (const auto m = min_cut_avoiding(g, v); m && m->first < d) {
    throw std::invalid_argument("cut condition fails before splitting at " + mask_to_string(m->second));
  }
  std::vector<long> remaining(n);
  for (int w = 0; w < n; ++w) remaining[w] = g.count(v, w);
  std::map<std::pair<int, int>, bool> admissible;
  auto ok = [&](int p, int q) {
    const auto key = std::minmax(p, q);
    const auto it = admissible.find(key);
    if (it != admissible.end()) return it->second;
    const bool good = split_keeps_condition(g, v, key.first, key.second, d);
    admissible.emplace(key, good);
    return good;
  };
  std::vector<SplitPair> pairs;
  std::function<bool()> rec = [&]() {
    int p = 0;
    while (p < n && remaining[p] == 0) ++p;
    if (p == n) return true;
    --remaining[p];
    for (int q = p; q < n; ++q) {
      if (remaining[q] == 0 || !ok(p, q)) continue;
      --remaining[q];
      pairs.push_back({p, q});
      if (rec()) return true;
      pairs.pop_back();
      ++remaining[q];
    }
    ++remaining[p];
    return false;
  };
  if (!rec()) throw StructuralError("splitting", "no admissible pairing at vertex " + std::to_string(v));
  return pairs;
}

struct Lp4ToLp1 {
  EdgeVector x;            // the L.P.1 solution on the metric completion
  Rational input_cost;     // c'(x) on the base graph
  Rational output_cost;
  long scale = 1;          // C
  int splits = 0;
};

// Extends x by one unit on (s,t), scales by 2C to an integral multigraph
// with every cut at least 4C, splits vertices down to degree 4C while
// keeping at least 2C copies of (s,t), then scales back and removes the
// extra (s,t) unit.
inline Lp4ToLp1 lp4_to_lp1(const Instance& base, const EdgeVector& x) {
  const int n = base.n();
  if (n > kSplittingLimit) throw std::invalid_argument("lp4_to_lp1 limited to 16 vertices");
  if (n <= kPartitionEnumerationLimit) {
    if (auto bad = lp4_violation(base, x)) throw std::invalid_argument("input infeasible for L.P.4: " + *bad);
  }
  for (const auto& [e, val] : x) {
    if (!base.has_edge(e)) throw std::invalid_argument("input uses non-edge " + e.to_string());
    if (val.sign() < 0) throw std::invalid_argument("input has a negative entry");
  }
  const Instance g = metric_completion(base);
  const int s = base.s(), t = base.t();
  if (n == 2) {
    // Only one vertex pair: the sole L.P.1 solution is the edge itself.
    Lp4ToLp1 out;
    out.x.set(Edge(s, t), 1);
    out.input_cost = cost_of(base, x);
    out.output_cost = cost_of(g, out.x);
    if (out.output_cost > out.input_cost) throw std::logic_error("transform increased the cost");
    return out;
  }
  EdgeVector y = x;
  y.add(Edge(s, t), 1);
  mpz_class den = 1;
  for (const auto& [e, val] : y) den = lcm(den, val.denominator());
  if (!den.fits_slong_p()) throw std::overflow_error("scale too large");
  Lp4ToLp1 out;
  out.scale = den.get_si();
  out.input_cost = cost_of(base, x);
  const long c = out.scale;

  Multigraph k(n);
  for (const auto& [e, val] : y) {
    const Rational m = val * Rational(2 * c);
    k.add(e.u, e.v, m.numerator().get_si());
  }
  for (VertexMask m = 1; m < bit(n - 1); ++m) {
    if (k.cut(m) < 4 * c) throw std::logic_error("scaled multigraph has a cut below 4C");
  }
  Rational cost = k.cost(g);

  for (int v = 0; v < n; ++v) {
    while (k.degree(v) > 4 * c) {
      const auto pairing = split_at_vertex(k, v, 4 * c);
      std::optional<SplitPair> pick;
      if (v == s || v == t) {
        const int other = v == s ? t : s;
        for (const auto& pr : pairing) {
          if (pr.p != other && pr.q != other) {
            pick = pr;
            break;
          }
        }
        if (!pick) {
          for (const auto& pr : pairing) {
            const long used = (pr.p == other) + (pr.q == other);
            if (k.count(s, t) - used >= 2 * c) {
              pick = pr;
              break;
            }
          }
        }
        if (!pick) throw StructuralError("splitting", "no pair keeps 2C copies of (s,t)");
      } else {
        pick = pairing.front();
      }
      k.split(v, pick->p, pick->q);
      ++out.splits;
      if (const auto m = min_cut_avoiding(k, v); m && m->first < 4 * c) {
        throw StructuralError("splitting", "split at " + std::to_string(v) + " broke cut " + mask_to_string(m->second));
      }
      const Rational now = k.cost(g);
      if (now > cost) throw std::logic_error("splitting increased the cost");
      cost = now;
      if (k.count(s, t) < 2 * c) throw StructuralError("splitting", "fewer than 2C copies of (s,t) remain");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (k.degree(v) != 4 * c) throw std::logic_error("vertex degree differs from 4C after splitting");
  }
  if (k.count(s, t) != 2 * c) throw std::logic_error("z'(s,t) differs from 1");
  EdgeVector z = k.as_vector(Rational(1, 2 * c));
  z.add(Edge(s, t), -1);
  out.x = z;
  out.output_cost = cost_of(g, out.x);
  if (auto bad = lp1_violation(g, out.x)) throw std::logic_error("transformed vector infeasible for L.P.1: " + *bad);
  if (out.output_cost > out.input_cost) throw std::logic_error("transformation increased the cost");
  return out;
}

// Each support edge (u,v) of an L.P.1 vector is replaced by a shortest u-v
// path of the base graph (the edge itself when it is one).
inline EdgeVector lp1_to_lp4(const Instance& base, const EdgeVector& x) {
  const Instance g = metric_completion(base);
  EdgeVector out;
  for (const auto& [e, val] : x) {
    if (base.has_edge(e) && base.cost(e) == g.cost(e)) {
      out.add(e, val);
      continue;
    }
    for (const Edge& f : shortest_path_edges(base, e.u, e.v)) out.add(f, val);
  }
  if (cost_of(base, out) != cost_of(g, x)) throw std::logic_error("substitution changed the cost");
  if (base.n() <= kPartitionEnumerationLimit) {
    if (auto bad = lp4_violation(base, out)) throw std::logic_error("substituted vector infeasible for L.P.4: " + *bad);
  }
  return out;
}

inline constexpr int kIntegralLp1Limit = 11;
inline constexpr int kIntegralLp4Limit = 10;

struct IntegralOptimum {
  Rational value;
  EdgeVector x;
  HamPath path;  // LP1 only
};

// Integral L.P.1 solutions are the Hamiltonian s-t paths of the completion.
inline IntegralOptimum brute_opt_int_lp1(const Instance& base) {
  if (base.n() > kIntegralLp1Limit) throw std::invalid_argument("integral L.P.1 oracle limited to 11 vertices");
  const Instance g = base.is_complete_metric() ? base : metric_completion(base);
  IntegralOptimum out;
  out.path = brute_force_hamiltonian_path(g);
  out.value = out.path.cost;
  for (std::size_t i = 1; i < out.path.order.size(); ++i) out.x.add(Edge(out.path.order[i - 1], out.path.order[i]), 1);
  return out;
}

// Integer vector on the base edges: feasible for L.P.4 iff its support is
// connected (partition constraints) and every {s,t}-even cut carries 2.
inline bool integral_lp4_feasible(const Instance& base, const std::vector<Edge>& edges, const std::vector<int>& mult) {
  const int n = base.n();
  std::vector<Edge> support;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (mult[i] > 0) support.push_back(edges[i]);
  }
  if (!is_connected(n, support)) return false;
  const int s = base.s(), t = base.t();
  for (VertexMask m = 1; m < bit(n - 1); ++m) {
    if (contains(m, s) != contains(m, t)) continue;
    int value = 0;
    for (std::size_t i = 0; i < edges.size() && value < 2; ++i) {
      if (edges[i].crosses(m)) value += mult[i];
    }
    if (value < 2) return false;
  }
  return true;
}

// Exhaustive search over multiplicities 0..max_mult on the base edges with
// cost and degree pruning.
inline IntegralOptimum brute_opt_int_lp4(const Instance& base, int max_mult = 2) {
  if (base.n() > kIntegralLp4Limit) throw std::invalid_argument("integral L.P.4 oracle limited to 10 vertices");
  const auto edges = base.edges();
  const std::size_t m = edges.size();
  mpz_class den = 1;
  for (const Edge& e : edges) den = lcm(den, base.cost(e).denominator());
  std::vector<long> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    const mpz_class v = base.cost(edges[i]).numerator() * (den / base.cost(edges[i]).denominator());
    w[i] = v.get_si();
  }
  std::vector<int> mult(m, 0), best_mult;
  long best = std::numeric_limits<long>::max();
  // Vertex degrees are final once the last incident edge is decided; every
  // inner vertex needs degree 2 and the terminals degree 1.
  std::vector<std::vector<int>> closes(m);
  for (int v = 0; v < base.n(); ++v) {
    long last = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (edges[i].u == v || edges[i].v == v) last = static_cast<long>(i);
    }
    if (last < 0) throw std::invalid_argument("vertex " + std::to_string(v) + " has no edges");
    closes[static_cast<std::size_t>(last)].push_back(v);
  }
  std::vector<int> deg(base.n(), 0);
  auto need = [&](int v) { return v == base.s() || v == base.t() ? 1 : 2; };
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long cost) {
    if (cost >= best) return;
    if (i > 0) {
      for (int v : closes[i - 1]) {
        if (deg[v] < need(v)) return;
      }
    }
    if (i == m) {
      if (integral_lp4_feasible(base, edges, mult)) {
        best = cost;
        best_mult = mult;
      }
      return;
    }
    for (int k = 0; k <= max_mult; ++k) {
      mult[i] = k;
      deg[edges[i].u] += k;
      deg[edges[i].v] += k;
      rec(i + 1, cost + k * w[i]);
      deg[edges[i].u] -= k;
      deg[edges[i].v] -= k;
    }
    mult[i] = 0;
  };
  rec(0, 0);
  if (best_mult.empty()) throw std::invalid_argument("no integral L.P.4 solution within the multiplicity bound");
  IntegralOptimum out;
  for (std::size_t i = 0; i < m; ++i) {
    if (best_mult[i] > 0) out.x.set(edges[i], best_mult[i]);
  }
  out.value = cost_of(base, out.x);
  return out;
}

struct RatioReport {
  Rational opt_lp1;
  Rational opt_lp4;
  Rational ratio;
  HamPath optimal_path;
  EdgeVector lp4_solution;
  std::optional<bool> multiplicity_three_agrees;  // set when the wider search ran
  EdgeVector half_integral;                       // lp4_to_lp1 of the L.P.4 optimum
  HamPath constructive_path;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
};

// Opt_int(LP4) <= Opt_int(LP1) <= (3/2) Opt_int(LP4), plus the constructive
// route through the half-integral transform and rounding.
inline RatioReport check_ratio_theorem(const Instance& base, bool check_multiplicity_three = false) {
  RatioReport r;
  const auto one = brute_opt_int_lp1(base);
  const auto four = brute_opt_int_lp4(base);
  r.opt_lp1 = one.value;
  r.opt_lp4 = four.value;
  r.optimal_path = one.path;
  r.lp4_solution = four.x;
  r.ratio = r.opt_lp4.is_zero() ? Rational(1) : r.opt_lp1 / r.opt_lp4;
  if (r.opt_lp4 > r.opt_lp1) r.failures.push_back("Opt_int(LP4) > Opt_int(LP1)");
  if (r.opt_lp1 > Rational(3, 2) * r.opt_lp4) r.failures.push_back("Opt_int(LP1) > 3/2 Opt_int(LP4)");
  if (check_multiplicity_three) {
    r.multiplicity_three_agrees = brute_opt_int_lp4(base, 3).value == r.opt_lp4;
    if (!*r.multiplicity_three_agrees) r.failures.push_back("multiplicity 3 improves the L.P.4 oracle");
  }
  const Instance g = metric_completion(base);
  const auto half = lp4_to_lp1(base, four.x);
  r.half_integral = half.x;
  if (!is_half_integral(half.x)) r.failures.push_back("transform of an integral solution is not half-integral");
  const auto dec = decompose(g.n(), half.x);
  const auto rounded = round_half_integral(g, half.x, dec);
  r.constructive_path = rounded.path();
  if (r.constructive_path.cost > Rational(3, 2) * r.opt_lp4) r.failures.push_back("constructive path exceeds 3/2 Opt_int(LP4)");
  if (r.constructive_path.cost < r.opt_lp1) r.failures.push_back("constructive path beats the brute-force optimum");
  return r;
}

}  // namespace stpath
