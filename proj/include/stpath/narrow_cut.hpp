#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/christofides.hpp"
#include "stpath/decomposition.hpp"
#include "stpath/enumerate.hpp"
#include "stpath/errors.hpp"
#include "stpath/graph.hpp"
#include "stpath/lp_core.hpp"
#include "stpath/spanning_tree.hpp"

namespace stpath {

// Nested s-t cuts of value < 1 + tau, smallest first, with the derived
// partition and the cheapest crossing edge of each cut.
struct NarrowCutChain {
  Rational tau;
  std::vector<VertexMask> cuts;
  std::vector<Rational> values;
  std::vector<VertexMask> parts;  // cuts.size() + 1 classes
  std::vector<Edge> min_edges;
  std::vector<Rational> min_costs;

  std::size_t size() const { return cuts.size(); }
  Rational sum_min_costs() const {
    Rational sum;
    for (const auto& c : min_costs) sum += c;
    return sum;
  }
  // Index of the part containing v.
  int part_of(int v) const {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (contains(parts[i], v)) return static_cast<int>(i);
    }
    throw std::logic_error("vertex outside the derived partition");
  }
};

class ChainViolation : public StructuralError {
 public:
  ChainViolation(VertexMask a, VertexMask b)
      : StructuralError("chain", "narrow cuts " + mask_to_string(a) + " and " + mask_to_string(b) + " are not nested"),
        a_(a), b_(b) {}
  VertexMask first() const { return a_; }
  VertexMask second() const { return b_; }

 private:
  VertexMask a_, b_;
};

// Cheapest edge of delta(mask) among the instance's edges, lexicographically
// smallest on ties.
inline std::optional<Edge> min_cost_crossing_edge(const Instance& inst, VertexMask mask) {
  std::optional<Edge> best;
  for (const auto& [e, c] : inst.costs()) {
    if (!e.crosses(mask)) continue;
    if (!best || c < inst.cost(*best)) best = e;
  }
  return best;
}

inline NarrowCutChain narrow_cuts(const Instance& inst, const EdgeVector& x, const Rational& tau) {
  const int n = inst.n();
  require_enumerable(n, "narrow_cuts");
  if (tau.sign() <= 0) throw std::invalid_argument("tau must be positive");
  const ScaledWeights w(n, x);
  const Rational bound = Rational(1) + tau;
  const int s = inst.s(), t = inst.t();
  std::vector<int> free;
  for (int v = 0; v < n; ++v) {
    if (v != s && v != t) free.push_back(v);
  }
  std::vector<std::pair<VertexMask, Rational>> found;
  for (VertexMask sub = 0; sub < (VertexMask{1} << free.size()); ++sub) {
    VertexMask q = bit(s);
    for (std::size_t i = 0; i < free.size(); ++i) {
      if ((sub >> i) & 1U) q |= bit(free[i]);
    }
    const Rational value = w.unscale(w.cut(q));
    if (value < bound) found.emplace_back(q, value);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return popcount(a.first) != popcount(b.first) ? popcount(a.first) < popcount(b.first) : a.first < b.first;
  });
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      const VertexMask a = found[i].first, b = found[j].first;
      if ((a & b) != a || a == b) throw ChainViolation(a, b);
    }
  }
  NarrowCutChain chain;
  chain.tau = tau;
  VertexMask prev = 0;
  for (const auto& [q, value] : found) {
    chain.cuts.push_back(q);
    chain.values.push_back(value);
    chain.parts.push_back(q & ~prev);
    const auto e = min_cost_crossing_edge(inst, q);
    if (!e) throw std::invalid_argument("narrow cut " + mask_to_string(q) + " has no crossing edge");
    chain.min_edges.push_back(*e);
    chain.min_costs.push_back(inst.cost(*e));
    prev = q;
  }
  chain.parts.push_back(full_mask(n) & ~prev);
  return chain;
}

// alpha + 2 beta = 1, tau = (1 - 2 alpha) / beta - 1.
class UnifiedParams {
 public:
  UnifiedParams(Rational alpha, Rational beta, Rational tau)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), tau_(std::move(tau)) {
    if (alpha_ + Rational(2) * beta_ != Rational(1)) throw std::invalid_argument("parameters violate alpha + 2 beta = 1");
    if (alpha_.sign() < 0 || beta_.sign() <= 0) throw std::invalid_argument("parameters need alpha >= 0, beta > 0");
    if (tau_ != (Rational(1) - Rational(2) * alpha_) / beta_ - Rational(1)) {
      throw std::invalid_argument("tau does not match (1 - 2 alpha) / beta - 1");
    }
    if (tau_.sign() <= 0 || tau_ > Rational(1)) throw std::invalid_argument("tau outside (0, 1]");
  }

  const Rational& alpha() const { return alpha_; }
  const Rational& beta() const { return beta_; }
  const Rational& tau() const { return tau_; }

  std::string to_string() const {
    return "alpha=" + alpha_.to_string() + " beta=" + beta_.to_string() + " tau=" + tau_.to_string();
  }

 private:
  Rational alpha_, beta_, tau_;
};

inline UnifiedParams make_params(const Rational& beta) {
  if (beta < Rational(2, 5) || beta >= Rational(1, 2)) throw std::invalid_argument("beta must satisfy 2/5 <= beta < 1/2");
  const Rational alpha = Rational(1) - Rational(2) * beta;
  return UnifiedParams(alpha, beta, (Rational(1) - Rational(2) * alpha) / beta - Rational(1));
}

struct Correction {
  std::size_t cut_index;
  Edge edge;
  Rational coefficient;
};

struct UnifiedFractionalTJoin {
  UnifiedParams params;
  SpanningTree tree;
  VertexMask T = 0;
  EdgeVector f;
  std::vector<Correction> corrections;
};

// f = alpha X^J + beta x + sum over T-odd narrow cuts Q of
//     (1 - 2 alpha - beta x(delta(Q))) X^{e_Q}.
inline UnifiedFractionalTJoin build_unified_fractional_tjoin(const Instance& inst, const EdgeVector& x,
                                                             const NarrowCutChain& chain, const SpanningTree& tree,
                                                             const UnifiedParams& params) {
  if (chain.tau != params.tau()) throw std::invalid_argument("chain computed for a different tau");
  UnifiedFractionalTJoin out{params, tree, wrong_degree_set(tree, inst.s(), inst.t()), {}, {}};
  out.f = tree.indicator().scaled(params.alpha()) + x.scaled(params.beta());
  const Rational base = Rational(1) - Rational(2) * params.alpha();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (popcount(chain.cuts[i] & out.T) % 2 == 0) continue;
    const Rational coeff = base - params.beta() * chain.values[i];
    if (coeff.sign() < 0) throw std::logic_error("negative correction coefficient");
    out.f.add(chain.min_edges[i], coeff);
    out.corrections.push_back({i, chain.min_edges[i], coeff});
  }
  return out;
}

inline UnifiedFractionalTJoin build_unified_fractional_tjoin(const Instance& inst, const EdgeVector& x,
                                                             const SpanningTree& tree, const UnifiedParams& params) {
  return build_unified_fractional_tjoin(inst, x, narrow_cuts(inst, x, params.tau()), tree, params);
}

inline CheckResult check_unified_feasibility(const Instance& inst, const UnifiedFractionalTJoin& utj) {
  return check_tjoin_polyhedron(inst.n(), utj.T, utj.f);
}

// Edge of a tree on contracted vertices 0..k, keyed by the original edge it
// came from.
struct ContractedEdge {
  int a, b;
  Edge original;
};

// Bijection from the prefix cuts {0..i-1}, i = 1..k, to the k edges of a
// spanning tree on vertices 0..k. The last cut takes the edge at the last
// vertex on its tree path to the second-to-last vertex; those two vertices
// are then merged and the rest recurses. Returns, per cut, the index of
// the assigned edge.
inline std::vector<std::size_t> bijection_cuts_to_edges(int k, const std::vector<ContractedEdge>& tree) {
  if (static_cast<int>(tree.size()) != k) throw std::invalid_argument("contracted tree needs k edges");
  {
    DisjointSets ds(k + 1);
    for (const auto& e : tree) {
      if (e.a < 0 || e.b < 0 || e.a > k || e.b > k || !ds.unite(e.a, e.b)) {
        throw std::invalid_argument("contracted edges do not form a spanning tree");
      }
    }
  }
  // label[v] is the current (contracted) vertex of original vertex v.
  std::vector<int> label(k + 1);
  for (int v = 0; v <= k; ++v) label[v] = v;
  std::vector<bool> alive(tree.size(), true);
  std::vector<std::size_t> out(k);
  for (int m = k; m >= 1; --m) {
    // Path from vertex m-1 to vertex m in the current tree.
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(m + 1);
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (!alive[i]) continue;
      const int a = label[tree[i].a], b = label[tree[i].b];
      adj[a].emplace_back(b, i);
      adj[b].emplace_back(a, i);
    }
    std::vector<long> via(m + 1, -1);
    std::vector<int> stack{m - 1};
    std::vector<bool> seen(m + 1, false);
    seen[m - 1] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [w, i] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        via[w] = static_cast<long>(i);
        stack.push_back(w);
      }
    }
    if (via[m] < 0) throw std::logic_error("contracted tree disconnected");
    const auto chosen = static_cast<std::size_t>(via[m]);
    out[m - 1] = chosen;
    alive[chosen] = false;
    for (int v = 0; v <= k; ++v) {
      if (label[v] == m) label[v] = m - 1;
    }
  }
  std::vector<bool> used(tree.size(), false);
  for (int i = 0; i < k; ++i) {
    const auto& e = tree[out[i]];
    if (used[out[i]]) throw std::logic_error("bijection assigns an edge twice");
    used[out[i]] = true;
    if ((e.a < i + 1) == (e.b < i + 1)) throw std::logic_error("assigned edge does not cross its cut");
  }
  return out;
}

struct InequalityCheck {
  bool pass = true;
  Rational lhs;
  Rational rhs;
  std::string detail;
};

// sum c(e_Q) <= c(x), certified through a minimum spanning tree contracted
// on the derived partition and the cut-to-edge bijection.
inline InequalityCheck check_ineq_sum_eq_le_cx(const Instance& inst, const EdgeVector& x, const NarrowCutChain& chain) {
  InequalityCheck out;
  out.lhs = chain.sum_min_costs();
  out.rhs = cost_of(inst, x);
  const int k = static_cast<int>(chain.size());
  if (k > 0) {
    const SpanningTree mst = minimum_spanning_tree(inst);
    std::vector<std::pair<Rational, Edge>> order;
    for (const Edge& e : mst.edges()) order.emplace_back(inst.cost(e), e);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    DisjointSets ds(k + 1);
    std::vector<ContractedEdge> contracted;
    for (const auto& [c, e] : order) {
      const int a = chain.part_of(e.u), b = chain.part_of(e.v);
      if (a != b && ds.unite(a, b)) contracted.push_back({a, b, e});
    }
    const auto phi = bijection_cuts_to_edges(k, contracted);
    Rational image;
    for (int i = 0; i < k; ++i) {
      const Edge& e = contracted[phi[i]].original;
      if (!e.crosses(chain.cuts[i])) {
        out.pass = false;
        out.detail = "mapped edge " + e.to_string() + " misses cut " + mask_to_string(chain.cuts[i]);
        return out;
      }
      if (chain.min_costs[i] > inst.cost(e)) {
        out.pass = false;
        out.detail = "e_Q costlier than a crossing edge of " + mask_to_string(chain.cuts[i]);
        return out;
      }
      image += inst.cost(e);
    }
    const Rational mst_cost = cost_of(inst, mst.edges());
    if (image > mst_cost || mst_cost > out.rhs) {
      out.pass = false;
      out.detail = "bijection image " + image.to_string() + ", tree " + mst_cost.to_string();
      return out;
    }
  }
  if (out.lhs > out.rhs) {
    out.pass = false;
    out.detail = "sum of e_Q costs exceeds c(x)";
  }
  return out;
}

inline Rational expected_st_path_cost(const Instance& inst, const ConvexDecomposition& dec) {
  return expectation(dec, [&](const SpanningTree& j) { return cost_of(inst, j.path(inst.s(), inst.t())); });
}

// sum (2 - x(delta(Q))) c(e_Q) <= E(c(P)).
inline InequalityCheck check_ineq_expected_path(const Instance& inst, const ConvexDecomposition& dec,
                                                const NarrowCutChain& chain) {
  InequalityCheck out;
  for (std::size_t i = 0; i < chain.size(); ++i) out.lhs += (Rational(2) - chain.values[i]) * chain.min_costs[i];
  out.rhs = expected_st_path_cost(inst, dec);
  if (out.lhs > out.rhs) {
    out.pass = false;
    out.detail = "weighted e_Q sum exceeds E(c(P))";
  }
  return out;
}

struct CutProbability {
  VertexMask cut = 0;
  Rational value;           // x(delta(Q))
  Rational single_edge;     // Pr(|delta(Q) cap J| = 1)
  Rational t_odd;           // Pr(Q is T-odd)
  bool pass = true;
};

inline std::vector<CutProbability> check_probability_bounds(const Instance& inst, const ConvexDecomposition& dec,
                                                            const NarrowCutChain& chain) {
  std::vector<CutProbability> out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const VertexMask q = chain.cuts[i];
    CutProbability row;
    row.cut = q;
    row.value = chain.values[i];
    row.single_edge = distribution_query(dec, [q](const SpanningTree& j) { return j.crossing(q) == 1; });
    row.t_odd = distribution_query(dec, [&](const SpanningTree& j) {
      return popcount(q & wrong_degree_set(j, inst.s(), inst.t())) % 2 == 1;
    });
    row.pass = row.single_edge >= Rational(2) - row.value && row.t_odd <= row.value - Rational(1);
    out.push_back(row);
  }
  return out;
}

// For the wrong-degree set T of the tree, every T-odd s-t cut meets the
// tree in an even number of edges.
inline CheckResult check_parity_lemma(const SpanningTree& tree, int s, int t) {
  const int n = tree.n();
  require_enumerable(n, "check_parity_lemma");
  const VertexMask T = wrong_degree_set(tree, s, t);
  CheckResult out;
  for (VertexMask m = 1; m < full_mask(n); ++m) {
    if (!contains(m, s) || contains(m, t)) continue;
    if (popcount(m & T) % 2 == 0) continue;
    if (tree.crossing(m) % 2 != 0) {
      out.pass = false;
      out.witness = m;
      out.detail = "T-odd s-t cut " + mask_to_string(m) + " meets the tree in an odd number of edges";
      return out;
    }
  }
  return out;
}

// Square root of a rational when both numerator and denominator are squares.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r.sign() < 0) return std::nullopt;
  const mpz_class num = r.numerator(), den = r.denominator();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
  mpz_class a, b;
  mpz_sqrt(a.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(b.get_mpz_t(), den.get_mpz_t());
  return Rational(mpq_class(a, b));
}

// h(beta) = (sqrt(beta) - sqrt(1 - 2 beta))^2, exact when both roots are rational.
inline std::optional<Rational> sebo_coefficient_exact(const Rational& beta) {
  const auto a = exact_sqrt(beta);
  const auto b = exact_sqrt(Rational(1) - Rational(2) * beta);
  if (!a || !b) return std::nullopt;
  const Rational d = *a - *b;
  return d * d;
}

inline double sebo_coefficient(double beta) {
  const double d = std::sqrt(beta) - std::sqrt(1.0 - 2.0 * beta);
  return d * d;
}

// Expected repair factor of the randomized algorithm under each analysis,
// as a multiple of c(x), including the c(x) of the tree itself.
inline double aks_factor(double beta) {
  const double alpha = 1.0 - 2.0 * beta;
  const double tau = (1.0 - 2.0 * alpha) / beta - 1.0;
  return 1.0 + alpha + beta + beta * (tau / 2.0) * (tau / 2.0);
}

inline double sebo_factor(double beta) { return 1.0 + 1.0 - beta / (sebo_coefficient(beta) + 1.0); }

// max over 0 <= z < tau of z (tau - z), and of z (tau - z) / (1 - z).
inline double aks_objective(double tau, double z) { return z * (tau - z); }
inline double sebo_objective(double tau, double z) { return z * (tau - z) / (1.0 - z); }
inline double aks_maximizer(double tau) { return tau / 2.0; }
inline double sebo_maximizer(double tau) { return 1.0 - std::sqrt(1.0 - tau); }

struct TreeCertificate {
  Rational lambda;
  SpanningTree tree;
  VertexMask T = 0;
  CheckResult feasibility;
  Rational f_cost;
  Rational join_cost;
  CheckResult parity;
};

struct AnalysisReport {
  AnalysisReport(UnifiedParams p, NarrowCutChain c) : params(std::move(p)), chain(std::move(c)) {}

  UnifiedParams params;
  NarrowCutChain chain;
  std::vector<TreeCertificate> trees;
  std::vector<CutProbability> probabilities;
  InequalityCheck sum_edges;
  InequalityCheck path_edges;

  Rational cx;
  Rational expected_tree;        // E(c(J))
  Rational expected_path;        // E(c(P))
  Rational expected_rest;        // E(c(J \ P))
  Rational expected_join;        // E(c(F))
  Rational expected_f;           // E(c(f))
  Rational raw_bound;            // (alpha+beta) c(x) + sum (x(dQ)-1)(1-2alpha-beta x(dQ)) c(e_Q)
  Rational aks_bound;            // (alpha + beta + beta (tau/2)^2) c(x)
  std::optional<Rational> sebo_bound;      // (1-beta) c(x) + h(beta) E(c(P)) when h is rational
  std::optional<Rational> combined_bound;  // (1 - beta / (h+1)) c(x) when h is rational
  double sebo_bound_approx = 0;
  BestOfMany best;
  Rational best_cost;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
  Rational ratio() const { return cx.is_zero() ? Rational(1) : best_cost / cx; }
  bool within_eight_fifths() const { return best_cost <= Rational(8, 5) * cx; }
};

// Every exact check of the unified-correction analysis on one instance and
// decomposition. A failure is recorded by name rather than thrown.
inline AnalysisReport certificate_report(const Instance& inst, const EdgeVector& x, const ConvexDecomposition& dec,
                                         const UnifiedParams& params) {
  AnalysisReport r(params, narrow_cuts(inst, x, params.tau()));
  auto fail = [&](std::string what) { r.failures.push_back(std::move(what)); };
  const Rational& alpha = params.alpha();
  const Rational& beta = params.beta();

  r.cx = cost_of(inst, x);
  r.expected_tree = expectation(dec, [&](const SpanningTree& j) { return cost_of(inst, j.edges()); });
  if (r.expected_tree != r.cx) fail("E(c(J)) != c(x)");
  if (!dec.decomposes(x)) fail("decomposition does not re-sum to x");

  r.best = best_of_many(inst, dec);
  r.best_cost = r.best.best_path().cost;
  for (std::size_t i = 0; i < dec.terms.size(); ++i) {
    const auto& term = dec.terms[i];
    const auto& run = r.best.runs[i];
    const auto utj = build_unified_fractional_tjoin(inst, x, r.chain, term.tree, params);
    TreeCertificate tc{term.lambda, term.tree, utj.T, check_unified_feasibility(inst, utj), cost_of(inst, utj.f),
                       run.join.cost, check_parity_lemma(term.tree, inst.s(), inst.t())};
    if (!tc.feasibility.pass) fail("unified T-join infeasible for tree " + term.tree.to_string() + ": " + tc.feasibility.detail);
    if (!tc.parity.pass) fail("parity: " + tc.parity.detail);
    if (tc.join_cost > tc.f_cost) fail("min T-join costlier than f for tree " + term.tree.to_string());
    r.expected_f += term.lambda * tc.f_cost;
    r.expected_join += term.lambda * run.join.cost;
    r.expected_path += term.lambda * run.st_path_cost;
    r.expected_rest += term.lambda * run.tree_minus_path_cost;
    r.trees.push_back(std::move(tc));
  }

  r.probabilities = check_probability_bounds(inst, dec, r.chain);
  for (const auto& p : r.probabilities) {
    if (!p.pass) fail("probability bound at cut " + mask_to_string(p.cut));
  }
  r.sum_edges = check_ineq_sum_eq_le_cx(inst, x, r.chain);
  if (!r.sum_edges.pass) fail("sum c(e_Q) <= c(x): " + r.sum_edges.detail);
  r.path_edges = check_ineq_expected_path(inst, dec, r.chain);
  if (!r.path_edges.pass) fail("sum (2 - x(dQ)) c(e_Q) <= E(c(P))");

  const Rational base = Rational(1) - Rational(2) * alpha;
  r.raw_bound = (alpha + beta) * r.cx;
  for (std::size_t i = 0; i < r.chain.size(); ++i) {
    r.raw_bound += (r.chain.values[i] - Rational(1)) * (base - beta * r.chain.values[i]) * r.chain.min_costs[i];
  }
  const Rational half_tau = params.tau() / Rational(2);
  r.aks_bound = (alpha + beta + beta * half_tau * half_tau) * r.cx;
  if (r.expected_f > r.raw_bound) fail("E(c(f)) exceeds the probability-weighted bound");
  if (r.raw_bound > r.aks_bound) fail("raw bound exceeds the AKS-style bound");
  if (r.expected_join > r.expected_rest) fail("E(c(F)) > E(c(J \\ P))");
  if (r.expected_path + r.expected_rest != r.cx) fail("E(c(P)) + E(c(J \\ P)) != c(x)");

  const double h = sebo_coefficient(beta.to_double());
  r.sebo_bound_approx = (1.0 - beta.to_double()) * r.cx.to_double() + h * r.expected_path.to_double();
  if (const auto hx = sebo_coefficient_exact(beta)) {
    r.sebo_bound = (Rational(1) - beta) * r.cx + *hx * r.expected_path;
    r.combined_bound = (Rational(1) - beta / (*hx + Rational(1))) * r.cx;
    if (r.raw_bound > *r.sebo_bound) fail("raw bound exceeds the Sebo-style bound");
    const Rational certified = std::min(r.expected_rest, *r.sebo_bound);
    if (certified > *r.combined_bound) fail("min(E(c(J \\ P)), Sebo bound) exceeds the combined bound");
    if (r.expected_join > certified) fail("E(c(F)) exceeds the certified bound");
  }
  if (r.best_cost > r.cx + r.expected_join) fail("best path exceeds the expected repair cost");
  return r;
}

}  // namespace stpath
