#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stpath/christofides.hpp"
#include "stpath/decomposition.hpp"
#include "stpath/errors.hpp"
#include "stpath/io.hpp"
#include "stpath/lp_core.hpp"
#include "stpath/narrow_cut.hpp"
#include "stpath/transform.hpp"

namespace stpath {

namespace builtin {

inline constexpr std::string_view kHbInstance = R"(n 8 s 0 t 7 metric 0
0 1 1
0 3 1
1 2 1
1 3 2
2 4 2
2 5 2
2 7 1
3 4 1
3 6 2
4 5 2
5 6 1
6 7 2
)";

inline constexpr std::string_view kHbVector = R"(vector
0 1 2/3
0 3 1/3
1 2 1
1 3 1/3
2 4 1/3
2 5 1/3
2 7 1/3
3 4 1
3 6 1/3
4 5 2/3
5 6 1
6 7 2/3
)";

inline constexpr std::string_view kHbDual = R"(dual
y 0 0
y 1 1
y 2 2/3
y 3 2/3
y 4 1
y 5 1
y 6 4/3
y 7 1/3
u 1 2 2/3
u 3 4 2/3
u 5 6 4/3
d 3,4,5,6 1/3
)";

inline constexpr std::string_view kHbTree = R"(tree
0 3
1 2
2 5
3 4
3 6
5 6
6 7
)";

}  // namespace builtin

struct HbData {
  Instance base;
  Instance complete;
  EdgeVector x;
  DualSolution dual;
  SpanningTree tree;
};

inline HbData builtin_hb() {
  Instance base = parse_instance(builtin::kHbInstance);
  Instance complete = metric_completion(base);
  return {base, complete, parse_vector(builtin::kHbVector, base.n()), parse_dual(builtin::kHbDual, base.n(), base.s()),
          SpanningTree(base.n(), parse_edge_list(builtin::kHbTree, base.n()))};
}

// Unit-cost path 0 - 1 - ... - (k-1), s = 0, t = k-1.
inline Instance unit_path(int k) {
  if (k < 2) throw std::invalid_argument("unit path needs at least 2 vertices");
  std::map<Edge, Rational> costs;
  for (int i = 0; i + 1 < k; ++i) costs[Edge(i, i + 1)] = 1;
  return Instance(k, 0, k - 1, std::move(costs), k == 2);
}

// Unit-cost cycle on 2l vertices with s = 0 and t = l antipodal.
inline Instance gap_cycle(int l) {
  if (l < 2) throw std::invalid_argument("gap_cycle needs l >= 2");
  std::map<Edge, Rational> costs;
  for (int i = 0; i < 2 * l; ++i) costs[Edge(i, (i + 1) % (2 * l))] = 1;
  Instance inst(2 * l, 0, l, std::move(costs), false);
  EdgeVector ones;
  for (const Edge& e : inst.edges()) ones.set(e, 1);
  if (2 * l <= kPartitionEnumerationLimit) {
    if (auto bad = lp4_violation(inst, ones)) throw std::logic_error("all-ones is not L.P.4 feasible: " + *bad);
  }
  return inst;
}

// Complete graph with random costs p/q (p in 1..12, q in 1..3), replaced by
// its shortest-path metric. s = 0, t = n-1.
inline Instance random_metric_instance(int n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("random instances need n >= 3");
  std::mt19937_64 rng(seed);
  std::map<Edge, Rational> costs;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const long p = 1 + static_cast<long>(rng() % 12);
      const long q = 1 + static_cast<long>(rng() % 3);
      costs[Edge(u, v)] = Rational(p, q);
    }
  }
  Instance out = metric_completion(Instance(n, 0, n - 1, std::move(costs), false));
  if (!satisfies_triangle_inequality(out)) throw std::logic_error("random instance is not metric");
  return out;
}

inline std::vector<Edge> minimum_spanning_tree_inside(const Instance& inst, VertexMask part) {
  std::vector<std::pair<Rational, Edge>> order;
  for (const auto& [e, c] : inst.costs()) {
    if (e.inside(part)) order.emplace_back(c, e);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  DisjointSets ds(inst.n());
  std::vector<Edge> out;
  for (const auto& [c, e] : order) {
    if (ds.unite(e.u, e.v)) out.push_back(e);
  }
  if (static_cast<int>(out.size()) != popcount(part) - 1) throw std::invalid_argument("part is not connected");
  return out;
}

struct GoodTreeReport {
  explicit GoodTreeReport(NarrowCutChain c) : chain(std::move(c)) {}

  NarrowCutChain chain;
  std::vector<std::vector<Edge>> part_trees;
  std::vector<Edge> connectors;
  std::vector<Rational> connector_costs;
  Rational inside_cost;
  Rational total;
  Rational lp_value;
  std::vector<Edge> edges;

  bool exceeds_lp() const { return total > lp_value; }
};

// Minimum spanning tree inside each part of the tau = 1 partition, joined by
// a cheapest edge between consecutive parts.
inline GoodTreeReport build_good_spanning_tree(const Instance& inst, const EdgeVector& x) {
  GoodTreeReport r(narrow_cuts(inst, x, Rational(1)));
  r.lp_value = cost_of(inst, x);
  for (VertexMask part : r.chain.parts) {
    r.part_trees.push_back(minimum_spanning_tree_inside(inst, part));
    r.inside_cost += cost_of(inst, r.part_trees.back());
    r.edges.insert(r.edges.end(), r.part_trees.back().begin(), r.part_trees.back().end());
  }
  for (std::size_t i = 0; i + 1 < r.chain.parts.size(); ++i) {
    std::optional<Edge> best;
    for (const auto& [e, c] : inst.costs()) {
      const bool between = (contains(r.chain.parts[i], e.u) && contains(r.chain.parts[i + 1], e.v)) ||
                           (contains(r.chain.parts[i], e.v) && contains(r.chain.parts[i + 1], e.u));
      if (between && (!best || c < inst.cost(*best))) best = e;
    }
    if (!best) throw std::invalid_argument("no edge between consecutive parts");
    r.connectors.push_back(*best);
    r.connector_costs.push_back(inst.cost(*best));
    r.edges.push_back(*best);
  }
  r.total = cost_of(inst, r.edges);
  SpanningTree check(inst.n(), r.edges);
  return r;
}

struct ClaimCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

// Printed values of the counterexample, compared exactly.
struct HbClaims {
  Rational lp_value{29, 3};
  Rational good_tree{10};
  Rational tree_cost{10};
  VertexMask wrong_degree = bit(1) | bit(3) | bit(4) | bit(6);
  Rational join_cost{5};
  std::vector<Edge> join{Edge(3, 6), Edge(1, 4)};
};

struct CounterexampleReport {
  std::vector<ClaimCheck> claims;
  Rational lp_value;
  Rational good_tree;
  Rational tree_cost;
  VertexMask wrong_degree = 0;
  Rational join_cost;

  bool pass() const {
    for (const auto& c : claims) {
      if (!c.pass) return false;
    }
    return true;
  }
};

inline CounterexampleReport verify_counterexample(const Instance& base, const EdgeVector& x, const DualSolution& dual,
                                                  const SpanningTree& tree, const HbClaims& claims = {}) {
  CounterexampleReport r;
  const Instance g = metric_completion(base);
  const Rational cx = cost_of(g, x);
  r.lp_value = cx;
  auto add = [&](std::string name, bool pass, std::string detail) {
    r.claims.push_back({std::move(name), pass, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, e.what());
    }
  };

  guarded("a-optimal", [&] {
    const DualCheck dc = verify_dual_certificate(g, x, dual);
    const LpSolution one = solve_lp1(g);
    const LpSolution four = solve_lp4(base);
    const bool ok = dc.pass && cx == claims.lp_value && dc.dual_value == cx && one.value == cx && four.value == cx &&
                    cost_of(base, x) == cx;
    std::string detail = "c(x)=" + cx.to_string() + " dual=" + dc.dual_value.to_string() + " lp1=" +
                         one.value.to_string() + " lp4=" + four.value.to_string();
    for (const auto& f : dc.failures) detail += "; " + f;
    add("a-optimal", ok, detail);
  });
  guarded("b-extreme-point", [&] {
    const RankReport one = lp1_tight_rank(g, x);
    const RankReport four = lp4_tight_rank(base, x);
    add("b-extreme-point", one.unique() && four.unique(),
        "L.P.1 rank " + std::to_string(one.rank) + "/" + std::to_string(one.variables) + ", L.P.4 rank " +
            std::to_string(four.rank) + "/" + std::to_string(four.variables));
  });
  guarded("c-good-tree", [&] {
    const GoodTreeReport good = build_good_spanning_tree(g, x);
    r.good_tree = good.total;
    add("c-good-tree", good.total == claims.good_tree && good.total > cx,
        "good tree " + good.total.to_string() + " vs L.P. " + cx.to_string());
  });
  guarded("d-tree", [&] {
    const CheckResult tight = is_in_some_decomposition(x, tree);
    r.tree_cost = cost_of(g, tree.edges());
    r.wrong_degree = wrong_degree_set(tree, g.s(), g.t());
    const TJoin join = min_tjoin(g, r.wrong_degree);
    r.join_cost = join.cost;
    const bool printed_join_ok = odd_degree_vertices(g.n(), claims.join) == r.wrong_degree &&
                                 cost_of(g, claims.join) == join.cost;
    const Rational repaired = r.tree_cost + join.cost;
    add("d-tree", tight.pass && r.tree_cost == claims.tree_cost && r.wrong_degree == claims.wrong_degree &&
                      join.cost == claims.join_cost && printed_join_ok && repaired > Rational(3, 2) * cx,
        "tight=" + std::string(tight.pass ? "yes" : "no (" + tight.detail + ")") + " c(J)=" + r.tree_cost.to_string() +
            " T=" + mask_to_string(r.wrong_degree) + " c(F)=" + join.cost.to_string() +
            " c(J)+c(F)=" + repaired.to_string() + " vs 3/2 c(x)=" + (Rational(3, 2) * cx).to_string());
  });
  guarded("e-join-half", [&] {
    add("e-join-half", r.join_cost > cx / Rational(2),
        "c(F)=" + r.join_cost.to_string() + " vs c(x)/2=" + (cx / Rational(2)).to_string());
  });
  return r;
}

inline CounterexampleReport verify_counterexample_hb() {
  const HbData hb = builtin_hb();
  return verify_counterexample(hb.base, hb.x, hb.dual, hb.tree);
}

// ---------------------------------------------------------------- corpus

struct CorpusEntry {
  std::string name;
  Instance base;
  std::optional<Rational> expected_lp;
};

inline constexpr int kRandomMinN = 3;
inline constexpr int kRandomMaxN = 8;

inline CorpusEntry random_entry(std::uint64_t seed) {
  const int n = kRandomMinN + static_cast<int>(seed % (kRandomMaxN - kRandomMinN + 1));
  return {"random-" + std::to_string(seed), random_metric_instance(n, seed), std::nullopt};
}

// The acceptance corpus: H_b, gap cycles l = 2..5, unit paths on 2..6
// vertices, and 100 random metrics with 3..8 vertices.
inline std::vector<CorpusEntry> default_corpus() {
  std::vector<CorpusEntry> out;
  out.push_back({"hb", parse_instance(builtin::kHbInstance), Rational(29, 3)});
  for (int l = 2; l <= 5; ++l) out.push_back({"cycle-" + std::to_string(l), gap_cycle(l), Rational(2 * l)});
  for (int k = 2; k <= 6; ++k) out.push_back({"path-" + std::to_string(k), unit_path(k), Rational(k - 1)});
  for (std::uint64_t seed = 1; seed <= 100; ++seed) out.push_back(random_entry(seed));
  return out;
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Manifest lines: "<name> <path> [lp p/q]" with paths relative to the
// manifest, or "random <count> <first-seed>". '#' starts a comment.
inline std::vector<CorpusEntry> load_corpus(const std::filesystem::path& manifest) {
  std::vector<CorpusEntry> out;
  const std::string text = read_text_file(manifest);
  for (const auto& [lineno, tok] : detail::content_lines(text)) {
    auto bad = [&, lineno = lineno](const std::string& msg) {
      return ParseError(ParseErrorKind::kMalformedLine, manifest.string() + " line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok[0] == "random") {
      if (tok.size() != 3) throw bad("expected 'random <count> <first-seed>'");
      const long count = std::stol(tok[1]);
      const long first = std::stol(tok[2]);
      for (long i = 0; i < count; ++i) out.push_back(random_entry(static_cast<std::uint64_t>(first + i)));
      continue;
    }
    if (tok.size() != 2 && tok.size() != 4) throw bad("expected '<name> <path> [lp p/q]'");
    CorpusEntry e{tok[0], parse_instance(read_text_file(manifest.parent_path() / tok[1])), std::nullopt};
    if (tok.size() == 4) {
      if (tok[2] != "lp") throw bad("expected 'lp' before the golden value");
      e.expected_lp = Rational::parse(tok[3]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct CheckOutcome {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct InstanceResult {
  std::string name;
  int n = 0;
  Rational lp1_value;
  std::optional<Rational> lp4_value;
  std::size_t trees = 0;
  std::optional<Rational> bom_ratio;        // best-of-many cost / c(x)
  std::optional<Rational> hoogeveen_ratio;  // against the brute-force optimum
  std::optional<Rational> integral_ratio;   // Opt_int(LP1) / Opt_int(LP4)
  std::vector<CheckOutcome> checks;

  int failures() const {
    int f = 0;
    for (const auto& c : checks) f += !c.pass;
    return f;
  }
};

struct SuiteOptions {
  std::vector<Rational> betas{Rational(2, 5), Rational(4, 9), Rational(9, 20)};
};

inline constexpr int kHoogeveenCheckLimit = 10;

namespace detail {

class Recorder {
 public:
  explicit Recorder(InstanceResult& r) : r_(r) {}

  void record(const std::string& name, bool pass, const std::string& detail = "") {
    r_.checks.push_back({name, pass, detail});
  }

  // Runs a stage; a thrown structural error fails the named property, any
  // other exception fails the stage itself.
  template <class F>
  void guard(const std::string& stage, F&& body) {
    try {
      body();
    } catch (const StructuralError& e) {
      record("struct." + e.check(), false, e.what());
    } catch (const std::exception& e) {
      record(stage, false, e.what());
    }
  }

 private:
  InstanceResult& r_;
};

}  // namespace detail

inline InstanceResult run_instance(const CorpusEntry& entry, const SuiteOptions& opt = {}) {
  InstanceResult r;
  r.name = entry.name;
  r.n = entry.base.n();
  detail::Recorder rec(r);
  const Instance& base = entry.base;
  const Instance g = base.is_complete_metric() ? base : metric_completion(base);
  const int n = g.n();

  LpSolution one;
  rec.guard("lp1.solve", [&] {
    one = solve_lp1(g);
    r.lp1_value = one.value;
    if (entry.expected_lp) {
      rec.record("lp1.expected", one.value == *entry.expected_lp,
                 "got " + one.value.to_string() + ", golden " + entry.expected_lp->to_string());
    }
    const auto sep = lp1_violation(g, one.x);
    rec.record("lp1.separation", !sep, sep.value_or(""));
    const DualCheck dc = verify_dual_certificate(g, one.x, one.dual);
    rec.record("lp1.dual", dc.pass && dc.dual_value == one.value, dc.failures.empty() ? "" : dc.failures.front());
    const CheckResult poly = check_spanning_tree_polytope(n, one.x);
    rec.record("lp2.membership", poly.pass, poly.detail);
  });
  if (one.status != LpStatus::kOptimal) return r;
  const EdgeVector& x = one.x;

  if (n <= kPartitionEnumerationLimit) {
    rec.guard("lp4.equals_lp1", [&] {
      const LpSolution four = solve_lp4(base);
      r.lp4_value = four.value;
      rec.record("lp4.equals_lp1", four.value == one.value,
                 "L.P.4 " + four.value.to_string() + " vs L.P.1 " + one.value.to_string());
    });
  }

  ConvexDecomposition dec;
  rec.guard("decomp.build", [&] {
    dec = decompose(n, x);
    r.trees = dec.terms.size();
    rec.record("decomp.resum", dec.decomposes(x));
    for (const auto& term : dec.terms) {
      const CheckResult c = is_in_some_decomposition(x, term.tree);
      rec.record("decomp.tightness", c.pass, c.detail);
    }
  });
  if (dec.terms.empty()) return r;

  // Narrow cuts at tau = 1 and at every parameter setting.
  std::vector<Rational> taus{Rational(1)};
  for (const auto& beta : opt.betas) taus.push_back(make_params(beta).tau());
  for (const auto& tau : taus) {
    rec.guard("chain", [&] {
      const NarrowCutChain chain = narrow_cuts(g, x, tau);
      rec.record("struct.chain", true);
      const InequalityCheck a = check_ineq_sum_eq_le_cx(g, x, chain);
      rec.record("ineq.sum_min_edges", a.pass, a.lhs.to_string() + " <= " + a.rhs.to_string() + " " + a.detail);
      const InequalityCheck b = check_ineq_expected_path(g, dec, chain);
      rec.record("ineq.expected_path", b.pass, b.lhs.to_string() + " <= " + b.rhs.to_string());
      for (const auto& p : check_probability_bounds(g, dec, chain)) {
        rec.record("prob.single_edge", p.single_edge >= Rational(2) - p.value,
                   mask_to_string(p.cut) + ": " + p.single_edge.to_string() + " vs " + (Rational(2) - p.value).to_string());
        rec.record("prob.t_odd", p.t_odd <= p.value - Rational(1),
                   mask_to_string(p.cut) + ": " + p.t_odd.to_string() + " vs " + (p.value - Rational(1)).to_string());
      }
    });
  }

  for (const auto& term : dec.terms) {
    rec.guard("struct.parity", [&] {
      const CheckResult c = check_parity_lemma(term.tree, g.s(), g.t());
      rec.record("struct.parity", c.pass, c.detail);
    });
  }

  rec.guard("bom", [&] {
    const BestOfMany bom = best_of_many(g, dec);
    for (std::size_t i = 0; i < bom.runs.size(); ++i) rec.record("struct.rest-tjoin", true);
    const Rational best = bom.best_path().cost;
    r.bom_ratio = one.value.is_zero() ? Rational(1) : best / one.value;
    rec.record("bom.eight_fifths", best <= Rational(8, 5) * one.value,
               best.to_string() + " vs 8/5 * " + one.value.to_string());
  });

  for (const auto& beta : opt.betas) {
    rec.guard("analysis", [&] {
      const AnalysisReport a = certificate_report(g, x, dec, make_params(beta));
      for (const auto& t : a.trees) rec.record("unified.feasible", t.feasibility.pass, t.feasibility.detail);
      std::string detail;
      for (const auto& f : a.failures) detail += (detail.empty() ? "" : "; ") + f;
      rec.record("analysis.exact", a.pass(), "beta=" + beta.to_string() + " " + detail);
      if (beta == Rational(4, 9)) {
        const bool certified = a.combined_bound && a.cx + a.expected_join <= a.cx + *a.combined_bound &&
                               a.best_cost <= Rational(8, 5) * a.cx;
        rec.record("bound.eight_fifths", certified && a.pass(),
                   "E(c(J)+c(F))=" + (a.cx + a.expected_join).to_string() + " c(x)+3/5c(x)=" +
                       (Rational(8, 5) * a.cx).to_string());
      }
    });
  }

  if (n <= kHoogeveenCheckLimit) {
    rec.guard("hoogeveen.five_thirds", [&] {
      const HamPath h = hoogeveen(g);
      const HamPath opt_path = brute_force_hamiltonian_path(g);
      r.hoogeveen_ratio = opt_path.cost.is_zero() ? Rational(1) : h.cost / opt_path.cost;
      rec.record("hoogeveen.five_thirds", h.cost <= Rational(5, 3) * opt_path.cost,
                 h.cost.to_string() + " vs 5/3 * " + opt_path.cost.to_string());
      rec.record("lp1.lower_bound", one.value <= opt_path.cost);
    });
  }

  // Integral L.P.4 solutions: an optimal path routed through the base
  // graph, and the doubled minimum spanning tree of the base graph.
  std::vector<std::pair<std::string, EdgeVector>> integral;
  rec.guard("transform.inputs", [&] {
    const HamPath p = n <= kBruteForcePathLimit ? brute_force_hamiltonian_path(g) : hoogeveen(g);
    EdgeVector path;
    for (std::size_t i = 1; i < p.order.size(); ++i) path.add(Edge(p.order[i - 1], p.order[i]), 1);
    integral.emplace_back("path", lp1_to_lp4(base, path));
    integral.emplace_back("double-mst", minimum_spanning_tree(base).indicator().scaled(Rational(2)));
  });
  for (const auto& [label, z] : integral) {
    rec.guard("transform." + label, [&, &label = label, &z = z] {
      const Lp4ToLp1 t = lp4_to_lp1(base, z);
      rec.record("struct.splitting", true);
      rec.record("transform.half_integral", is_half_integral(t.x), label);
      rec.record("transform.cost", t.output_cost <= t.input_cost,
                 label + ": " + t.output_cost.to_string() + " <= " + t.input_cost.to_string());
      const auto rounded = round_half_integral(g, t.x, decompose(n, t.x));
      rec.record("round_half.three_halves", rounded.path().cost <= rounded.bound,
                 label + ": " + rounded.path().cost.to_string() + " <= " + rounded.bound.to_string());
    });
  }
  rec.guard("transform.roundtrip", [&] {
    const EdgeVector up = lp1_to_lp4(base, x);
    rec.record("transform.lp1_to_lp4", cost_of(base, up) == one.value);
    const Lp4ToLp1 back = lp4_to_lp1(base, up);
    rec.record("struct.splitting", true);
    rec.record("transform.roundtrip", back.output_cost <= one.value && !lp1_violation(g, back.x),
               back.output_cost.to_string() + " <= " + one.value.to_string());
  });

  if (n <= kIntegralLp4Limit) {
    rec.guard("ratio", [&] {
      const RatioReport rr = check_ratio_theorem(base, true);
      r.integral_ratio = rr.ratio;
      std::string detail = rr.opt_lp1.to_string() + " / " + rr.opt_lp4.to_string();
      for (const auto& f : rr.failures) detail += "; " + f;
      rec.record("ratio.sandwich", rr.opt_lp4 <= rr.opt_lp1 && rr.opt_lp1 <= Rational(3, 2) * rr.opt_lp4, detail);
      rec.record("ratio.constructive", rr.constructive_path.cost <= Rational(3, 2) * rr.opt_lp4, detail);
      if (rr.multiplicity_three_agrees) rec.record("ratio.multiplicity", *rr.multiplicity_three_agrees);
      rec.record("struct.splitting", true);
    });
  }
  return r;
}

struct CheckTally {
  int passed = 0;
  int failed = 0;
  std::vector<std::string> witnesses;  // "<instance>: <detail>" per failure
};

struct SuiteSummary {
  std::vector<InstanceResult> instances;
  std::map<std::string, CheckTally> checks;
  std::optional<Rational> worst_bom_ratio;
  std::optional<Rational> worst_hoogeveen_ratio;
  std::optional<Rational> worst_integral_ratio;

  int failures() const {
    int f = 0;
    for (const auto& [name, t] : checks) f += t.failed;
    return f;
  }
  bool pass() const { return failures() == 0; }
  const CheckTally& tally(const std::string& name) const {
    static const CheckTally empty;
    const auto it = checks.find(name);
    return it == checks.end() ? empty : it->second;
  }
};

inline void fold_max(std::optional<Rational>& acc, const std::optional<Rational>& v) {
  if (v && (!acc || *v > *acc)) acc = v;
}

inline SuiteSummary run_suite(const std::vector<CorpusEntry>& corpus, const SuiteOptions& opt = {}) {
  SuiteSummary s;
  for (const auto& entry : corpus) {
    InstanceResult r = run_instance(entry, opt);
    for (const auto& c : r.checks) {
      CheckTally& t = s.checks[c.name];
      if (c.pass) {
        ++t.passed;
      } else {
        ++t.failed;
        t.witnesses.push_back(r.name + ": " + c.detail);
      }
    }
    fold_max(s.worst_bom_ratio, r.bom_ratio);
    fold_max(s.worst_hoogeveen_ratio, r.hoogeveen_ratio);
    fold_max(s.worst_integral_ratio, r.integral_ratio);
    s.instances.push_back(std::move(r));
  }
  return s;
}

}  // namespace stpath
