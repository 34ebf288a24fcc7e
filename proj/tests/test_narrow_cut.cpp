#include <gtest/gtest.h>

#include <random>

#include "stpath/bench.hpp"

using namespace stpath;

namespace {

// s-side cuts of value < 1 + tau, found by scanning every subset.
std::vector<VertexMask> narrow_by_scan(const Instance& inst, const EdgeVector& x, const Rational& tau) {
  std::vector<VertexMask> out;
  for (VertexMask m = 1; m < full_mask(inst.n()); ++m) {
    if (contains(m, inst.s()) && !contains(m, inst.t()) && cut_value(x, m) < Rational(1) + tau) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), [](VertexMask a, VertexMask b) { return popcount(a) < popcount(b); });
  return out;
}

EdgeVector path_indicator(int n) {
  EdgeVector x;
  for (int v = 0; v + 1 < n; ++v) x.set(Edge(v, v + 1), 1);
  return x;
}

}  // namespace

TEST(NarrowCuts, HbChainAtTauOne) {
  const HbData hb = builtin_hb();
  const NarrowCutChain c = narrow_cuts(hb.complete, hb.x, Rational(1));
  const std::vector<VertexMask> want{mask_of({0}), mask_of({0, 1}), mask_of({0, 1, 2}), mask_of({0, 1, 2, 3, 4}),
                                     mask_of({0, 1, 2, 3, 4, 5}), mask_of({0, 1, 2, 3, 4, 5, 6})};
  EXPECT_EQ(c.cuts, want);
  const std::vector<Rational> values{Rational(1), Rational(5, 3), Rational(5, 3), Rational(5, 3), Rational(5, 3), Rational(1)};
  EXPECT_EQ(c.values, values);
  for (const auto& cost : c.min_costs) EXPECT_EQ(cost, Rational(1));
  EXPECT_EQ(c.sum_min_costs(), Rational(6));
  ASSERT_EQ(c.parts.size(), 7U);
  EXPECT_EQ(c.parts[3], mask_of({3, 4}));
  EXPECT_EQ(c.parts.back(), mask_of({7}));
}

TEST(NarrowCuts, HbChainAtTauHalf) {
  const HbData hb = builtin_hb();
  const NarrowCutChain c = narrow_cuts(hb.complete, hb.x, Rational(1, 2));
  EXPECT_EQ(c.cuts, (std::vector<VertexMask>{mask_of({0}), mask_of({0, 1, 2, 3, 4, 5, 6})}));
}

TEST(NarrowCuts, PathPrefixes) {
  for (int n = 2; n <= 7; ++n) {
    const Instance g = metric_completion(unit_path(n));
    const NarrowCutChain c = narrow_cuts(g, path_indicator(n), Rational(1));
    ASSERT_EQ(c.size(), static_cast<std::size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) {
      EXPECT_EQ(c.cuts[i], full_mask(i + 1));
      EXPECT_EQ(c.values[i], Rational(1));
      EXPECT_EQ(c.min_edges[i], Edge(i, i + 1));
    }
  }
}

TEST(NarrowCuts, AgreesWithScanOnCorpus) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance g = random_metric_instance(3 + static_cast<int>(seed % 6), seed);
    const EdgeVector x = solve_lp1(g).x;
    for (const Rational& tau : {Rational(1), Rational(3, 4), Rational(1, 2)}) {
      const NarrowCutChain c = narrow_cuts(g, x, tau);
      EXPECT_EQ(c.cuts, narrow_by_scan(g, x, tau)) << "seed " << seed;
      VertexMask seen = 0;
      for (const VertexMask p : c.parts) {
        EXPECT_NE(p, 0U);
        EXPECT_EQ(seen & p, 0U);
        seen |= p;
      }
      EXPECT_EQ(seen, full_mask(g.n()));
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (const auto& [e, cost] : g.costs()) {
          if (e.crosses(c.cuts[i])) EXPECT_LE(c.min_costs[i], cost);
        }
      }
    }
  }
}

TEST(Params, Settings) {
  const UnifiedParams a = make_params(Rational(4, 9));
  EXPECT_EQ(a.alpha(), Rational(1, 9));
  EXPECT_EQ(a.tau(), Rational(3, 4));
  const UnifiedParams b = make_params(Rational(2, 5));
  EXPECT_EQ(b.alpha(), Rational(1, 5));
  EXPECT_EQ(b.tau(), Rational(1, 2));
  const UnifiedParams c = make_params(Rational(9, 20));
  EXPECT_EQ(c.alpha(), Rational(1, 10));
  EXPECT_EQ(c.tau(), Rational(7, 9));
  for (const Rational& beta : {Rational(2, 5), Rational(4, 9), Rational(9, 20), Rational(49, 100)}) {
    const UnifiedParams p = make_params(beta);
    EXPECT_EQ(p.alpha() + Rational(2) * p.beta(), Rational(1));
    EXPECT_EQ(p.tau(), Rational(3) - Rational(1) / beta);
  }
  EXPECT_THROW(make_params(Rational(1, 2)), std::invalid_argument);
  EXPECT_THROW(make_params(Rational(1, 3)), std::invalid_argument);
  EXPECT_THROW(UnifiedParams(Rational(1, 9), Rational(4, 9), Rational(1, 2)), std::invalid_argument);
  EXPECT_NO_THROW(UnifiedParams(Rational(0), Rational(1, 2), Rational(1)));
}

TEST(UnifiedJoin, CorrectionCoefficientOnValueOneCut) {
  const Instance g = metric_completion(unit_path(4));
  const EdgeVector x = path_indicator(4);
  const SpanningTree star(4, {Edge(0, 1), Edge(0, 2), Edge(0, 3)});
  const auto utj = build_unified_fractional_tjoin(g, x, star, make_params(Rational(4, 9)));
  EXPECT_EQ(utj.T, mask_of({1, 2}));
  ASSERT_EQ(utj.corrections.size(), 1U);
  EXPECT_EQ(narrow_cuts(g, x, Rational(3, 4)).cuts[utj.corrections[0].cut_index], mask_of({0, 1}));
  EXPECT_EQ(utj.corrections[0].coefficient, Rational(1, 3));
  EXPECT_EQ(utj.corrections[0].edge, Edge(1, 2));
  EXPECT_TRUE(check_unified_feasibility(g, utj).pass);
}

TEST(UnifiedJoin, NoOddCutsLeavesBaseVector) {
  const Instance g = metric_completion(unit_path(5));
  const EdgeVector x = path_indicator(5);
  const SpanningTree path(5, x.support());
  const UnifiedParams p = make_params(Rational(4, 9));
  const auto utj = build_unified_fractional_tjoin(g, x, path, p);
  EXPECT_EQ(utj.T, 0U);
  EXPECT_TRUE(utj.corrections.empty());
  EXPECT_EQ(utj.f, path.indicator().scaled(p.alpha()) + x.scaled(p.beta()));
}

TEST(UnifiedJoin, FeasibleForEveryHbTree) {
  const HbData hb = builtin_hb();
  const ConvexDecomposition d = decompose(8, hb.x);
  for (const Rational& beta : {Rational(2, 5), Rational(4, 9), Rational(9, 20)}) {
    for (const auto& term : d.terms) {
      const auto utj = build_unified_fractional_tjoin(hb.complete, hb.x, term.tree, make_params(beta));
      EXPECT_TRUE(check_unified_feasibility(hb.complete, utj).pass) << term.tree.to_string();
    }
  }
  const UnifiedParams edge(Rational(0), Rational(1, 2), Rational(1));
  for (const auto& term : d.terms) {
    EXPECT_TRUE(check_unified_feasibility(hb.complete, build_unified_fractional_tjoin(hb.complete, hb.x, term.tree, edge)).pass);
  }
}

TEST(UnifiedJoin, DeletedCorrectionFails) {
  const HbData hb = builtin_hb();
  const UnifiedParams p = make_params(Rational(4, 9));
  const ConvexDecomposition d = decompose(8, hb.x);
  int found = 0;
  for (const auto& term : d.terms) {
    const auto utj = build_unified_fractional_tjoin(hb.complete, hb.x, term.tree, p);
    const NarrowCutChain chain = narrow_cuts(hb.complete, hb.x, p.tau());
    for (const auto& corr : utj.corrections) {
      const VertexMask q = chain.cuts[corr.cut_index];
      EdgeVector f = utj.f;
      f.add(corr.edge, -corr.coefficient);
      if (cut_value(f, q) >= Rational(1)) continue;
      ++found;
      EXPECT_EQ(term.tree.crossing(q), 2);
      const CheckResult r = check_tjoin_polyhedron(8, utj.T, f);
      EXPECT_FALSE(r.pass);
      ASSERT_TRUE(r.witness.has_value());
      EXPECT_LT(cut_value(f, *r.witness), Rational(1));
    }
  }
  EXPECT_GT(found, 0);
}

TEST(Bijection, PathStarAndSingleEdge) {
  for (int k = 1; k <= 6; ++k) {
    std::vector<ContractedEdge> path, star;
    for (int i = 0; i < k; ++i) {
      path.push_back({i, i + 1, Edge(i, i + 1)});
      star.push_back({i, k, Edge(i, k)});
    }
    const auto p = bijection_cuts_to_edges(k, path);
    for (int i = 0; i < k; ++i) EXPECT_EQ(p[i], static_cast<std::size_t>(i));
    const auto s = bijection_cuts_to_edges(k, star);
    std::vector<std::size_t> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k; ++i) {
      EXPECT_EQ(sorted[i], static_cast<std::size_t>(i));
      EXPECT_LE(star[s[i]].a, i);
    }
  }
  EXPECT_THROW(bijection_cuts_to_edges(2, {{0, 1, Edge(0, 1)}, {0, 1, Edge(0, 2)}}), std::invalid_argument);
}

TEST(Bijection, RandomTreesCrossTheirCuts) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 8);
    std::vector<ContractedEdge> tree;
    for (int v = 1; v <= k; ++v) {
      const int u = static_cast<int>(rng() % v);
      tree.push_back({u, v, Edge(u, v)});
    }
    std::shuffle(tree.begin(), tree.end(), rng);
    const auto phi = bijection_cuts_to_edges(k, tree);
    std::set<std::size_t> image(phi.begin(), phi.end());
    EXPECT_EQ(image.size(), static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto& e = tree[phi[i]];
      EXPECT_NE(e.a <= i, e.b <= i);
    }
  }
}

TEST(Inequalities, Examples) {
  const HbData hb = builtin_hb();
  const InequalityCheck sum = check_ineq_sum_eq_le_cx(hb.complete, hb.x, narrow_cuts(hb.complete, hb.x, Rational(1)));
  EXPECT_TRUE(sum.pass);
  EXPECT_EQ(sum.lhs, Rational(6));
  EXPECT_EQ(sum.rhs, Rational(29, 3));

  const ConvexDecomposition d = decompose(8, hb.x);
  const InequalityCheck path = check_ineq_expected_path(hb.complete, d, narrow_cuts(hb.complete, hb.x, Rational(3, 4)));
  EXPECT_TRUE(path.pass) << path.lhs.to_string() << " " << path.rhs.to_string();

  const Instance g = metric_completion(unit_path(6));
  const EdgeVector x = path_indicator(6);
  const NarrowCutChain c = narrow_cuts(g, x, Rational(1));
  const InequalityCheck tight = check_ineq_sum_eq_le_cx(g, x, c);
  EXPECT_EQ(tight.lhs, Rational(5));
  EXPECT_EQ(tight.rhs, Rational(5));
  const ConvexDecomposition single{{{Rational(1), SpanningTree(6, x.support())}}};
  const InequalityCheck tight_path = check_ineq_expected_path(g, single, c);
  EXPECT_EQ(tight_path.lhs, Rational(5));
  EXPECT_EQ(tight_path.rhs, Rational(5));

  NarrowCutChain empty;
  empty.parts.push_back(full_mask(6));
  EXPECT_EQ(check_ineq_sum_eq_le_cx(g, x, empty).lhs, Rational(0));
  EXPECT_TRUE(check_ineq_expected_path(g, single, empty).pass);
}

TEST(Probabilities, HbBounds) {
  const HbData hb = builtin_hb();
  const ConvexDecomposition d = decompose(8, hb.x);
  for (const Rational& tau : {Rational(1), Rational(3, 4)}) {
    for (const auto& row : check_probability_bounds(hb.complete, d, narrow_cuts(hb.complete, hb.x, tau))) {
      EXPECT_TRUE(row.pass) << mask_to_string(row.cut);
      EXPECT_GE(row.single_edge, Rational(2) - row.value);
      EXPECT_LE(row.t_odd, row.value - Rational(1));
    }
  }
}

TEST(Parity, RandomTrees) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 8);
    std::vector<Edge> edges;
    for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng() % v), v);
    const SpanningTree t(n, edges);
    const int s = static_cast<int>(rng() % n);
    const int tt = (s + 1 + static_cast<int>(rng() % (n - 1))) % n;
    EXPECT_TRUE(check_parity_lemma(t, s, tt).pass);
  }
}

TEST(Analysis, SquareRootsAndFactors) {
  EXPECT_EQ(exact_sqrt(Rational(4, 9)), Rational(2, 3));
  EXPECT_FALSE(exact_sqrt(Rational(2)).has_value());
  EXPECT_FALSE(exact_sqrt(Rational(-1)).has_value());
  EXPECT_EQ(sebo_coefficient_exact(Rational(4, 9)), Rational(1, 9));
  EXPECT_FALSE(sebo_coefficient_exact(Rational(2, 5)).has_value());
  EXPECT_NEAR(sebo_coefficient(4.0 / 9.0), 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(aks_factor(1.0 / std::sqrt(5.0)), (1.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_NEAR(sebo_factor(4.0 / 9.0), 1.6, 1e-12);
  const Rational h(1, 9), beta(4, 9);
  EXPECT_EQ(Rational(1) - beta / (h + Rational(1)), Rational(3, 5));
}

TEST(Analysis, MaximizersOnGrid) {
  for (const double tau : {0.25, 0.5, 0.75, 7.0 / 9.0, 0.99}) {
    const double za = aks_maximizer(tau), zs = sebo_maximizer(tau);
    double best_a = 0, best_s = 0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) {
      const double z = tau * i / steps;
      best_a = std::max(best_a, aks_objective(tau, z));
      best_s = std::max(best_s, sebo_objective(tau, z));
    }
    EXPECT_NEAR(aks_objective(tau, za), best_a, 1e-9);
    EXPECT_NEAR(sebo_objective(tau, zs), best_s, 1e-9);
    EXPECT_GE(aks_objective(tau, za) + 1e-15, best_a);
    EXPECT_GE(sebo_objective(tau, zs) + 1e-15, best_s);
  }
}

TEST(Analysis, HbReportAtFourNinths) {
  const HbData hb = builtin_hb();
  const AnalysisReport r = certificate_report(hb.complete, hb.x, decompose(8, hb.x), make_params(Rational(4, 9)));
  EXPECT_TRUE(r.pass()) << (r.failures.empty() ? "" : r.failures.front());
  EXPECT_EQ(r.expected_tree, Rational(29, 3));
  EXPECT_EQ(r.combined_bound, Rational(29, 5));
  EXPECT_TRUE(r.within_eight_fifths());
  EXPECT_LE(r.expected_join, r.expected_rest);
}

TEST(Analysis, SingleEdgeRatioOne) {
  const Instance g = metric_completion(unit_path(2));
  const EdgeVector x = solve_lp1(g).x;
  const AnalysisReport r = certificate_report(g, x, decompose(2, x), make_params(Rational(4, 9)));
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.ratio(), Rational(1));
}
