#include <gtest/gtest.h>

#include <random>

#include "stpath/bench.hpp"

using namespace stpath;

namespace {

// Spanning trees by checking every (n-1)-subset for acyclicity.
long count_trees_by_subsets(int n, const std::vector<Edge>& edges) {
  long count = 0;
  const std::size_t m = edges.size();
  for (unsigned long pick = 0; pick < (1UL << m); ++pick) {
    if (std::popcount(pick) != n - 1) continue;
    DisjointSets ds(n);
    bool acyclic = true;
    for (std::size_t j = 0; j < m && acyclic; ++j) {
      if (pick >> j & 1) acyclic = ds.unite(edges[j].u, edges[j].v);
    }
    count += acyclic;
  }
  return count;
}

SpanningTree random_tree(int n, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng() % v), v);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (Edge& e : edges) e = Edge(perm[e.u], perm[e.v]);
  return SpanningTree(n, edges);
}

ConvexDecomposition two_paths_on_c4() {
  const SpanningTree a(4, {Edge(0, 1), Edge(1, 2), Edge(2, 3)});
  const SpanningTree b(4, {Edge(0, 3), Edge(0, 2), Edge(1, 3)});
  return ConvexDecomposition{{{Rational(1, 2), a}, {Rational(1, 2), b}}};
}

}  // namespace

TEST(Enumeration, SmallGraphs) {
  EXPECT_EQ(enumerate_spanning_trees(3, {Edge(0, 1), Edge(1, 2), Edge(0, 2)}).size(), 3U);
  const std::vector<Edge> tree{Edge(0, 1), Edge(1, 2), Edge(1, 3)};
  const auto one = enumerate_spanning_trees(4, tree);
  ASSERT_EQ(one.size(), 1U);
  EXPECT_EQ(one.front().edges(), tree);
  EXPECT_THROW(enumerate_spanning_trees(4, {Edge(0, 1), Edge(2, 3)}), std::invalid_argument);
}

TEST(Enumeration, CountsMatchKirchhoffAndSubsets) {
  const HbData hb = builtin_hb();
  const auto support = hb.x.support();
  const mpz_class kirchhoff = matrix_tree_count(8, support);
  EXPECT_EQ(mpz_class(static_cast<long>(enumerate_spanning_trees(8, support).size())), kirchhoff);
  EXPECT_EQ(kirchhoff, mpz_class(count_trees_by_subsets(8, support)));
  for (int n = 2; n <= 6; ++n) {
    EXPECT_EQ(matrix_tree_count(n, metric_completion(unit_path(n)).edges()), mpz_class(static_cast<long>(std::pow(n, n - 2))));
  }
}

TEST(Enumeration, LimitNamesTheCount) {
  const auto edges = random_metric_instance(8, 1).edges();
  try {
    enumerate_spanning_trees(8, edges, 1000);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("262144"), std::string::npos) << e.what();
  }
}

TEST(Decompose, SingleTree) {
  const SpanningTree t(5, {Edge(0, 1), Edge(1, 2), Edge(1, 3), Edge(3, 4)});
  const ConvexDecomposition d = decompose(5, t.indicator());
  ASSERT_EQ(d.terms.size(), 1U);
  EXPECT_EQ(d.terms.front().lambda, Rational(1));
  EXPECT_EQ(d.terms.front().tree, t);
}

TEST(Decompose, HbResums) {
  const HbData hb = builtin_hb();
  const ConvexDecomposition d = decompose(8, hb.x);
  EXPECT_EQ(d.weight(), Rational(1));
  EXPECT_EQ(d.resum(), hb.x);
  for (const auto& term : d.terms) {
    EXPECT_GT(term.lambda, Rational(0));
    EXPECT_TRUE(is_in_some_decomposition(hb.x, term.tree).pass);
  }
  EXPECT_LE(d.terms.size(), hb.x.size() + 1);
}

TEST(Decompose, MidpointOfDisjointTrees) {
  const ConvexDecomposition src = two_paths_on_c4();
  const ConvexDecomposition d = decompose(4, src.resum());
  EXPECT_EQ(d.resum(), src.resum());
  ASSERT_EQ(d.terms.size(), 2U);
  EXPECT_EQ(d.terms[0].lambda, Rational(1, 2));
}

TEST(Decompose, RejectsPointsOutsidePolytope) {
  const EdgeVector cycle = indicator({Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(0, 3)});
  EXPECT_THROW(decompose(4, cycle), std::invalid_argument);
}

TEST(Decompose, RandomPolytopePoints) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % 3);
    EdgeVector x;
    std::vector<long> w(k);
    long total = 0;
    for (auto& v : w) total += (v = 1 + static_cast<long>(rng() % 5));
    for (int i = 0; i < k; ++i) x += random_tree(n, rng).indicator().scaled(Rational(w[i], total));
    ASSERT_TRUE(check_spanning_tree_polytope(n, x).pass);
    const ConvexDecomposition d = decompose(n, x);
    EXPECT_TRUE(d.decomposes(x));
    for (const auto& term : d.terms) EXPECT_TRUE(is_in_some_decomposition(x, term.tree).pass);
  }
}

TEST(Membership, JbAndSwappedEdge) {
  const HbData hb = builtin_hb();
  EXPECT_TRUE(is_in_some_decomposition(hb.x, hb.tree).pass);
  EXPECT_EQ(cost_of(hb.complete, hb.tree.edges()), Rational(10));
  const ConvexDecomposition d = decompose_containing(8, hb.x, hb.tree);
  EXPECT_TRUE(d.decomposes(hb.x));
  EXPECT_TRUE(std::any_of(d.terms.begin(), d.terms.end(), [&](const auto& t) { return t.tree == hb.tree; }));

  // Swapping (2,5) for (2,4) keeps every tight set spanned; only the parity changes.
  auto edges = hb.tree.edges();
  std::replace(edges.begin(), edges.end(), Edge(2, 5), Edge(2, 4));
  EXPECT_TRUE(is_in_some_decomposition(hb.x, SpanningTree(8, edges)).pass);

  // Dropping (1,2) leaves the tight pair {1,2} unspanned.
  edges = hb.tree.edges();
  std::replace(edges.begin(), edges.end(), Edge(1, 2), Edge(0, 1));
  const CheckResult r = is_in_some_decomposition(hb.x, SpanningTree(8, edges));
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(inside_value(hb.x, *r.witness), Rational(popcount(*r.witness) - 1));
}

TEST(Membership, AgreesWithLpOracleOnEverySupportTree) {
  // decompose_containing maximizes the tree's weight by an LP, an
  // independent route to the same question.
  const HbData hb = builtin_hb();
  int inside = 0;
  for (const auto& t : enumerate_spanning_trees(8, hb.x.support())) {
    const bool tight = is_in_some_decomposition(hb.x, t).pass;
    bool lp = true;
    try {
      decompose_containing(8, hb.x, t);
    } catch (const std::invalid_argument&) {
      lp = false;
    }
    EXPECT_EQ(tight, lp) << t.to_string();
    inside += tight;
  }
  EXPECT_GT(inside, 1);
}

TEST(Membership, ZeroEdgeAndIndicator) {
  const SpanningTree k(4, {Edge(0, 1), Edge(1, 2), Edge(2, 3)});
  const SpanningTree j(4, {Edge(0, 1), Edge(1, 2), Edge(1, 3)});
  EXPECT_TRUE(is_in_some_decomposition(k.indicator(), k).pass);
  EXPECT_FALSE(is_in_some_decomposition(k.indicator(), j).pass);
}

TEST(Distribution, QueriesAndExpectations) {
  const HbData hb = builtin_hb();
  const ConvexDecomposition d = decompose(8, hb.x);
  EXPECT_EQ(distribution_query(d, [](const SpanningTree&) { return true; }), Rational(1));
  EXPECT_EQ(expectation(d, [&](const SpanningTree& t) { return cost_of(hb.complete, t.edges()); }), Rational(29, 3));
  for (const auto& [e, val] : hb.x) {
    EXPECT_EQ(distribution_query(d, [&, e = e](const SpanningTree& t) { return t.contains(e); }), val);
  }
  const NarrowCutChain chain = narrow_cuts(hb.complete, hb.x, Rational(1));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const VertexMask q = chain.cuts[i];
    const Rational p = distribution_query(d, [&](const SpanningTree& t) { return t.crossing(q) == 1; });
    EXPECT_GE(p, Rational(2) - chain.values[i]);
  }
}

TEST(Sampling, DeterministicAndCalibrated) {
  const SpanningTree t(3, {Edge(0, 1), Edge(1, 2)});
  const ConvexDecomposition single{{{Rational(1), t}}};
  EXPECT_EQ(sample_tree(single, 1), t);
  EXPECT_EQ(sample_tree(single, 999), t);

  const ConvexDecomposition d = two_paths_on_c4();
  EXPECT_EQ(sample_tree(d, 77), sample_tree(d, 77));
  int first = 0;
  const int draws = 100000;
  for (int seed = 0; seed < draws; ++seed) first += sample_tree(d, static_cast<std::uint64_t>(seed)) == d.terms[0].tree;
  EXPECT_NEAR(static_cast<double>(first) / draws, 0.5, 0.02);
}
