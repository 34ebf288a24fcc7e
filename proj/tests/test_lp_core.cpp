#include <gtest/gtest.h>

#include <random>

#include "stpath/bench.hpp"

using namespace stpath;

namespace {

struct Hyperplane {
  std::vector<Rational> a;
  lp::Sense sense;
  Rational b;
};

bool holds(const Hyperplane& h, const std::vector<Rational>& x) {
  Rational lhs;
  for (std::size_t j = 0; j < x.size(); ++j) lhs += h.a[j] * x[j];
  switch (h.sense) {
    case lp::Sense::kLessEqual: return lhs <= h.b;
    case lp::Sense::kGreaterEqual: return lhs >= h.b;
    case lp::Sense::kEqual: return lhs == h.b;
  }
  return false;
}

// Unique solution of the square system, if any.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs) {
  const std::size_t k = rhs.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    while (p < k && m[p][c].is_zero()) ++p;
    if (p == k) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || m[r][c].is_zero()) continue;
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < k; ++j) m[r][j] -= f * m[c][j];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<Rational> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

// Minimum over all basic feasible points of a bounded region; nullopt when
// the region is empty.
std::optional<Rational> vertex_enumeration(const std::vector<Rational>& c, const std::vector<Hyperplane>& rows) {
  const std::size_t k = c.size();
  std::vector<Hyperplane> all = rows;
  for (std::size_t j = 0; j < k; ++j) {
    Hyperplane h{std::vector<Rational>(k), lp::Sense::kGreaterEqual, Rational(0)};
    h.a[j] = 1;
    all.push_back(h);
  }
  std::optional<Rational> best;
  const std::size_t m = all.size();
  for (unsigned long pick = 0; pick < (1UL << m); ++pick) {
    if (static_cast<std::size_t>(std::popcount(pick)) != k) continue;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (std::size_t i = 0; i < m; ++i) {
      if (pick >> i & 1) {
        a.push_back(all[i].a);
        b.push_back(all[i].b);
      }
    }
    const auto x = solve_square(a, b);
    if (!x) continue;
    bool ok = true;
    for (const auto& h : all) ok = ok && holds(h, *x);
    if (!ok) continue;
    Rational val;
    for (std::size_t j = 0; j < k; ++j) val += c[j] * (*x)[j];
    if (!best || val < *best) best = val;
  }
  return best;
}

}  // namespace

TEST(Simplex, RandomSmallProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(2024);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 2);
    const int m = 2 + static_cast<int>(rng() % 3);
    lp::LinearProgram model(k);
    std::vector<Rational> c(k);
    for (int j = 0; j < k; ++j) {
      c[j] = Rational(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 3));
      model.set_objective(j, c[j]);
    }
    std::vector<Hyperplane> rows;
    for (int i = 0; i < m + 1; ++i) {
      Hyperplane h{std::vector<Rational>(k), lp::Sense::kLessEqual, Rational(0)};
      if (i == m) {
        for (int j = 0; j < k; ++j) h.a[j] = 1;
        h.b = 8;
      } else {
        for (int j = 0; j < k; ++j) h.a[j] = Rational(static_cast<long>(rng() % 7) - 3);
        h.sense = static_cast<lp::Sense>(rng() % 3);
        h.b = Rational(static_cast<long>(rng() % 11) - 3, 1 + static_cast<long>(rng() % 2));
      }
      lp::Constraint row;
      for (int j = 0; j < k; ++j) {
        if (!h.a[j].is_zero()) row.coeffs.emplace_back(j, h.a[j]);
      }
      row.sense = h.sense;
      row.rhs = h.b;
      model.add_row(row);
      rows.push_back(h);
    }
    const auto expected = vertex_enumeration(c, rows);
    const lp::Result res = lp::solve(model);
    if (!expected) {
      EXPECT_EQ(res.status, LpStatus::kInfeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ++optimal;
    ASSERT_EQ(res.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_EQ(res.value, *expected) << "trial " << trial;
    Rational val;
    for (int j = 0; j < k; ++j) {
      EXPECT_GE(res.x[j], Rational(0));
      val += c[j] * res.x[j];
    }
    EXPECT_EQ(val, res.value);
    for (const auto& h : rows) EXPECT_TRUE(holds(h, res.x)) << "trial " << trial;
    ASSERT_EQ(res.duals.size(), rows.size());
    Rational dual_value;
    std::vector<Rational> reduced = c;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational& y = res.duals[i];
      if (rows[i].sense == lp::Sense::kGreaterEqual) {
        EXPECT_GE(y, Rational(0));
      }
      if (rows[i].sense == lp::Sense::kLessEqual) {
        EXPECT_LE(y, Rational(0));
      }
      dual_value += y * rows[i].b;
      for (int j = 0; j < k; ++j) reduced[j] -= y * rows[i].a[j];
    }
    EXPECT_EQ(dual_value, res.value) << "trial " << trial;
    for (int j = 0; j < k; ++j) EXPECT_GE(reduced[j], Rational(0)) << "trial " << trial;
  }
  EXPECT_GT(optimal, 300);
  EXPECT_GT(infeasible, 10);
}

TEST(Simplex, DetectsUnbounded) {
  lp::LinearProgram model(2);
  model.set_objective(0, -1);
  model.add_row({{{0, 1}, {1, -1}}, lp::Sense::kGreaterEqual, 1});
  EXPECT_EQ(lp::solve(model).status, LpStatus::kUnbounded);
}

TEST(Lp1, HbOptimum) {
  const HbData hb = builtin_hb();
  const LpSolution sol = solve_lp1(hb.complete);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_EQ(sol.value, Rational(29, 3));
  EXPECT_EQ(sol.x, hb.x);
  EXPECT_FALSE(separate_lp1(hb.complete, sol.x));
  EXPECT_TRUE(check_spanning_tree_polytope(8, sol.x).pass);
  const DualCheck dc = verify_dual_certificate(hb.complete, sol.x, sol.dual);
  EXPECT_TRUE(dc.pass);
  EXPECT_EQ(dc.dual_value, Rational(29, 3));
}

TEST(Lp1, UnitPathsAndCycle) {
  for (int k = 2; k <= 7; ++k) EXPECT_EQ(solve_lp1(metric_completion(unit_path(k))).value, Rational(k - 1)) << k;
  EXPECT_EQ(solve_lp1(metric_completion(gap_cycle(2))).value, Rational(4));
}

TEST(Lp1, StrongDualityOnRandomMetrics) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const Instance g = random_metric_instance(3 + static_cast<int>(seed % 6), seed);
    const LpSolution sol = solve_lp1(g);
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_FALSE(lp1_violation(g, sol.x));
    EXPECT_TRUE(check_spanning_tree_polytope(g.n(), sol.x).pass);
    const DualCheck dc = verify_dual_certificate(g, sol.x, sol.dual);
    EXPECT_TRUE(dc.pass) << seed;
    EXPECT_EQ(dc.dual_value, sol.value);
  }
}

TEST(Lp4, HbAndSingleEdge) {
  const HbData hb = builtin_hb();
  EXPECT_EQ(solve_lp4(hb.base).value, Rational(29, 3));
  EXPECT_FALSE(lp4_violation(hb.base, hb.x));
  EXPECT_EQ(solve_lp4(Instance(2, 0, 1, {{Edge(0, 1), Rational(1)}})).value, Rational(1));
}

TEST(Lp4, EqualsLp1) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance g = random_metric_instance(3 + static_cast<int>(seed % 5), seed);
    EXPECT_EQ(solve_lp4(g).value, solve_lp1(g).value) << seed;
  }
  for (int l = 2; l <= 4; ++l) {
    const Instance c = gap_cycle(l);
    EXPECT_EQ(solve_lp4(c).value, solve_lp1(metric_completion(c)).value) << l;
  }
}

TEST(Lp4, TooLarge) {
  try {
    solve_lp4(unit_path(13));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("too large"), std::string::npos) << e.what();
  }
}

TEST(Separation, ZeroAndHb) {
  const HbData hb = builtin_hb();
  const auto zero = separate_lp1(hb.complete, EdgeVector{});
  ASSERT_TRUE(zero);
  EXPECT_EQ(zero->value, Rational(0));
  EXPECT_NE(contains(zero->cut, 0), contains(zero->cut, 7));
  EXPECT_FALSE(separate_lp1(hb.complete, hb.x));

  EdgeVector cut67 = hb.x;
  cut67.set(Edge(6, 7), 0);
  const auto v = separate_lp1(hb.complete, cut67);
  ASSERT_TRUE(v);
  EXPECT_EQ(cut_value(cut67, v->cut), v->value);
  EXPECT_LT(v->value, v->bound);
  EXPECT_EQ(cut_value(cut67, full_mask(7)), Rational(1, 3));
}

TEST(TJoinPolyhedron, Examples) {
  const HbData hb = builtin_hb();
  const VertexMask tb = bit(1) | bit(3) | bit(4) | bit(6);
  // x/2 cannot be feasible here: it would bound the min T_b-join by 29/6 < 5.
  const CheckResult half = check_tjoin_polyhedron(8, tb, hb.x.scaled(Rational(1, 2)));
  EXPECT_FALSE(half.pass);
  ASSERT_TRUE(half.witness);
  EXPECT_EQ(popcount(*half.witness & tb) % 2, 1);
  EXPECT_LT(cut_value(hb.x, *half.witness), Rational(2));
  EXPECT_EQ(tjoin_lp_value(hb.complete, tb), Rational(5));
  EXPECT_TRUE(check_tjoin_polyhedron(8, tb, indicator({Edge(3, 6), Edge(1, 4)})).pass);
  const CheckResult zero = check_tjoin_polyhedron(8, tb, EdgeVector{});
  EXPECT_FALSE(zero.pass);
  ASSERT_TRUE(zero.witness);
  EXPECT_EQ(popcount(*zero.witness & tb) % 2, 1);
  EXPECT_THROW(check_tjoin_polyhedron(8, bit(1) | bit(3) | bit(4), EdgeVector{}), std::invalid_argument);
}

TEST(TJoinPolyhedron, LpValueMatchesBruteForce) {
  // The T-join polyhedron is integral: its LP optimum equals the cheapest
  // edge subset with odd-degree set T.
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    const Instance g = random_metric_instance(n, seed);
    const auto edges = g.edges();
    for (VertexMask t = 0; t < bit(n); ++t) {
      if (popcount(t) % 2) continue;
      std::optional<Rational> best;
      for (unsigned long pick = 0; pick < (1UL << edges.size()); ++pick) {
        std::vector<Edge> sub;
        for (std::size_t j = 0; j < edges.size(); ++j) {
          if (pick >> j & 1) sub.push_back(edges[j]);
        }
        if (odd_degree_vertices(n, sub) != t) continue;
        const Rational c = cost_of(g, sub);
        if (!best || c < *best) best = c;
      }
      EXPECT_EQ(tjoin_lp_value(g, t), *best) << seed << " " << mask_to_string(t);
    }
  }
}

TEST(SpanningTreePolytope, Examples) {
  const SpanningTree path(4, {Edge(0, 1), Edge(1, 2), Edge(2, 3)});
  EXPECT_TRUE(check_spanning_tree_polytope(4, path.indicator()).pass);
  const EdgeVector cycle = indicator({Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(0, 3)});
  const CheckResult r = check_spanning_tree_polytope(4, cycle);
  EXPECT_FALSE(r.pass);
  EdgeVector dense = indicator({Edge(0, 1), Edge(1, 2), Edge(0, 2)});
  dense.set(Edge(2, 3), 0);
  EXPECT_FALSE(check_spanning_tree_polytope(4, dense).pass);
}

TEST(DualCertificate, PaperDualAndPerturbations) {
  const HbData hb = builtin_hb();
  const DualCheck ok = verify_dual_certificate(hb.complete, hb.x, hb.dual);
  EXPECT_TRUE(ok.pass);
  EXPECT_EQ(ok.primal_value, Rational(29, 3));
  EXPECT_EQ(ok.dual_value, Rational(29, 3));

  EXPECT_FALSE(verify_dual_certificate(hb.complete, hb.x, DualSolution{}).pass);

  DualSolution bent = hb.dual;
  bent.y[6] = 1;
  const DualCheck bad = verify_dual_certificate(hb.complete, hb.x, bent);
  EXPECT_FALSE(bad.pass);
  bool names_56 = false;
  for (const auto& f : bad.failures) names_56 = names_56 || f.find("(5,6)") != std::string::npos;
  EXPECT_TRUE(names_56);
}

TEST(ExtremePoint, HbUniqueAndMidpointNot) {
  const HbData hb = builtin_hb();
  EXPECT_TRUE(lp1_tight_rank(hb.complete, hb.x).unique());
  EXPECT_TRUE(lp4_tight_rank(hb.base, hb.x).unique());
  const Instance g = metric_completion(gap_cycle(2));
  const EdgeVector mid = (indicator({Edge(0, 1), Edge(1, 3), Edge(2, 3)}) + indicator({Edge(0, 3), Edge(1, 3), Edge(1, 2)}))
                             .scaled(Rational(1, 2));
  ASSERT_FALSE(lp1_violation(g, mid));
  EXPECT_FALSE(lp1_tight_rank(g, mid).unique());
}
