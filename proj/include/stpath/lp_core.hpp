#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/enumerate.hpp"
#include "stpath/graph.hpp"
#include "stpath/lp_types.hpp"
#include "stpath/max_flow.hpp"
#include "stpath/simplex.hpp"

namespace stpath {

// Largest vertex count for which the partition constraints are enumerated.
inline constexpr int kPartitionEnumerationLimit = 12;

struct CutViolation {
  GeneratedConstraint::Kind kind;
  VertexMask cut = 0;  // side containing s
  Rational value;
  Rational bound;
};

// Outcome of an exhaustive membership check; witness is a violating set.
struct CheckResult {
  bool pass = true;
  std::optional<VertexMask> witness;
  std::string detail;

  explicit operator bool() const { return pass; }
};

namespace detail {

inline VertexMask s_side(const Instance& inst, VertexMask m) {
  return contains(m, inst.s()) ? m : (inst.all() & ~m);
}

inline GeneratedConstraint as_constraint(const CutViolation& v) {
  return {v.kind, {v.cut}, v.bound};
}

}  // namespace detail

// Cut violations of the path Held-Karp relaxation found by exact max-flow:
// the minimum s-t cut, and for every other vertex v the minimum cut between
// the contracted pair {s,t} and v. Only genuine violators are returned,
// most violated first within each kind.
inline std::vector<CutViolation> separate_lp1_all(const Instance& inst, const EdgeVector& x) {
  std::vector<CutViolation> out;
  const int n = inst.n();
  const MinCut st = min_cut_between(n, x, bit(inst.s()), bit(inst.t()));
  if (st.value < Rational(1)) {
    out.push_back({GeneratedConstraint::Kind::kStCut, st.source_side, st.value, Rational(1)});
  }
  std::vector<CutViolation> even;
  for (int v = 0; v < n; ++v) {
    if (v == inst.s() || v == inst.t()) continue;
    const MinCut c = min_cut_between(n, x, inst.terminals(), bit(v));
    if (c.value < Rational(2)) {
      const VertexMask side = detail::s_side(inst, c.source_side);
      const bool dup = std::any_of(even.begin(), even.end(),
                                   [&](const CutViolation& e) { return e.cut == side; });
      if (!dup) even.push_back({GeneratedConstraint::Kind::kEvenCut, side, c.value, Rational(2)});
    }
  }
  std::stable_sort(even.begin(), even.end(),
                   [](const CutViolation& a, const CutViolation& b) { return a.value < b.value; });
  out.insert(out.end(), even.begin(), even.end());
  for (const auto& v : out) {
    if (cut_value(x, v.cut) != v.value || !(v.value < v.bound)) {
      throw std::logic_error("separation returned a non-violated cut");
    }
  }
  return out;
}

inline std::optional<CutViolation> separate_lp1(const Instance& inst, const EdgeVector& x) {
  auto all = separate_lp1_all(inst, x);
  if (all.empty()) return std::nullopt;
  return all.front();
}

// nullopt when x satisfies every constraint of the path Held-Karp
// relaxation on inst; otherwise a description of one violation.
inline std::optional<std::string> lp1_violation(const Instance& inst, const EdgeVector& x) {
  for (const auto& [e, val] : x) {
    if (!inst.has_edge(e)) return "support edge " + e.to_string() + " not in instance";
    if (val.sign() < 0) return "negative value on " + e.to_string();
    if (val > Rational(1)) return "value above 1 on " + e.to_string();
  }
  for (int v = 0; v < inst.n(); ++v) {
    const Rational want = (v == inst.s() || v == inst.t()) ? Rational(1) : Rational(2);
    const Rational got = degree(x, v);
    if (got != want) {
      return "degree of " + std::to_string(v) + " is " + got.to_string() + ", expected " + want.to_string();
    }
  }
  if (auto v = separate_lp1(inst, x)) {
    return "cut " + mask_to_string(v->cut) + " has value " + v->value.to_string() + " < " +
           v->bound.to_string();
  }
  return std::nullopt;
}

// Minimizes over the path Held-Karp relaxation by cutting planes: degree
// equalities and 0 <= x <= 1 up front, violated cuts added each round.
// Multipliers of the final basis are reported as the dual; cuts that were
// never generated carry d_S = 0.
inline LpSolution solve_lp1(const Instance& inst, int max_rounds = 1000) {
  if (!inst.is_complete_metric()) throw std::invalid_argument("solve_lp1 needs a complete metric instance");
  const auto edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  lp::LinearProgram model(m);
  for (int j = 0; j < m; ++j) model.set_objective(j, inst.cost(edges[j]));
  for (int v = 0; v < inst.n(); ++v) {
    lp::Constraint row;
    for (int j = 0; j < m; ++j) {
      if (edges[j].incident(v)) row.coeffs.emplace_back(j, 1);
    }
    row.sense = lp::Sense::kEqual;
    row.rhs = (v == inst.s() || v == inst.t()) ? 1 : 2;
    model.add_row(std::move(row));
  }
  for (int j = 0; j < m; ++j) model.add_row({{{j, 1}}, lp::Sense::kLessEqual, 1});
  const int fixed_rows = model.num_rows();

  LpSolution sol;
  for (int round = 1; round <= max_rounds; ++round) {
    const lp::Result res = lp::solve(model);
    sol.rounds = round;
    if (res.status != LpStatus::kOptimal) {
      sol.status = res.status;
      return sol;
    }
    EdgeVector x;
    for (int j = 0; j < m; ++j) x.set(edges[j], res.x[j]);
    const auto cuts = separate_lp1_all(inst, x);
    if (cuts.empty()) {
      sol.status = LpStatus::kOptimal;
      sol.x = std::move(x);
      sol.value = res.value;
      for (int v = 0; v < inst.n(); ++v) sol.dual.y[v] = res.duals[v];
      for (int j = 0; j < m; ++j) {
        const Rational u = -res.duals[inst.n() + j];
        if (!u.is_zero()) sol.dual.u[edges[j]] = u;
      }
      for (std::size_t k = 0; k < sol.active_constraints.size(); ++k) {
        const Rational& d = res.duals[fixed_rows + static_cast<int>(k)];
        if (!d.is_zero()) sol.dual.d[sol.active_constraints[k].sets.front()] += d;
      }
      return sol;
    }
    for (const auto& c : cuts) {
      lp::Constraint row;
      for (int j = 0; j < m; ++j) {
        if (edges[j].crosses(c.cut)) row.coeffs.emplace_back(j, 1);
      }
      row.sense = lp::Sense::kGreaterEqual;
      row.rhs = c.bound;
      model.add_row(std::move(row));
      sol.active_constraints.push_back(detail::as_constraint(c));
    }
  }
  throw std::runtime_error("solve_lp1: cutting-plane loop did not converge");
}

namespace detail {

struct Lp4Violation {
  GeneratedConstraint constraint;
  long deficit;  // scaled
};

// Violated partition and {s,t}-even cut constraints by full enumeration,
// most violated first, at most `limit` of them.
inline std::vector<Lp4Violation> lp4_violations(const Instance& inst, const EdgeVector& x,
                                                std::size_t limit) {
  const int n = inst.n();
  const ScaledWeights w(n, x);
  std::vector<Lp4Violation> out;
  for_each_partition(n, w, [&](const std::vector<int>& label, int classes, long crossing) {
    if (classes < 2) return;
    const long need = w.scale(classes - 1);
    if (crossing < need) {
      out.push_back({{GeneratedConstraint::Kind::kPartition, classes_from_labels(label, classes),
                      Rational(classes - 1)},
                     need - crossing});
    }
  });
  // Each {s,t}-even cut once, through the side holding both terminals.
  const VertexMask all = inst.all();
  for (VertexMask m = 1; m < all; ++m) {
    if (!contains(m, inst.s()) || !contains(m, inst.t())) continue;
    const long val = w.cut(m);
    if (val < w.scale(2)) {
      out.push_back({{GeneratedConstraint::Kind::kEvenCut, {m}, Rational(2)}, w.scale(2) - val});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Lp4Violation& a, const Lp4Violation& b) { return a.deficit > b.deficit; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

inline lp::Constraint lp4_row(const std::vector<Edge>& edges, const GeneratedConstraint& c, int n) {
  lp::Constraint row;
  row.sense = lp::Sense::kGreaterEqual;
  row.rhs = c.rhs;
  if (c.kind == GeneratedConstraint::Kind::kPartition) {
    const auto label = Partition(n, c.sets).labels();
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (label[edges[j].u] != label[edges[j].v]) row.coeffs.emplace_back(static_cast<int>(j), 1);
    }
  } else {
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (edges[j].crosses(c.sets.front())) row.coeffs.emplace_back(static_cast<int>(j), 1);
    }
  }
  return row;
}

}  // namespace detail

inline std::optional<std::string> lp4_violation(const Instance& inst, const EdgeVector& x) {
  require_enumerable(inst.n(), "lp4_violation");
  if (inst.n() > kPartitionEnumerationLimit) {
    throw std::invalid_argument("instance too large for L.P.4 enumeration; use equivalence route");
  }
  for (const auto& [e, val] : x) {
    if (!inst.has_edge(e)) return "support edge " + e.to_string() + " not in instance";
    if (val.sign() < 0) return "negative value on " + e.to_string();
  }
  const auto v = detail::lp4_violations(inst, x, 1);
  if (v.empty()) return std::nullopt;
  const auto& c = v.front().constraint;
  const Rational lhs = c.kind == GeneratedConstraint::Kind::kPartition
                           ? partition_value(x, Partition(inst.n(), c.sets))
                           : cut_value(x, c.sets.front());
  return c.to_string() + " violated (value " + lhs.to_string() + ")";
}

// The partition relaxation on the base graph, by cutting planes whose
// separation enumerates every partition and every {s,t}-even cut.
inline LpSolution solve_lp4(const Instance& inst, int max_rounds = 1000) {
  if (inst.n() > kPartitionEnumerationLimit) {
    throw std::invalid_argument("instance too large for L.P.4 enumeration; use equivalence route");
  }
  const auto edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  const int n = inst.n();
  lp::LinearProgram model(m);
  for (int j = 0; j < m; ++j) model.set_objective(j, inst.cost(edges[j]));

  LpSolution sol;
  auto add = [&](const GeneratedConstraint& c) {
    model.add_row(detail::lp4_row(edges, c, n));
    sol.active_constraints.push_back(c);
  };
  // Seed with singleton cuts.
  for (int v = 0; v < n; ++v) {
    if (v == inst.s() || v == inst.t()) {
      add({GeneratedConstraint::Kind::kPartition, {bit(v), inst.all() & ~bit(v)}, Rational(1)});
    } else {
      add({GeneratedConstraint::Kind::kEvenCut, {inst.all() & ~bit(v)}, Rational(2)});
    }
  }
  for (int round = 1; round <= max_rounds; ++round) {
    const lp::Result res = lp::solve(model);
    sol.rounds = round;
    if (res.status != LpStatus::kOptimal) {
      sol.status = res.status;
      return sol;
    }
    EdgeVector x;
    for (int j = 0; j < m; ++j) x.set(edges[j], res.x[j]);
    const auto viol = detail::lp4_violations(inst, x, 16);
    if (viol.empty()) {
      sol.status = LpStatus::kOptimal;
      sol.x = std::move(x);
      sol.value = res.value;
      return sol;
    }
    for (const auto& v : viol) add(v.constraint);
  }
  throw std::runtime_error("solve_lp4: cutting-plane loop did not converge");
}

// Exhaustive check that f lies in the T-join polyhedron: f >= 0 and
// f(delta(S)) >= 1 for every T-odd S. Each cut is visited once through the
// side avoiding vertex n-1; T-oddness is the same on both sides.
inline CheckResult check_tjoin_polyhedron(int n, VertexMask T, const EdgeVector& f) {
  require_enumerable(n, "check_tjoin_polyhedron");
  if (popcount(T) % 2 != 0) throw std::invalid_argument("T must have even cardinality");
  CheckResult out;
  for (const auto& [e, val] : f) {
    if (val.sign() < 0) {
      out.pass = false;
      out.detail = "negative entry on " + e.to_string();
      return out;
    }
  }
  if (T == 0) return out;
  const ScaledWeights w(n, f);
  const VertexMask limit = bit(n - 1);
  for (VertexMask m = 1; m < limit; ++m) {
    if (popcount(m & T) % 2 == 0) continue;
    if (w.cut(m) < w.scale(1)) {
      out.pass = false;
      out.witness = m;
      out.detail = "T-odd cut " + mask_to_string(m) + " has value " + w.unscale(w.cut(m)).to_string();
      return out;
    }
  }
  return out;
}

// Optimum of min c.f over the T-join polyhedron, all T-odd cuts as rows.
// The polyhedron is integral, so this equals the minimum T-join cost and
// serves as an independent certificate for small n.
inline Rational tjoin_lp_value(const Instance& inst, VertexMask T) {
  const int n = inst.n();
  if (n > 12) throw std::invalid_argument("tjoin_lp_value: instance has more than 12 vertices");
  if (popcount(T) % 2 != 0) throw std::invalid_argument("T must have even cardinality");
  if (T == 0) return Rational(0);
  const auto edges = inst.edges();
  lp::LinearProgram model(static_cast<int>(edges.size()));
  for (std::size_t j = 0; j < edges.size(); ++j) model.set_objective(static_cast<int>(j), inst.cost(edges[j]));
  for (VertexMask m = 1; m < bit(n - 1); ++m) {
    if (popcount(m & T) % 2 == 0) continue;
    lp::Constraint row;
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (edges[j].crosses(m)) row.coeffs.emplace_back(static_cast<int>(j), 1);
    }
    row.sense = lp::Sense::kGreaterEqual;
    row.rhs = 1;
    model.add_row(std::move(row));
  }
  const lp::Result res = lp::solve(model);
  if (res.status != LpStatus::kOptimal) throw std::logic_error("T-join LP not optimal");
  return res.value;
}

// Exhaustive membership in the spanning tree polytope:
// x(E) = n-1 and x(E(S)) <= |S|-1 for every proper S.
inline CheckResult check_spanning_tree_polytope(int n, const EdgeVector& x) {
  require_enumerable(n, "check_spanning_tree_polytope");
  CheckResult out;
  if (!x.nonnegative()) {
    out.pass = false;
    out.detail = "negative entry";
    return out;
  }
  if (x.total() != Rational(n - 1)) {
    out.pass = false;
    out.witness = full_mask(n);
    out.detail = "x(E) = " + x.total().to_string() + " != " + std::to_string(n - 1);
    return out;
  }
  const ScaledWeights w(n, x);
  const VertexMask all = full_mask(n);
  for (VertexMask m = 1; m < all; ++m) {
    if (popcount(m) < 2) continue;
    if (w.inside(m) > w.scale(popcount(m) - 1)) {
      out.pass = false;
      out.witness = m;
      out.detail = "x(E(" + mask_to_string(m) + ")) = " + w.unscale(w.inside(m)).to_string() +
                   " > " + std::to_string(popcount(m) - 1);
      return out;
    }
  }
  return out;
}

struct DualCheck {
  bool pass = false;
  Rational primal_value;
  Rational dual_value;
  std::vector<std::string> failures;
};

inline Rational lp1_cut_bound(const Instance& inst, VertexMask s) {
  return contains(s, inst.s()) != contains(s, inst.t()) ? Rational(1) : Rational(2);
}

// Left side of the dual constraint of edge e:
// y_u + y_v - u_e + sum of d_S over cuts S crossed by e.
inline Rational dual_edge_load(const DualSolution& dual, const Edge& e) {
  auto get = [](const auto& map, const auto& key) {
    auto it = map.find(key);
    return it == map.end() ? Rational(0) : it->second;
  };
  Rational lhs = get(dual.y, e.u) + get(dual.y, e.v) - get(dual.u, e);
  for (const auto& [s, d] : dual.d) {
    if (e.crosses(s)) lhs += d;
  }
  return lhs;
}

inline Rational dual_objective(const Instance& inst, const DualSolution& dual) {
  Rational val;
  for (const auto& [v, y] : dual.y) val += y * ((v == inst.s() || v == inst.t()) ? 1 : 2);
  for (const auto& [s, d] : dual.d) val += d * lp1_cut_bound(inst, s);
  for (const auto& [e, u] : dual.u) val -= u;
  return val;
}

// Checks dual feasibility on every edge of the complete instance,
// complementary slackness against x, and equality of both objectives.
inline DualCheck verify_dual_certificate(const Instance& inst, const EdgeVector& x,
                                         const DualSolution& dual) {
  if (!inst.is_complete_metric()) {
    throw std::invalid_argument("verify_dual_certificate needs a complete metric instance");
  }
  DualCheck out;
  out.primal_value = cost_of(inst, x);
  out.dual_value = dual_objective(inst, dual);
  if (auto bad = lp1_violation(inst, x)) out.failures.push_back("primal infeasible: " + *bad);
  for (const auto& [e, u] : dual.u) {
    if (u.sign() < 0) out.failures.push_back("u" + e.to_string() + " < 0");
    if (u.sign() > 0 && x.get(e) != Rational(1)) {
      out.failures.push_back("u" + e.to_string() + " > 0 but x" + e.to_string() + " = " + x.get(e).to_string());
    }
  }
  for (const auto& [s, d] : dual.d) {
    if (s == 0 || s == inst.all()) {
      out.failures.push_back("d on an improper cut");
      continue;
    }
    if (d.sign() < 0) out.failures.push_back("d" + mask_to_string(s) + " < 0");
    if (d.sign() > 0 && cut_value(x, s) != lp1_cut_bound(inst, s)) {
      out.failures.push_back("d" + mask_to_string(s) + " > 0 but the cut is not tight");
    }
  }
  for (const auto& [e, c] : inst.costs()) {
    const Rational lhs = dual_edge_load(dual, e);
    if (lhs > c) {
      out.failures.push_back("dual constraint of " + e.to_string() + " violated: " + lhs.to_string() +
                             " > " + c.to_string());
    } else if (x.get(e).sign() > 0 && lhs != c) {
      out.failures.push_back("dual constraint of " + e.to_string() + " not tight: " + lhs.to_string() +
                             " < " + c.to_string());
    }
  }
  if (out.primal_value != out.dual_value) {
    out.failures.push_back("objective mismatch: primal " + out.primal_value.to_string() + ", dual " +
                           out.dual_value.to_string());
  }
  out.pass = out.failures.empty();
  return out;
}

// Incremental exact row space over the rationals.
class RowSpace {
 public:
  explicit RowSpace(int cols) : cols_(cols) {}

  int rank() const { return static_cast<int>(rows_.size()); }
  bool full() const { return rank() == cols_; }

  // Returns true if the row increased the rank.
  bool add(std::vector<Rational> row) {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const int p = pivots_[k];
      if (row[p].sign() == 0) continue;
      const Rational f = row[p];
      for (int j = 0; j < cols_; ++j) {
        if (rows_[k][j].sign() != 0) row[j] -= f * rows_[k][j];
      }
    }
    int p = -1;
    for (int j = 0; j < cols_; ++j) {
      if (row[j].sign() != 0) {
        p = j;
        break;
      }
    }
    if (p < 0) return false;
    const Rational inv = Rational(1) / row[p];
    for (auto& v : row) v *= inv;
    for (auto& other : rows_) {
      if (other[p].sign() == 0) continue;
      const Rational f = other[p];
      for (int j = 0; j < cols_; ++j) other[j] -= f * row[j];
    }
    rows_.push_back(std::move(row));
    pivots_.push_back(p);
    return true;
  }

 private:
  int cols_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> pivots_;
};

struct RankReport {
  int variables = 0;
  int rank = 0;
  int tight_rows = 0;
  bool unique() const { return rank == variables; }
};

// Rank of the constraints of the path Held-Karp relaxation that are tight
// at x (over all edges of inst). Full rank means x is the unique solution
// of its tight system, i.e. an extreme point.
inline RankReport lp1_tight_rank(const Instance& inst, const EdgeVector& x) {
  require_enumerable(inst.n(), "lp1_tight_rank");
  const auto edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  RankReport rep;
  rep.variables = m;
  RowSpace space(m);
  auto push = [&](std::vector<Rational> row) {
    ++rep.tight_rows;
    space.add(std::move(row));
  };
  for (int v = 0; v < inst.n(); ++v) {
    std::vector<Rational> row(m);
    for (int j = 0; j < m; ++j) row[j] = edges[j].incident(v) ? 1 : 0;
    push(std::move(row));
  }
  for (int j = 0; j < m; ++j) {
    const Rational val = x.get(edges[j]);
    if (val.is_zero() || val == Rational(1)) {
      std::vector<Rational> row(m);
      row[j] = 1;
      push(std::move(row));
    }
  }
  const ScaledWeights w(inst.n(), x);
  for (VertexMask s = 1; s < inst.all(); ++s) {
    if (!contains(s, inst.s()) || space.full()) continue;
    const long bound = contains(s, inst.t()) ? 2 : 1;
    if (w.cut(s) != w.scale(bound)) continue;
    std::vector<Rational> row(m);
    for (int j = 0; j < m; ++j) row[j] = edges[j].crosses(s) ? 1 : 0;
    push(std::move(row));
  }
  rep.rank = space.rank();
  return rep;
}

// Same for the partition relaxation on the base graph inst.
inline RankReport lp4_tight_rank(const Instance& inst, const EdgeVector& x) {
  if (inst.n() > kPartitionEnumerationLimit) {
    throw std::invalid_argument("instance too large for L.P.4 enumeration; use equivalence route");
  }
  const auto edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  const int n = inst.n();
  RankReport rep;
  rep.variables = m;
  RowSpace space(m);
  for (int j = 0; j < m; ++j) {
    if (x.get(edges[j]).is_zero()) {
      std::vector<Rational> row(m);
      row[j] = 1;
      ++rep.tight_rows;
      space.add(std::move(row));
    }
  }
  const ScaledWeights w(n, x);
  for_each_partition(n, w, [&](const std::vector<int>& label, int classes, long crossing) {
    if (classes < 2 || space.full() || crossing != w.scale(classes - 1)) return;
    std::vector<Rational> row(m);
    for (int j = 0; j < m; ++j) row[j] = label[edges[j].u] != label[edges[j].v] ? 1 : 0;
    ++rep.tight_rows;
    space.add(std::move(row));
  });
  for (VertexMask s = 1; s < inst.all(); ++s) {
    if (!contains(s, inst.s()) || !contains(s, inst.t()) || space.full()) continue;
    if (w.cut(s) != w.scale(2)) continue;
    std::vector<Rational> row(m);
    for (int j = 0; j < m; ++j) row[j] = edges[j].crosses(s) ? 1 : 0;
    ++rep.tight_rows;
    space.add(std::move(row));
  }
  rep.rank = space.rank();
  return rep;
}

}  // namespace stpath
