#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/enumerate.hpp"
#include "stpath/lp_core.hpp"
#include "stpath/simplex.hpp"
#include "stpath/spanning_tree.hpp"

namespace stpath {

struct DecompositionTerm {
  Rational lambda;
  SpanningTree tree;
};

// Convex combination of spanning-tree indicators; terms are sorted by tree.
struct ConvexDecomposition {
  std::vector<DecompositionTerm> terms;

  Rational weight() const {
    Rational sum;
    for (const auto& t : terms) sum += t.lambda;
    return sum;
  }

  EdgeVector resum() const {
    EdgeVector out;
    for (const auto& t : terms) {
      for (const Edge& e : t.tree.edges()) out.add(e, t.lambda);
    }
    return out;
  }

  bool decomposes(const EdgeVector& x) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].lambda.sign() <= 0) return false;
      if (i > 0 && !(terms[i - 1].tree < terms[i].tree)) return false;
    }
    return weight() == Rational(1) && resum() == x;
  }
};

// Writes x as a convex combination of spanning trees of its support by
// finding a basic feasible point of {lambda >= 0 : sum lambda = 1,
// sum lambda X^J = x} over all enumerated trees; a basic point uses at
// most |support|+1 trees.
inline ConvexDecomposition decompose(int n, const EdgeVector& x, long tree_limit = kDefaultTreeLimit) {
  if (const CheckResult in = check_spanning_tree_polytope(n, x); !in.pass) {
    throw std::invalid_argument("point outside the spanning tree polytope: " + in.detail);
  }
  const auto support = x.support();
  const auto trees = enumerate_spanning_trees(n, support, tree_limit);
  const int k = static_cast<int>(trees.size());
  lp::LinearProgram model(k);
  for (const Edge& e : support) {
    lp::Constraint row;
    for (int i = 0; i < k; ++i) {
      if (trees[i].contains(e)) row.coeffs.emplace_back(i, 1);
    }
    row.sense = lp::Sense::kEqual;
    row.rhs = x.get(e);
    model.add_row(std::move(row));
  }
  lp::Constraint total;
  for (int i = 0; i < k; ++i) total.coeffs.emplace_back(i, 1);
  total.sense = lp::Sense::kEqual;
  total.rhs = 1;
  model.add_row(std::move(total));

  const lp::Result res = lp::solve(model);
  if (res.status != LpStatus::kOptimal) {
    throw std::logic_error("no convex decomposition found for a polytope point");
  }
  ConvexDecomposition dec;
  for (int i = 0; i < k; ++i) {
    if (res.x[i].sign() > 0) dec.terms.push_back({res.x[i], trees[i]});
  }
  if (!dec.decomposes(x)) throw std::logic_error("decomposition does not re-sum to x");
  return dec;
}

// A decomposition of x giving the largest possible weight to `tree`;
// throws when no decomposition uses it.
inline ConvexDecomposition decompose_containing(int n, const EdgeVector& x, const SpanningTree& tree,
                                                long tree_limit = kDefaultTreeLimit) {
  if (const CheckResult in = check_spanning_tree_polytope(n, x); !in.pass) {
    throw std::invalid_argument("point outside the spanning tree polytope: " + in.detail);
  }
  const auto support = x.support();
  const auto trees = enumerate_spanning_trees(n, support, tree_limit);
  const auto it = std::find(trees.begin(), trees.end(), tree);
  if (it == trees.end()) throw std::invalid_argument("tree is not a spanning tree of the support");
  const int k = static_cast<int>(trees.size());
  const int target = static_cast<int>(it - trees.begin());
  lp::LinearProgram model(k);
  model.set_objective(target, -1);
  for (const Edge& e : support) {
    lp::Constraint row;
    for (int i = 0; i < k; ++i) {
      if (trees[i].contains(e)) row.coeffs.emplace_back(i, 1);
    }
    row.sense = lp::Sense::kEqual;
    row.rhs = x.get(e);
    model.add_row(std::move(row));
  }
  lp::Constraint total;
  for (int i = 0; i < k; ++i) total.coeffs.emplace_back(i, 1);
  total.sense = lp::Sense::kEqual;
  total.rhs = 1;
  model.add_row(std::move(total));

  const lp::Result res = lp::solve(model);
  if (res.status != LpStatus::kOptimal) throw std::logic_error("no convex decomposition found for a polytope point");
  if (res.x[target].sign() <= 0) throw std::invalid_argument("tree is in no convex decomposition of x");
  ConvexDecomposition dec;
  for (int i = 0; i < k; ++i) {
    if (res.x[i].sign() > 0) dec.terms.push_back({res.x[i], trees[i]});
  }
  if (!dec.decomposes(x)) throw std::logic_error("decomposition does not re-sum to x");
  return dec;
}

// A tree J lies in some convex decomposition of x iff its indicator is
// tight wherever x is tight in the spanning tree polytope: J avoids the
// zero edges of x and has |S|-1 edges inside every S with x(E(S)) = |S|-1.
inline CheckResult is_in_some_decomposition(const EdgeVector& x, const SpanningTree& tree) {
  const int n = tree.n();
  require_enumerable(n, "is_in_some_decomposition");
  CheckResult out;
  for (const Edge& e : tree.edges()) {
    if (x.get(e).sign() == 0) {
      out.pass = false;
      out.detail = "tree edge " + e.to_string() + " has x = 0";
      return out;
    }
  }
  const ScaledWeights w(n, x);
  const VertexMask all = full_mask(n);
  for (VertexMask m = 1; m < all; ++m) {
    const int size = popcount(m);
    if (size < 2) continue;
    if (w.inside(m) != w.scale(size - 1)) continue;
    if (tree.inside(m) != size - 1) {
      out.pass = false;
      out.witness = m;
      out.detail = "x is tight on " + mask_to_string(m) + " but the tree has " +
                   std::to_string(tree.inside(m)) + " edges inside";
      return out;
    }
  }
  return out;
}

// Probability of an event under sampling tree J_i with probability lambda_i.
inline Rational distribution_query(const ConvexDecomposition& dec,
                                   const std::function<bool(const SpanningTree&)>& event) {
  Rational p;
  for (const auto& t : dec.terms) {
    if (event(t.tree)) p += t.lambda;
  }
  return p;
}

// Expectation of a tree functional under the same distribution.
inline Rational expectation(const ConvexDecomposition& dec,
                            const std::function<Rational(const SpanningTree&)>& value) {
  Rational e;
  for (const auto& t : dec.terms) e += t.lambda * value(t.tree);
  return e;
}

// Exact inverse-CDF draw: one 64-bit word u from the seeded engine, and the
// first tree whose cumulative weight exceeds u / 2^64.
inline const SpanningTree& sample_tree(const ConvexDecomposition& dec, std::uint64_t seed) {
  if (dec.terms.empty()) throw std::invalid_argument("empty decomposition");
  std::mt19937_64 rng(seed);
  const std::uint64_t word = rng();
  mpz_class num;
  mpz_import(num.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
  mpz_class den = 1;
  den <<= 64;
  const Rational u(mpq_class(num, den));
  Rational cumulative;
  for (const auto& t : dec.terms) {
    cumulative += t.lambda;
    if (u < cumulative) return t.tree;
  }
  return dec.terms.back().tree;
}

}  // namespace stpath
