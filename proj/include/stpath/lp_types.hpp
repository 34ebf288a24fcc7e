#pragma once

#include <map>
#include <string>
#include <vector>

#include "stpath/graph.hpp"

namespace stpath {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
  }
  return "?";
}

// A constraint generated during cutting-plane solves.
struct GeneratedConstraint {
  enum class Kind { kStCut, kEvenCut, kPartition };
  Kind kind;
  std::vector<VertexMask> sets;  // one cut, or the classes of a partition
  Rational rhs;

  std::string to_string() const {
    std::string out;
    switch (kind) {
      case Kind::kStCut: out = "st-cut "; break;
      case Kind::kEvenCut: out = "even-cut "; break;
      case Kind::kPartition: out = "partition "; break;
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (i) out += " ";
      out += mask_to_string(sets[i]);
    }
    return out + " >= " + rhs.to_string();
  }
};

// Dual of the path Held-Karp relaxation: free degree multipliers y, cut
// multipliers d >= 0 keyed by the cut side that contains s, and upper-bound
// multipliers u >= 0.
struct DualSolution {
  std::map<int, Rational> y;
  std::map<VertexMask, Rational> d;
  std::map<Edge, Rational> u;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  EdgeVector x;
  Rational value;
  std::vector<GeneratedConstraint> active_constraints;
  int rounds = 0;
  // Filled by solvers that extract multipliers from the final basis.
  DualSolution dual;
};

}  // namespace stpath
