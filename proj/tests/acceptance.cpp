#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "stpath/bench.hpp"

using namespace stpath;

namespace {

int failed_criteria = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " [" << detail << "]\n";
  if (!pass) ++failed_criteria;
}

// Passing count and failure count over the named checks, with failed stages
// counted against the criterion too.
struct Tally {
  int passed = 0;
  int failed = 0;
  std::vector<std::string> witnesses;

  void add(const SuiteSummary& s, const std::string& name) {
    const CheckTally& t = s.tally(name);
    passed += t.passed;
    failed += t.failed;
    witnesses.insert(witnesses.end(), t.witnesses.begin(), t.witnesses.end());
  }
  bool clean() const { return failed == 0 && passed > 0; }
  std::string text() const {
    std::string out = std::to_string(passed) + " passed, " + std::to_string(failed) + " failed";
    if (!witnesses.empty()) out += "; first: " + witnesses.front();
    return out;
  }
};

Tally tally(const SuiteSummary& s, const std::vector<std::string>& names) {
  Tally t;
  for (const auto& n : names) t.add(s, n);
  return t;
}

// Instances on which the named check ran at least once.
std::size_t coverage(const SuiteSummary& s, const std::string& name) {
  std::size_t count = 0;
  for (const auto& inst : s.instances) {
    for (const auto& c : inst.checks) {
      if (c.name == name) {
        ++count;
        break;
      }
    }
  }
  return count;
}

template <class F>
void criterion(int id, const std::string& what, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  const HbData hb = builtin_hb();
  const Rational value(29, 3);

  criterion(1, "LP optimum on H_b", [&] {
    const LpSolution one = solve_lp1(hb.complete);
    const LpSolution four = solve_lp4(hb.base);
    const DualCheck dc = verify_dual_certificate(hb.complete, hb.x, hb.dual);
    const bool ok = one.value == value && four.value == value && dc.pass && dc.dual_value == value &&
                    dc.primal_value == value;
    report(1, ok, "LP optimum on H_b",
           "L.P.1 " + one.value.to_string() + ", L.P.4 " + four.value.to_string() + ", dual " +
               dc.dual_value.to_string() + (dc.pass ? ", certificate verified" : ", certificate rejected"));
  });

  criterion(2, "extreme point", [&] {
    const RankReport one = lp1_tight_rank(hb.complete, hb.x);
    const RankReport four = lp4_tight_rank(hb.base, hb.x);
    report(2, one.unique() && four.unique(), "extreme point",
           "L.P.1 rank " + std::to_string(one.rank) + "/" + std::to_string(one.variables) + ", L.P.4 rank " +
               std::to_string(four.rank) + "/" + std::to_string(four.variables));
  });

  criterion(3, "counterexample claims", [&] {
    const CounterexampleReport r = verify_counterexample_hb();
    std::string detail;
    for (const auto& c : r.claims) detail += (detail.empty() ? "" : ", ") + c.name + (c.pass ? " ok" : " FAILED");
    const bool ok = r.pass() && r.claims.size() == 5 && r.good_tree == Rational(10) && r.tree_cost == Rational(10) &&
                    r.wrong_degree == mask_of({1, 3, 4, 6}) && r.join_cost == Rational(5) &&
                    r.tree_cost + r.join_cost > Rational(29, 2) && r.join_cost > Rational(29, 6);
    report(3, ok, "counterexample claims", detail);
  });

  const auto corpus = default_corpus();
  SuiteSummary s;
  try {
    s = run_suite(corpus);
  } catch (const std::exception& e) {
    std::cout << "corpus run aborted: " << e.what() << "\n";
  }
  const std::size_t total = corpus.size();
  auto full = [&](const std::string& name) { return coverage(s, name) == total; };
  auto covered = [&](const std::string& name) {
    return std::to_string(coverage(s, name)) + "/" + std::to_string(total) + " instances";
  };

  criterion(4, "unified feasibility", [&] {
    const Tally t = tally(s, {"unified.feasible", "analysis", "decomp.build"});
    report(4, t.clean() && full("unified.feasible"), "unified feasibility", t.text() + ", " + covered("unified.feasible"));
  });

  criterion(5, "probability bounds", [&] {
    const Tally t = tally(s, {"prob.single_edge", "prob.t_odd", "chain"});
    report(5, t.clean() && full("struct.chain"), "probability bounds", t.text());
  });

  criterion(6, "cost inequalities", [&] {
    const Tally t = tally(s, {"ineq.sum_min_edges", "ineq.expected_path", "chain"});
    const Rational hb_sum = narrow_cuts(hb.complete, hb.x, Rational(1)).sum_min_costs();
    report(6, t.clean() && full("ineq.sum_min_edges") && hb_sum == Rational(6), "cost inequalities",
           t.text() + ", H_b sum at tau=1 is " + hb_sum.to_string());
  });

  criterion(7, "approximation certificates", [&] {
    const Tally t = tally(s, {"bound.eight_fifths", "bom.eight_fifths", "hoogeveen.five_thirds", "bom",
                              "analysis"});
    std::size_t small = 0;
    for (const auto& e : corpus) small += e.base.n() <= 10;
    const bool ok = t.clean() && full("bound.eight_fifths") && full("bom.eight_fifths") &&
                    coverage(s, "hoogeveen.five_thirds") == small;
    report(7, ok, "approximation certificates",
           t.text() + ", worst best-of-many " + (s.worst_bom_ratio ? s.worst_bom_ratio->to_string() : "-") +
               ", worst Hoogeveen/opt " + (s.worst_hoogeveen_ratio ? s.worst_hoogeveen_ratio->to_string() : "-"));
  });

  criterion(8, "transformations", [&] {
    const Tally t = tally(s, {"transform.half_integral", "transform.cost", "round_half.three_halves",
                              "transform.inputs", "transform.path", "transform.double-mst"});
    report(8, t.clean() && full("transform.half_integral") && full("round_half.three_halves"), "transformations",
           t.text());
  });

  criterion(9, "ratio theorem", [&] {
    const Tally t = tally(s, {"ratio.sandwich", "ratio.constructive", "ratio.multiplicity", "ratio",
                              "lp4.equals_lp1"});
    const RatioReport path = check_ratio_theorem(unit_path(5));
    const RatioReport cycle = check_ratio_theorem(gap_cycle(5));
    const bool ok = t.clean() && full("lp4.equals_lp1") && path.pass() && path.ratio == Rational(1) &&
                    cycle.pass() && cycle.ratio == Rational(13, 10);
    report(9, ok, "ratio theorem",
           t.text() + ", " + covered("ratio.sandwich") + " within oracle limits, unit path " + path.ratio.to_string() +
               ", gap cycle 5 " + cycle.ratio.to_string());
  });

  criterion(10, "structural assertions", [&] {
    Tally t;
    for (const auto& [name, c] : s.checks) {
      if (name.rfind("struct.", 0) == 0) t.add(s, name);
    }
    const bool ok = t.failed == 0 && full("struct.chain") && full("struct.parity") && full("struct.rest-tjoin") &&
                    full("struct.splitting");
    report(10, ok, "structural assertions", t.text());
  });

  std::cout << "corpus: " << s.instances.size() << " instances, " << s.failures() << " failed checks\n";
  return failed_criteria == 0 && s.pass() ? 0 : 1;
}
