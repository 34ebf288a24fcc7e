#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stpath/bench.hpp"

using namespace stpath;
using nlohmann::ordered_json;

namespace {

// Collects one command's output for either format. Keys keep insertion order.
class Report {
 public:
  void field(const std::string& key, const std::string& value) {
    json_[key] = value;
    text_ << key << ": " << value << "\n";
  }
  void field(const std::string& key, const Rational& value) { field(key, value.to_string()); }
  void field(const std::string& key, long value) {
    json_[key] = value;
    text_ << key << ": " << value << "\n";
  }
  void flag(const std::string& key, bool value) {
    json_[key] = value;
    text_ << key << ": " << (value ? "pass" : "FAIL") << "\n";
    if (!value) ok_ = false;
  }
  void decimal(const std::string& key, double value) {
    json_[key] = value;
    text_ << key << ": " << value << "\n";
  }
  void list(const std::string& key, const std::vector<std::string>& items) {
    json_[key] = items;
    text_ << key << ":\n";
    for (const auto& s : items) text_ << "  " << s << "\n";
  }
  void object(const std::string& key, ordered_json value) { json_[key] = std::move(value); }
  // Plain-text payload in one of the standard file formats.
  void payload(const std::string& key, const std::string& body) {
    json_[key] = body;
    raw_ += body;
  }
  void fail() { ok_ = false; }

  bool ok() const { return ok_; }
  std::string render(bool as_json) const {
    if (as_json) {
      ordered_json out = json_;
      out["ok"] = ok_;
      return out.dump(2) + "\n";
    }
    return raw_.empty() ? text_.str() : raw_ + (text_.str().empty() ? "" : "# " + text_.str());
  }

 private:
  ordered_json json_ = ordered_json::object();
  std::ostringstream text_;
  std::string raw_;
  bool ok_ = true;
};

Instance load_instance(const std::string& path) { return parse_instance(read_text_file(path)); }
EdgeVector load_vector(const std::string& path, int n) { return parse_vector(read_text_file(path), n); }
SpanningTree load_tree(const std::string& path, int n) { return SpanningTree(n, parse_edge_list(read_text_file(path), n)); }

Instance completed(const Instance& inst) { return inst.is_complete_metric() ? inst : metric_completion(inst); }

std::vector<std::string> edge_values(const EdgeVector& x) {
  std::vector<std::string> out;
  for (const auto& [e, v] : x) out.push_back(e.to_string() + " " + v.to_string());
  return out;
}

std::string decomposition_line(const DecompositionTerm& t) { return "lambda " + t.lambda.to_string() + " ; " + t.tree.to_string(); }

void report_lp(Report& r, const LpSolution& sol) {
  r.field("status", to_string(sol.status));
  r.field("value", sol.value);
  r.field("rounds", static_cast<long>(sol.rounds));
  r.list("support", edge_values(sol.x));
  std::vector<std::string> cons;
  for (const auto& c : sol.active_constraints) cons.push_back(c.to_string());
  r.list("generated_constraints", cons);
  if (sol.status != LpStatus::kOptimal) r.fail();
}

void report_chain(Report& r, const NarrowCutChain& chain) {
  r.field("tau", chain.tau);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    rows.push_back("Q" + std::to_string(i + 1) + " " + mask_to_string(chain.cuts[i]) + " x(dQ)=" + chain.values[i].to_string() +
                   " e_Q=" + chain.min_edges[i].to_string() + " c(e_Q)=" + chain.min_costs[i].to_string());
  }
  r.list("cuts", rows);
  std::vector<std::string> parts;
  for (VertexMask p : chain.parts) parts.push_back(mask_to_string(p));
  r.list("parts", parts);
  r.field("sum_c_eQ", chain.sum_min_costs());
}

void report_runs(Report& r, const BestOfMany& bom) {
  std::vector<std::string> rows;
  for (const auto& run : bom.runs) {
    rows.push_back("lambda " + run.lambda.to_string() + " ; " + run.tree.to_string() + " ; T=" + mask_to_string(run.T) +
                   " c(J)=" + run.tree_cost.to_string() + " c(F)=" + run.join.cost.to_string() +
                   " path=" + run.path.cost.to_string());
  }
  r.list("trees", rows);
  r.field("expected_repair_cost", bom.expected_repair_cost);
  r.field("path", bom.best_path().to_string());
  r.field("cost", bom.best_path().cost);
}

void report_analysis(Report& r, const AnalysisReport& a) {
  r.field("params", a.params.to_string());
  report_chain(r, a.chain);
  std::vector<std::string> trees;
  for (const auto& t : a.trees) {
    trees.push_back("lambda " + t.lambda.to_string() + " ; " + t.tree.to_string() + " ; T=" + mask_to_string(t.T) +
                    " feasible=" + (t.feasibility.pass ? "yes" : "no " + t.feasibility.detail) +
                    " c(f)=" + t.f_cost.to_string() + " c(F)=" + t.join_cost.to_string());
  }
  r.list("tree_certificates", trees);
  std::vector<std::string> probs;
  for (const auto& p : a.probabilities) {
    probs.push_back(mask_to_string(p.cut) + " x(dQ)=" + p.value.to_string() + " Pr(single)=" + p.single_edge.to_string() +
                    " Pr(T-odd)=" + p.t_odd.to_string() + (p.pass ? "" : " FAIL"));
  }
  r.list("probabilities", probs);
  r.field("c_x", a.cx);
  r.field("E_c_J", a.expected_tree);
  r.field("E_c_P", a.expected_path);
  r.field("E_c_J_minus_P", a.expected_rest);
  r.field("E_c_F", a.expected_join);
  r.field("E_c_f", a.expected_f);
  r.field("raw_bound", a.raw_bound);
  r.field("aks_bound", a.aks_bound);
  if (a.sebo_bound) r.field("sebo_bound", *a.sebo_bound);
  if (a.combined_bound) r.field("combined_bound", *a.combined_bound);
  r.decimal("sebo_bound_approx", a.sebo_bound_approx);
  r.decimal("aks_factor", aks_factor(a.params.beta().to_double()));
  r.decimal("sebo_factor", sebo_factor(a.params.beta().to_double()));
  r.field("best_path", a.best.best_path().to_string());
  r.field("best_cost", a.best_cost);
  r.field("ratio", a.ratio());
  r.list("failures", a.failures);
  r.flag("certified", a.pass());
}

ordered_json suite_json(const SuiteSummary& s) {
  ordered_json checks = ordered_json::object();
  for (const auto& [name, t] : s.checks) {
    checks[name] = {{"passed", t.passed}, {"failed", t.failed}, {"witnesses", t.witnesses}};
  }
  auto opt = [](const std::optional<Rational>& r) { return r ? ordered_json(r->to_string()) : ordered_json(nullptr); };
  return {{"instances", s.instances.size()},
          {"checks", checks},
          {"worst_best_of_many_ratio", opt(s.worst_bom_ratio)},
          {"worst_hoogeveen_ratio", opt(s.worst_hoogeveen_ratio)},
          {"worst_integral_ratio", opt(s.worst_integral_ratio)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact certification tools for the metric s-t path TSP"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  Report report;
  std::string inst_path, x_path, dual_path, tree_path, tau_text = "1", beta_text = "4/9", corpus_path;
  int lp_kind = 1, length = 2, n = 6;
  std::uint64_t seed = 1;

  auto need_inst = [&](CLI::App* sub) { sub->add_option("instance", inst_path, "Instance file")->required(); };
  auto need_x = [&](CLI::App* sub) { sub->add_option("vector", x_path, "Edge vector file")->required(); };

  auto* lp1 = app.add_subcommand("solve-lp1", "Solve the path Held-Karp relaxation on the metric completion");
  need_inst(lp1);
  lp1->callback([&] { report_lp(report, solve_lp1(completed(load_instance(inst_path)))); });

  auto* lp4 = app.add_subcommand("solve-lp4", "Solve the partition/even-cut relaxation on the base graph");
  need_inst(lp4);
  lp4->callback([&] { report_lp(report, solve_lp4(load_instance(inst_path))); });

  auto* vd = app.add_subcommand("verify-dual", "Check a dual certificate for an L.P.1 solution");
  need_inst(vd);
  need_x(vd);
  vd->add_option("dual", dual_path, "Dual file")->required();
  vd->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    const DualCheck dc = verify_dual_certificate(g, load_vector(x_path, g.n()), parse_dual(read_text_file(dual_path), g.n(), g.s()));
    report.field("primal_value", dc.primal_value);
    report.field("dual_value", dc.dual_value);
    report.list("witnesses", dc.failures);
    report.flag("certified", dc.pass);
  });

  auto* dec = app.add_subcommand("decompose", "Write x as a convex combination of spanning trees");
  need_inst(dec);
  need_x(dec);
  dec->callback([&] {
    const Instance inst = load_instance(inst_path);
    const ConvexDecomposition d = decompose(inst.n(), load_vector(x_path, inst.n()));
    std::vector<std::string> lines;
    for (const auto& t : d.terms) lines.push_back(decomposition_line(t));
    report.list("terms", lines);
    report.flag("resums_to_x", d.decomposes(load_vector(x_path, inst.n())));
  });

  auto* citd = app.add_subcommand("check-tree-in-decomposition", "Check that a tree can appear in a decomposition of x");
  need_inst(citd);
  need_x(citd);
  citd->add_option("tree", tree_path, "Tree edge list")->required();
  citd->callback([&] {
    const Instance inst = load_instance(inst_path);
    const EdgeVector x = load_vector(x_path, inst.n());
    const SpanningTree tree = load_tree(tree_path, inst.n());
    const CheckResult c = is_in_some_decomposition(x, tree);
    report.field("tree", tree.to_string());
    if (c.witness) report.field("witness", mask_to_string(*c.witness));
    if (!c.detail.empty()) report.field("detail", c.detail);
    if (c.pass) {
      const ConvexDecomposition d = decompose_containing(inst.n(), x, tree);
      std::vector<std::string> lines;
      for (const auto& t : d.terms) lines.push_back(decomposition_line(t));
      report.list("decomposition", lines);
    }
    report.flag("in_some_decomposition", c.pass);
  });

  auto* nc = app.add_subcommand("narrow-cuts", "List the s-t cuts with x(dQ) < 1 + tau");
  need_inst(nc);
  need_x(nc);
  nc->add_option("--tau", tau_text, "Threshold p/q");
  nc->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    report_chain(report, narrow_cuts(g, load_vector(x_path, g.n()), Rational::parse(tau_text)));
  });

  auto* cert = app.add_subcommand("certify", "Exact unified-correction analysis for one beta");
  need_inst(cert);
  need_x(cert);
  cert->add_option("--beta", beta_text, "Parameter beta p/q");
  cert->add_option("--tree", tree_path, "Use a decomposition containing this tree");
  cert->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    const EdgeVector x = load_vector(x_path, g.n());
    const ConvexDecomposition d =
        tree_path.empty() ? decompose(g.n(), x) : decompose_containing(g.n(), x, load_tree(tree_path, g.n()));
    report_analysis(report, certificate_report(g, x, d, make_params(Rational::parse(beta_text))));
  });

  auto* hoog = app.add_subcommand("hoogeveen", "Tree plus minimum T-join, shortcut to an s-t path");
  need_inst(hoog);
  hoog->callback([&] {
    const HamPath p = hoogeveen(completed(load_instance(inst_path)));
    report.field("path", p.to_string());
    report.field("cost", p.cost);
  });

  auto* bom = app.add_subcommand("best-of-many", "Christofides on every tree of a decomposition of x");
  need_inst(bom);
  bom->add_option("vector", x_path, "L.P.1 solution (solved when omitted)");
  bom->add_option("--beta", beta_text, "Parameter beta p/q for the certificate");
  bom->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    const EdgeVector x = x_path.empty() ? solve_lp1(g).x : load_vector(x_path, g.n());
    const ConvexDecomposition d = decompose(g.n(), x);
    const AnalysisReport a = certificate_report(g, x, d, make_params(Rational::parse(beta_text)));
    report_runs(report, a.best);
    report.list("certificate_failures", a.failures);
    report.flag("certified", a.pass());
    report.flag("within_8_5", a.within_eight_fifths());
  });

  auto* rh = app.add_subcommand("round-half", "Round a half-integral L.P.1 solution");
  need_inst(rh);
  need_x(rh);
  rh->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    const EdgeVector x = load_vector(x_path, g.n());
    const HalfIntegralRounding h = round_half_integral(g, x, decompose(g.n(), x));
    report_runs(report, h.runs);
    report.field("bound", h.bound);
    report.flag("within_bound", h.path().cost <= h.bound);
  });

  auto* l41 = app.add_subcommand("lp4-to-lp1", "Edge-splitting transform of an L.P.4 solution");
  need_inst(l41);
  need_x(l41);
  l41->callback([&] {
    const Instance base = load_instance(inst_path);
    const Lp4ToLp1 t = lp4_to_lp1(base, load_vector(x_path, base.n()));
    report.payload("vector", serialize_vector(t.x));
    report.field("input_cost", t.input_cost);
    report.field("output_cost", t.output_cost);
    report.field("scale", t.scale);
    report.field("splits", static_cast<long>(t.splits));
  });

  auto* l14 = app.add_subcommand("lp1-to-lp4", "Route an L.P.1 solution through shortest paths of the base graph");
  need_inst(l14);
  need_x(l14);
  l14->callback([&] {
    const Instance base = load_instance(inst_path);
    const EdgeVector out = lp1_to_lp4(base, load_vector(x_path, base.n()));
    report.payload("vector", serialize_vector(out));
    report.field("cost", cost_of(base, out));
  });

  auto* oi = app.add_subcommand("opt-int", "Brute-force integral optimum");
  need_inst(oi);
  oi->add_option("--lp", lp_kind, "Relaxation 1 or 4")->check(CLI::IsMember({1, 4}));
  oi->callback([&] {
    const Instance base = load_instance(inst_path);
    const IntegralOptimum o = lp_kind == 1 ? brute_opt_int_lp1(base) : brute_opt_int_lp4(base);
    report.field("value", o.value);
    if (lp_kind == 1) report.field("path", o.path.to_string());
    if (lp_kind == 4) report.field("oracle_assumption", std::string("multiplicities <= 2"));
    report.list("solution", edge_values(o.x));
  });

  auto* rc = app.add_subcommand("ratio-check", "Integral optima of both relaxations and the 3/2 sandwich");
  need_inst(rc);
  bool mult3 = false;
  rc->add_flag("--multiplicity-three", mult3, "Also search L.P.4 multiplicities up to 3");
  rc->callback([&] {
    const RatioReport rr = check_ratio_theorem(load_instance(inst_path), mult3);
    report.field("opt_int_lp1", rr.opt_lp1);
    report.field("opt_int_lp4", rr.opt_lp4);
    report.field("ratio", rr.ratio);
    report.field("oracle_assumption", std::string(rr.multiplicity_three_agrees ? "multiplicities <= 2, unchanged at 3"
                                                                               : "multiplicities <= 2"));
    report.field("optimal_path", rr.optimal_path.to_string());
    report.list("lp4_solution", edge_values(rr.lp4_solution));
    report.list("half_integral", edge_values(rr.half_integral));
    report.field("constructive_path", rr.constructive_path.to_string());
    report.field("constructive_cost", rr.constructive_path.cost);
    report.list("failures", rr.failures);
    report.flag("sandwich", rr.pass());
  });

  auto* vhb = app.add_subcommand("verify-hb", "Certify the 8-vertex counterexample");
  std::string hb_dir;
  vhb->add_option("--data", hb_dir, "Directory with hb.inst, hb.x, hb.dual, hb.tree (builtin copy when omitted)");
  vhb->callback([&] {
    CounterexampleReport rep;
    if (hb_dir.empty()) {
      rep = verify_counterexample_hb();
    } else {
      const std::filesystem::path d(hb_dir);
      const Instance base = load_instance((d / "hb.inst").string());
      rep = verify_counterexample(base, load_vector((d / "hb.x").string(), base.n()),
                                  parse_dual(read_text_file(d / "hb.dual"), base.n(), base.s()),
                                  load_tree((d / "hb.tree").string(), base.n()));
    }
    for (const auto& c : rep.claims) {
      report.field(c.name + "_detail", c.detail);
      report.flag(c.name, c.pass);
    }
  });

  auto* gt = app.add_subcommand("good-tree", "MST per tau=1 part joined by cheapest consecutive edges");
  need_inst(gt);
  need_x(gt);
  gt->callback([&] {
    const Instance g = completed(load_instance(inst_path));
    const GoodTreeReport t = build_good_spanning_tree(g, load_vector(x_path, g.n()));
    std::vector<std::string> parts, connectors;
    for (std::size_t i = 0; i < t.chain.parts.size(); ++i) {
      std::string row = mask_to_string(t.chain.parts[i]);
      for (const Edge& e : t.part_trees[i]) row += " " + e.to_string();
      parts.push_back(row);
    }
    for (std::size_t i = 0; i < t.connectors.size(); ++i) {
      connectors.push_back(t.connectors[i].to_string() + " " + t.connector_costs[i].to_string());
    }
    report.list("parts", parts);
    report.list("connectors", connectors);
    report.field("inside_cost", t.inside_cost);
    report.field("total", t.total);
    report.field("lp_value", t.lp_value);
    report.field("exceeds_lp", t.exceeds_lp() ? "yes" : "no");
  });

  auto* gc = app.add_subcommand("gap-cycle", "Unit cycle on 2l vertices, s and t antipodal");
  gc->add_option("l", length, "Half length")->required();
  gc->callback([&] { report.payload("instance", serialize_instance(gap_cycle(length))); });

  auto* ri = app.add_subcommand("random-instance", "Random complete metric instance");
  ri->add_option("--n", n, "Vertices");
  ri->add_option("--seed", seed, "Seed");
  ri->callback([&] { report.payload("instance", serialize_instance(random_metric_instance(n, seed))); });

  auto* mc = app.add_subcommand("metric-completion", "Shortest-path completion of an instance");
  need_inst(mc);
  mc->callback([&] { report.payload("instance", serialize_instance(metric_completion(load_instance(inst_path)))); });

  auto* rs = app.add_subcommand("run-suite", "Run every certification check over a corpus");
  rs->add_option("--corpus", corpus_path, "Manifest file (builtin corpus when omitted)");
  bool verbose = false;
  rs->add_flag("--verbose", verbose, "Per-instance lines");
  rs->callback([&] {
    const auto corpus = corpus_path.empty() ? default_corpus() : load_corpus(corpus_path);
    const SuiteSummary s = run_suite(corpus);
    if (verbose) {
      std::vector<std::string> rows;
      for (const auto& r : s.instances) {
        rows.push_back(r.name + " n=" + std::to_string(r.n) + " lp=" + r.lp1_value.to_string() +
                       " checks=" + std::to_string(r.checks.size()) + " failures=" + std::to_string(r.failures()));
      }
      report.list("instances", rows);
    }
    std::vector<std::string> rows;
    for (const auto& [name, t] : s.checks) {
      rows.push_back(name + " " + std::to_string(t.passed) + "/" + std::to_string(t.passed + t.failed));
      for (const auto& w : t.witnesses) rows.push_back("  " + w);
    }
    report.field("instance_count", static_cast<long>(s.instances.size()));
    report.list("checks", rows);
    if (s.worst_bom_ratio) report.field("worst_best_of_many_ratio", *s.worst_bom_ratio);
    if (s.worst_hoogeveen_ratio) report.field("worst_hoogeveen_ratio", *s.worst_hoogeveen_ratio);
    if (s.worst_integral_ratio) report.field("worst_integral_ratio", *s.worst_integral_ratio);
    report.object("summary", suite_json(s));
    report.flag("all_pass", s.pass());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << report.render(format == "json");
  return report.ok() ? EXIT_SUCCESS : EXIT_FAILURE;
}
