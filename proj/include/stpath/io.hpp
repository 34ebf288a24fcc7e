#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stpath/graph.hpp"
#include "stpath/lp_types.hpp"

namespace stpath {

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// Non-empty, non-comment lines with their 1-based line numbers.
inline std::vector<std::pair<int, std::vector<std::string>>> content_lines(std::string_view text) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  std::istringstream in{std::string(text)};
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.emplace_back(lineno, tokens(line));
  }
  return out;
}

inline int parse_int(const std::string& tok, int lineno) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseErrorKind::kMalformedLine,
                     "line " + std::to_string(lineno) + ": expected integer, got '" + tok + "'");
  }
}

inline Edge parse_edge(const std::string& a, const std::string& b, int n, int lineno) {
  const int u = parse_int(a, lineno);
  const int v = parse_int(b, lineno);
  if (u < 0 || v < 0 || (n > 0 && (u >= n || v >= n))) {
    throw ParseError(ParseErrorKind::kVertexOutOfRange,
                     "line " + std::to_string(lineno) + ": vertex out of range");
  }
  if (u == v) {
    throw ParseError(ParseErrorKind::kMalformedLine,
                     "line " + std::to_string(lineno) + ": self-loop");
  }
  return Edge(u, v);
}

inline void add_weighted_edge(std::map<Edge, Rational>& out, const std::vector<std::string>& tok,
                              int n, int lineno) {
  if (tok.size() != 3) {
    throw ParseError(ParseErrorKind::kMalformedLine,
                     "line " + std::to_string(lineno) + ": expected 'u v value'");
  }
  const Edge e = parse_edge(tok[0], tok[1], n, lineno);
  const Rational value = Rational::parse(tok[2]);
  auto [it, inserted] = out.emplace(e, value);
  if (!inserted && it->second != value) {
    throw ParseError(ParseErrorKind::kAsymmetricDuplicate,
                     "line " + std::to_string(lineno) + ": edge " + e.to_string() +
                         " repeated with a different value");
  }
}

}  // namespace detail

inline Instance parse_instance(std::string_view text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) throw ParseError(ParseErrorKind::kMalformedHeader, "empty instance");
  const auto& [hline, h] = lines.front();
  if (h.size() != 8 || h[0] != "n" || h[2] != "s" || h[4] != "t" || h[6] != "metric" ||
      (h[7] != "0" && h[7] != "1")) {
    throw ParseError(ParseErrorKind::kMalformedHeader,
                     "line " + std::to_string(hline) + ": expected 'n <int> s <int> t <int> metric <0|1>'");
  }
  const int n = detail::parse_int(h[1], hline);
  const int s = detail::parse_int(h[3], hline);
  const int t = detail::parse_int(h[5], hline);
  const bool metric = h[7] == "1";
  if (n < 2 || n > 64) throw ParseError(ParseErrorKind::kMalformedHeader, "n must be in [2,64]");
  if (s < 0 || s >= n || t < 0 || t >= n) {
    throw ParseError(ParseErrorKind::kVertexOutOfRange, "terminal out of range");
  }
  if (s == t) throw ParseError(ParseErrorKind::kSameTerminals, "s and t must differ");

  std::map<Edge, Rational> costs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::add_weighted_edge(costs, lines[i].second, n, lines[i].first);
  }
  for (const auto& [e, c] : costs) {
    if (c.sign() < 0) {
      throw ParseError(ParseErrorKind::kMalformedLine, "negative cost on " + e.to_string());
    }
  }
  Instance inst(n, s, t, std::move(costs), metric);
  if (metric && !satisfies_triangle_inequality(inst)) {
    throw ParseError(ParseErrorKind::kNotMetric, "instance flagged metric is not a complete metric");
  }
  return inst;
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "n " << inst.n() << " s " << inst.s() << " t " << inst.t() << " metric "
      << (inst.is_complete_metric() ? 1 : 0) << "\n";
  for (const auto& [e, c] : inst.costs()) out << e.u << " " << e.v << " " << c << "\n";
  return out.str();
}

// n bounds vertex ids when positive.
inline EdgeVector parse_vector(std::string_view text, int n = 0) {
  const auto lines = detail::content_lines(text);
  if (lines.empty() || lines.front().second != std::vector<std::string>{"vector"}) {
    throw ParseError(ParseErrorKind::kMalformedHeader, "expected 'vector' header");
  }
  std::map<Edge, Rational> entries;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    detail::add_weighted_edge(entries, lines[i].second, n, lines[i].first);
  }
  EdgeVector out;
  for (const auto& [e, val] : entries) out.set(e, val);
  return out;
}

inline std::string serialize_vector(const EdgeVector& x) {
  std::ostringstream out;
  out << "vector\n";
  for (const auto& [e, val] : x) out << e.u << " " << e.v << " " << val << "\n";
  return out.str();
}

// Lines "u v", optional "tree" header.
inline std::vector<Edge> parse_edge_list(std::string_view text, int n = 0) {
  std::vector<Edge> out;
  for (const auto& [lineno, tok] : detail::content_lines(text)) {
    if (tok.size() == 1 && tok[0] == "tree") continue;
    if (tok.size() != 2) {
      throw ParseError(ParseErrorKind::kMalformedLine,
                       "line " + std::to_string(lineno) + ": expected 'u v'");
    }
    out.push_back(detail::parse_edge(tok[0], tok[1], n, lineno));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string serialize_edge_list(const std::vector<Edge>& edges) {
  std::ostringstream out;
  out << "tree\n";
  for (const Edge& e : edges) out << e.u << " " << e.v << "\n";
  return out.str();
}

// Dual file: header "dual", then "y v val", "u a b val", "d v1,v2,... val".
inline DualSolution parse_dual(std::string_view text, int n, int s) {
  const auto lines = detail::content_lines(text);
  if (lines.empty() || lines.front().second != std::vector<std::string>{"dual"}) {
    throw ParseError(ParseErrorKind::kMalformedHeader, "expected 'dual' header");
  }
  DualSolution dual;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [lineno, tok] = lines[i];
    auto bad = [&](const char* msg) {
      return ParseError(ParseErrorKind::kMalformedLine, "line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok.empty()) continue;
    if (tok[0] == "y" && tok.size() == 3) {
      const int v = detail::parse_int(tok[1], lineno);
      if (v < 0 || v >= n) throw ParseError(ParseErrorKind::kVertexOutOfRange, "vertex out of range");
      dual.y[v] = Rational::parse(tok[2]);
    } else if (tok[0] == "u" && tok.size() == 4) {
      dual.u[detail::parse_edge(tok[1], tok[2], n, lineno)] = Rational::parse(tok[3]);
    } else if (tok[0] == "d" && tok.size() == 3) {
      VertexMask m = 0;
      std::istringstream list(tok[1]);
      for (std::string item; std::getline(list, item, ',');) {
        const int v = detail::parse_int(item, lineno);
        if (v < 0 || v >= n) throw ParseError(ParseErrorKind::kVertexOutOfRange, "vertex out of range");
        m |= bit(v);
      }
      if (m == 0 || m == full_mask(n)) throw bad("cut must be a nonempty proper subset");
      if (!contains(m, s)) m = full_mask(n) & ~m;
      dual.d[m] += Rational::parse(tok[2]);
    } else {
      throw bad("expected 'y v val', 'u a b val' or 'd v1,v2,... val'");
    }
  }
  return dual;
}

inline std::string serialize_dual(const DualSolution& dual) {
  std::ostringstream out;
  out << "dual\n";
  for (const auto& [v, val] : dual.y) out << "y " << v << " " << val << "\n";
  for (const auto& [e, val] : dual.u) out << "u " << e.u << " " << e.v << " " << val << "\n";
  for (const auto& [m, val] : dual.d) {
    out << "d ";
    bool first = true;
    for (int v : members(m)) {
      out << (first ? "" : ",") << v;
      first = false;
    }
    out << " " << val << "\n";
  }
  return out.str();
}

}  // namespace stpath
