#pragma once

#include <queue>
#include <stdexcept>
#include <vector>

#include "stpath/graph.hpp"

namespace stpath {

struct MinCut {
  Rational value;
  VertexMask source_side = 0;  // in original vertex ids
};

// Minimum cut separating all of `sources` from all of `sinks` in the
// undirected graph whose capacities are the entries of x. Each terminal
// set is contracted to one node; augmenting paths are shortest (BFS), so
// the loop terminates with exact rational capacities.
inline MinCut min_cut_between(int n, const EdgeVector& x, VertexMask sources, VertexMask sinks) {
  if (sources == 0 || sinks == 0 || (sources & sinks) != 0) {
    throw std::invalid_argument("min cut needs disjoint nonempty terminal sets");
  }
  std::vector<int> node(n);
  int k = 2;
  for (int v = 0; v < n; ++v) {
    if (contains(sources, v)) node[v] = 0;
    else if (contains(sinks, v)) node[v] = 1;
    else node[v] = k++;
  }
  std::vector<std::vector<Rational>> cap(k, std::vector<Rational>(k));
  for (const auto& [e, c] : x) {
    const int a = node[e.u];
    const int b = node[e.v];
    if (a == b) continue;
    cap[a][b] += c;
    cap[b][a] += c;
  }

  Rational flow;
  std::vector<int> parent(k);
  for (;;) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[0] = 0;
    std::queue<int> q;
    q.push(0);
    while (!q.empty() && parent[1] < 0) {
      const int a = q.front();
      q.pop();
      for (int b = 0; b < k; ++b) {
        if (parent[b] < 0 && cap[a][b].sign() > 0) {
          parent[b] = a;
          q.push(b);
        }
      }
    }
    if (parent[1] < 0) break;
    Rational push = cap[parent[1]][1];
    for (int b = 1; b != 0; b = parent[b]) {
      if (cap[parent[b]][b] < push) push = cap[parent[b]][b];
    }
    for (int b = 1; b != 0; b = parent[b]) {
      cap[parent[b]][b] -= push;
      cap[b][parent[b]] += push;
    }
    flow += push;
  }

  MinCut out;
  out.value = flow;
  for (int v = 0; v < n; ++v) {
    if (parent[node[v]] >= 0) out.source_side |= bit(v);
  }
  return out;
}

}  // namespace stpath
