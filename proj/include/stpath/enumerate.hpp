#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stpath/graph.hpp"

namespace stpath {

// Exact integer image of an EdgeVector: weight(e) = value(e) * denominator.
// Used by the exponential enumerations, where GMP arithmetic per subset
// would dominate.
class ScaledWeights {
 public:
  ScaledWeights(int n, const EdgeVector& x) : n_(n), w_(static_cast<std::size_t>(n) * n, 0) {
    mpz_class den = 1;
    for (const auto& [e, val] : x) den = lcm(den, val.denominator());
    if (!den.fits_slong_p()) throw std::overflow_error("denominators too large to scale");
    den_ = den.get_si();
    for (const auto& [e, val] : x) {
      mpz_class scaled = val.numerator() * (den / val.denominator());
      if (!scaled.fits_slong_p()) throw std::overflow_error("scaled weight too large");
      const long w = scaled.get_si();
      w_[e.u * n + e.v] = w;
      w_[e.v * n + e.u] = w;
      edges_.push_back({e.u, e.v, w});
    }
  }

  long denominator() const { return den_; }
  long at(int u, int v) const { return w_[u * n_ + v]; }

  long cut(VertexMask s) const {
    long sum = 0;
    for (const auto& e : edges_) {
      if (contains(s, e.u) != contains(s, e.v)) sum += e.w;
    }
    return sum;
  }

  long inside(VertexMask s) const {
    long sum = 0;
    for (const auto& e : edges_) {
      if (contains(s, e.u) && contains(s, e.v)) sum += e.w;
    }
    return sum;
  }

  // Integer threshold k expressed in scaled units.
  long scale(long k) const { return k * den_; }
  Rational unscale(long w) const { return Rational(w, den_); }

 private:
  struct WEdge {
    int u, v;
    long w;
  };
  int n_;
  long den_ = 1;
  std::vector<long> w_;
  std::vector<WEdge> edges_;
};

inline void require_enumerable(int n, const char* what) {
  if (n > kEnumerationLimit) {
    throw std::invalid_argument(std::string(what) + ": instance has more than " +
                                std::to_string(kEnumerationLimit) + " vertices");
  }
}

// Visits every set partition of {0..n-1} as a label vector (restricted
// growth string) with its class count and the scaled crossing weight.
inline void for_each_partition(int n, const ScaledWeights& w,
                               const std::function<void(const std::vector<int>&, int, long)>& visit) {
  std::vector<int> label(n, 0);
  std::function<void(int, int, long)> rec = [&](int v, int classes, long crossing) {
    if (v == n) {
      visit(label, classes, crossing);
      return;
    }
    for (int c = 0; c <= classes && c < n; ++c) {
      label[v] = c;
      long add = 0;
      for (int u = 0; u < v; ++u) {
        if (label[u] != c) add += w.at(u, v);
      }
      rec(v + 1, c == classes ? classes + 1 : classes, crossing + add);
    }
  };
  if (n == 0) return;
  label[0] = 0;
  rec(1, 1, 0);
}

inline std::vector<VertexMask> classes_from_labels(const std::vector<int>& label, int classes) {
  std::vector<VertexMask> out(classes, 0);
  for (std::size_t v = 0; v < label.size(); ++v) out[label[v]] |= bit(static_cast<int>(v));
  return out;
}

}  // namespace stpath
