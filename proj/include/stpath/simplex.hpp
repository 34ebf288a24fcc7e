#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "stpath/lp_types.hpp"
#include "stpath/rational.hpp"

namespace stpath::lp {

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Constraint {
  std::vector<std::pair<int, Rational>> coeffs;
  Sense sense = Sense::kGreaterEqual;
  Rational rhs;
};

// minimize c^T x subject to the rows, x >= 0.
class LinearProgram {
 public:
  explicit LinearProgram(int num_vars) : objective_(num_vars) {}

  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  void set_objective(int var, Rational c) { objective_.at(var) = std::move(c); }
  const std::vector<Rational>& objective() const { return objective_; }

  int add_row(Constraint row) {
    for (const auto& [j, a] : row.coeffs) {
      if (j < 0 || j >= num_vars()) throw std::out_of_range("constraint references unknown variable");
    }
    rows_.push_back(std::move(row));
    return num_rows() - 1;
  }
  const std::vector<Constraint>& rows() const { return rows_; }

 private:
  std::vector<Rational> objective_;
  std::vector<Constraint> rows_;
};

struct Result {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<Rational> x;
  Rational value;
  // One multiplier per row: >= 0 on '>=' rows, <= 0 on '<=' rows, free on
  // '=' rows, with A^T duals <= c and b^T duals == value at optimality.
  std::vector<Rational> duals;
  int pivots = 0;
};

namespace detail {

class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : n_(lp.num_vars()), m_(lp.num_rows()) {
    for (const auto& row : lp.rows()) {
      if (row.sense != Sense::kEqual) ++num_slack_;
    }
    art_begin_ = n_ + num_slack_;
    cols_ = art_begin_ + m_;
    t_.assign(m_, std::vector<Rational>(cols_ + 1));
    basis_.resize(m_);
    flip_.assign(m_, false);

    int slack = n_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows()[i];
      auto& r = t_[i];
      for (const auto& [j, a] : row.coeffs) r[j] += a;
      if (row.sense == Sense::kLessEqual) r[slack++] = 1;
      if (row.sense == Sense::kGreaterEqual) r[slack++] = -1;
      r[cols_] = row.rhs;
      if (row.rhs.sign() < 0) {
        flip_[i] = true;
        for (auto& v : r) v = -v;
      }
      r[art_begin_ + i] = 1;
      basis_[i] = art_begin_ + i;
    }
  }

  Result solve(const std::vector<Rational>& cost) {
    Result res;
    // Phase I: minimize the sum of artificials.
    std::vector<Rational> phase1(cols_);
    for (int i = 0; i < m_; ++i) phase1[art_begin_ + i] = 1;
    price(phase1);
    if (!iterate(cols_, res.pivots)) throw std::logic_error("phase I cannot be unbounded");
    if (obj_[cols_].sign() != 0) {
      res.status = LpStatus::kInfeasible;
      return res;
    }
    // Remove zero-level artificials from the basis where a structural
    // column can replace them; rows with none are redundant.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (int j = 0; j < art_begin_; ++j) {
        if (t_[i][j].sign() != 0) {
          pivot(i, j);
          ++res.pivots;
          break;
        }
      }
    }
    // Phase II over structural and slack columns only.
    std::vector<Rational> phase2(cols_);
    for (int j = 0; j < n_; ++j) phase2[j] = cost[j];
    price(phase2);
    if (!iterate(art_begin_, res.pivots)) {
      res.status = LpStatus::kUnbounded;
      return res;
    }
    res.status = LpStatus::kOptimal;
    res.x.assign(n_, Rational(0));
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) res.x[basis_[i]] = t_[i][cols_];
    }
    for (int j = 0; j < n_; ++j) res.value += cost[j] * res.x[j];
    res.duals.assign(m_, Rational(0));
    for (int r = 0; r < m_; ++r) {
      Rational pi;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        if (b < n_ && cost[b].sign() != 0) {
          const Rational& binv = t_[i][art_begin_ + r];
          if (binv.sign() != 0) pi += cost[b] * binv;
        }
      }
      res.duals[r] = flip_[r] ? -pi : pi;
    }
    return res;
  }

 private:
  void price(const std::vector<Rational>& cost) {
    cost_ = cost;
    obj_.assign(cols_ + 1, Rational(0));
    for (int j = 0; j < cols_; ++j) obj_[j] = cost[j];
    for (int i = 0; i < m_; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (cb.sign() == 0) continue;
      for (int j = 0; j <= cols_; ++j) {
        if (t_[i][j].sign() != 0) obj_[j] -= cb * t_[i][j];
      }
    }
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving
  // basic variable among ratio ties. Returns false on unboundedness.
  bool iterate(int allowed_cols, int& pivots) {
    for (;;) {
      int q = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (obj_[j].sign() < 0) {
          q = j;
          break;
        }
      }
      if (q < 0) return true;
      int p = -1;
      Rational best;
      for (int i = 0; i < m_; ++i) {
        if (t_[i][q].sign() <= 0) continue;
        Rational ratio = t_[i][cols_] / t_[i][q];
        if (p < 0 || ratio < best || (ratio == best && basis_[i] < basis_[p])) {
          p = i;
          best = std::move(ratio);
        }
      }
      if (p < 0) return false;
      pivot(p, q);
      ++pivots;
    }
  }

  void pivot(int p, int q) {
    auto& prow = t_[p];
    const Rational inv = Rational(1) / prow[q];
    std::vector<int> nz;
    for (int j = 0; j <= cols_; ++j) {
      if (prow[j].sign() != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[q].sign() == 0) return;
      const Rational f = row[q];
      for (int j : nz) row[j] -= f * prow[j];
    };
    for (int i = 0; i < m_; ++i) {
      if (i != p) eliminate(t_[i]);
    }
    eliminate(obj_);
    basis_[p] = q;
  }

  int n_;
  int m_;
  int num_slack_ = 0;
  int art_begin_ = 0;
  int cols_ = 0;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> obj_;
  std::vector<Rational> cost_;
  std::vector<int> basis_;
  std::vector<bool> flip_;
};

}  // namespace detail

inline Result solve(const LinearProgram& lp) {
  if (lp.num_rows() == 0) {
    Result res;
    res.x.assign(lp.num_vars(), Rational(0));
    for (const auto& c : lp.objective()) {
      if (c.sign() < 0) {
        res.status = LpStatus::kUnbounded;
        return res;
      }
    }
    res.status = LpStatus::kOptimal;
    return res;
  }
  detail::Tableau tableau(lp);
  return tableau.solve(lp.objective());
}

// Row activity a^T x.
inline Rational activity(const Constraint& row, const std::vector<Rational>& x) {
  Rational sum;
  for (const auto& [j, a] : row.coeffs) sum += a * x[j];
  return sum;
}

inline bool satisfied(const Constraint& row, const std::vector<Rational>& x) {
  const Rational lhs = activity(row, x);
  switch (row.sense) {
    case Sense::kLessEqual: return lhs <= row.rhs;
    case Sense::kGreaterEqual: return lhs >= row.rhs;
    case Sense::kEqual: return lhs == row.rhs;
  }
  return false;
}

}  // namespace stpath::lp
