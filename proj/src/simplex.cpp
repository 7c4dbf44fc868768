#include "capkm/simplex.hpp"

#include <omp.h>

#include <stdexcept>

namespace capkm {

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) {
    const int R = static_cast<int>(lp.rows.size());
    n_struct_ = lp.num_vars;
    // column layout: structural | slack/surplus | artificial | rhs
    int n_slack = 0, n_art = 0;
    for (const auto& row : lp.rows) {
      if (row.rel != '=') ++n_slack;
      bool rhs_neg = row.rhs < 0;
      char rel = row.rel;
      if (rhs_neg) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
      if (rel != '<') ++n_art;
    }
    first_art_ = n_struct_ + n_slack;
    cols_ = first_art_ + n_art + 1;
    rhs_col_ = cols_ - 1;
    rows_.assign(R, std::vector<Rat>(cols_, Rat(0)));
    basis_.assign(R, -1);
    int slack_at = n_struct_, art_at = first_art_;
    for (int r = 0; r < R; ++r) {
      const auto& row = lp.rows[r];
      Rat sign = row.rhs < 0 ? Rat(-1) : Rat(1);
      for (const auto& [v, a] : row.coef) rows_[r][v] = sign * a;
      rows_[r][rhs_col_] = sign * row.rhs;
      char rel = row.rel;
      if (sign < 0) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
      if (row.rel != '=') rows_[r][slack_at++] = (rel == '<') ? Rat(1) : Rat(-1);
      if (rel == '<') {
        basis_[r] = slack_at - 1;
      } else {
        rows_[r][art_at] = 1;
        basis_[r] = art_at++;
      }
    }
    obj_.assign(cols_, Rat(0));
  }

  // phase 1: minimize the sum of artificials
  bool phase1(long& pivots) {
    std::fill(obj_.begin(), obj_.end(), Rat(0));
    for (int c = first_art_; c < rhs_col_; ++c) obj_[c] = 1;
    for (size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] >= first_art_) sub_scaled(obj_, rows_[r], Rat(1));
    iterate(rhs_col_, pivots);  // artificials may re-enter; cap at all columns
    if (-obj_[rhs_col_] != 0) return false;  // infeasible
    drive_out_artificials();
    return true;
  }

  LpStatus phase2(const std::vector<Rat>& c, long& pivots) {
    std::fill(obj_.begin(), obj_.end(), Rat(0));
    for (int v = 0; v < n_struct_; ++v) obj_[v] = c[v];
    for (size_t r = 0; r < rows_.size(); ++r)
      if (obj_[basis_[r]] != 0) sub_scaled(obj_, rows_[r], obj_[basis_[r]]);
    return iterate(first_art_, pivots);
  }

  Rat objective() const { return -obj_[rhs_col_]; }

  std::vector<Rat> solution() const {
    std::vector<Rat> x(n_struct_, Rat(0));
    for (size_t r = 0; r < rows_.size(); ++r)
      if (basis_[r] < n_struct_) x[basis_[r]] = rows_[r][rhs_col_];
    return x;
  }

 private:
  // target -= factor * source, over source's nonzero columns.
  // factor is taken by value: callers pass entries of target, which the
  // loop overwrites.
  static void sub_scaled(std::vector<Rat>& target, const std::vector<Rat>& source, Rat factor) {
    for (size_t c = 0; c < source.size(); ++c)
      if (source[c] != 0) target[c] -= factor * source[c];
  }

  LpStatus iterate(int allowed_cols, long& pivots) {
    int stall = 0;
    while (true) {
      bool bland = stall > opt_.stall_window;
      int enter = -1;
      for (int c = 0; c < allowed_cols; ++c) {
        if (obj_[c] < 0) {
          if (bland) {
            enter = c;
            break;
          }
          if (enter < 0 || obj_[c] < obj_[enter]) enter = c;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      Rat best_ratio;
      for (size_t r = 0; r < rows_.size(); ++r) {
        const Rat& a = rows_[r][enter];
        if (a <= 0) continue;
        Rat ratio = rows_[r][rhs_col_] / a;
        // tie-break on the smaller basis column: lexicographic anti-cycling
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      stall = (best_ratio == 0) ? stall + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(int pr, int pc) {
    std::vector<Rat>& prow = rows_[pr];
    const Rat piv = prow[pc];
    if (piv != 1)
      for (Rat& v : prow)
        if (v != 0) v /= piv;
    prow[pc] = 1;
    // nonzero columns of the pivot row drive the elimination cost
    nz_.clear();
    for (int c = 0; c < cols_; ++c)
      if (prow[c] != 0) nz_.push_back(c);
    const int R = static_cast<int>(rows_.size());
    int threads = opt_.threads > 0 ? opt_.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && R > 32)
    for (int r = 0; r < R; ++r) {
      if (r == pr) continue;
      Rat f = rows_[r][pc];
      if (f == 0) continue;
      std::vector<Rat>& row = rows_[r];
      for (int c : nz_) row[c] -= f * prow[c];
      row[pc] = 0;
    }
    Rat f = obj_[pc];
    if (f != 0) {
      for (int c : nz_) obj_[c] -= f * prow[c];
      obj_[pc] = 0;
    }
    basis_[pr] = pc;
  }

  void drive_out_artificials() {
    for (size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] < first_art_) continue;
      int pc = -1;
      for (int c = 0; c < first_art_; ++c)
        if (rows_[r][c] != 0) {
          pc = c;
          break;
        }
      if (pc >= 0) {
        pivot(static_cast<int>(r), pc);
      }
      // else: the row is redundant; its artificial stays basic at value 0 and
      // can never block a ratio test (all non-artificial entries are zero)
    }
  }

  SimplexOptions opt_;
  int n_struct_ = 0, first_art_ = 0, cols_ = 0, rhs_col_ = 0;
  std::vector<std::vector<Rat>> rows_;
  std::vector<Rat> obj_;
  std::vector<int> basis_;
  std::vector<int> nz_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt) {
  for (const auto& row : lp.rows)
    for (const auto& [v, a] : row.coef)
      if (v < 0 || v >= lp.num_vars) throw std::invalid_argument("solve_lp: bad variable index");
  Tableau tab(lp, opt);
  LpResult res;
  if (!tab.phase1(res.pivots)) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  res.status = tab.phase2(lp.c, res.pivots);
  if (res.status == LpStatus::Optimal) {
    res.x = tab.solution();
    res.value = 0;
    for (int v = 0; v < lp.num_vars; ++v)
      if (res.x[v] != 0) res.value += lp.c[v] * res.x[v];
  }
  return res;
}

}  // namespace capkm
