#include "qsi/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qsi/errors.hpp"

namespace qsi::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-8;
constexpr double kReducedCostTol = 1e-10;

bool finite(double v) { return std::isfinite(v); }

// Dense simplex tableau over equality rows A s = b with s >= 0 and b >= 0.
// The basis starts as the identity provided by slack and artificial columns.
struct Tableau {
  int rows = 0;
  int cols = 0;  // structural + slack + artificial
  std::vector<std::vector<double>> a;
  std::vector<double> rhs;
  std::vector<int> basis;
  std::vector<double> zrow;  // z_j - c_j for the active objective
  double zvalue = 0.0;

  void pivot(int r, int c) {
    const double piv = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    auto& prow = a[static_cast<std::size_t>(r)];
    for (double& v : prow) v /= piv;
    rhs[static_cast<std::size_t>(r)] /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      if (f == 0.0) continue;
      auto& row = a[static_cast<std::size_t>(i)];
      for (int j = 0; j < cols; ++j) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
      rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(r)];
      if (rhs[static_cast<std::size_t>(i)] < 0.0 && rhs[static_cast<std::size_t>(i)] > -kPivotTol)
        rhs[static_cast<std::size_t>(i)] = 0.0;
    }
    const double zf = zrow[static_cast<std::size_t>(c)];
    if (zf != 0.0) {
      for (int j = 0; j < cols; ++j) zrow[static_cast<std::size_t>(j)] -= zf * prow[static_cast<std::size_t>(j)];
      zvalue -= zf * rhs[static_cast<std::size_t>(r)];
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule keeps the iteration finite even on degenerate problems.
  // Returns Optimal when no reduced cost improves, Unbounded when a column
  // can grow without a blocking row.
  SolveStatus iterate(const std::vector<char>& allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < cols; ++j) {
        if (!allowed[static_cast<std::size_t>(j)]) continue;
        if (zrow[static_cast<std::size_t>(j)] < -kReducedCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return SolveStatus::Optimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        const double aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
        if (aij <= kPivotTol) continue;
        const double ratio = rhs[static_cast<std::size_t>(i)] / aij;
        if (ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 &&
             (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return SolveStatus::Unbounded;
      pivot(leave, enter);
    }
  }
};

struct ShiftedVar {
  // x = sign * s + offset, with an optional mirror column for free variables
  // (x = s_plus - s_minus).
  int column = -1;
  int mirror = -1;
  double sign = 1.0;
  double offset = 0.0;
};

}  // namespace

Solution solve(const Problem& prob) {
  const int n = prob.num_vars;
  if (n <= 0) throw DomainError("lp: problem needs at least one variable");
  if (static_cast<int>(prob.objective.size()) != n ||
      static_cast<int>(prob.var_lower.size()) != n ||
      static_cast<int>(prob.var_upper.size()) != n)
    throw DomainError("lp: objective and bound vectors must match num_vars");
  for (const auto& con : prob.constraints)
    if (static_cast<int>(con.coeffs.size()) != n)
      throw DomainError("lp: constraint width must match num_vars");

  Solution sol;
  for (int j = 0; j < n; ++j) {
    if (prob.var_lower[static_cast<std::size_t>(j)] >
        prob.var_upper[static_cast<std::size_t>(j)] + kFeasTol) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  for (const auto& con : prob.constraints) {
    if (con.lower > con.upper + kFeasTol) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }

  // Substitute every variable by one or two nonnegative columns.
  std::vector<ShiftedVar> map(static_cast<std::size_t>(n));
  int ncols = 0;
  for (int j = 0; j < n; ++j) {
    const double lo = prob.var_lower[static_cast<std::size_t>(j)];
    const double hi = prob.var_upper[static_cast<std::size_t>(j)];
    auto& m = map[static_cast<std::size_t>(j)];
    if (finite(lo)) {
      m.column = ncols++;
      m.sign = 1.0;
      m.offset = lo;
    } else if (finite(hi)) {
      m.column = ncols++;
      m.sign = -1.0;
      m.offset = hi;
    } else {
      m.column = ncols++;
      m.mirror = ncols++;
      m.sign = 1.0;
      m.offset = 0.0;
    }
  }
  const int nstruct = ncols;

  // Collect one-sided rows a.s <= rhs in substituted coordinates.
  struct Row {
    std::vector<double> coeffs;
    double rhs = 0.0;
  };
  std::vector<Row> le_rows;
  auto add_le = [&](const std::vector<double>& coeffs, double rhs) {
    le_rows.push_back(Row{coeffs, rhs});
  };

  auto substitute = [&](const std::vector<double>& orig, double& shift_acc) {
    std::vector<double> out(static_cast<std::size_t>(nstruct), 0.0);
    shift_acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = orig[static_cast<std::size_t>(j)];
      if (c == 0.0) continue;
      const auto& m = map[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(m.column)] += c * m.sign;
      if (m.mirror >= 0) out[static_cast<std::size_t>(m.mirror)] -= c;
      shift_acc += c * m.offset;
    }
    return out;
  };

  for (const auto& con : prob.constraints) {
    double shift = 0.0;
    const std::vector<double> coeffs = substitute(con.coeffs, shift);
    if (finite(con.upper)) add_le(coeffs, con.upper - shift);
    if (finite(con.lower)) {
      std::vector<double> neg(coeffs);
      for (double& v : neg) v = -v;
      add_le(neg, -(con.lower - shift));
    }
  }
  for (int j = 0; j < n; ++j) {
    const double lo = prob.var_lower[static_cast<std::size_t>(j)];
    const double hi = prob.var_upper[static_cast<std::size_t>(j)];
    const auto& m = map[static_cast<std::size_t>(j)];
    if (m.mirror >= 0) continue;  // free variable, no own bound rows
    if (finite(lo) && finite(hi)) {
      std::vector<double> coeffs(static_cast<std::size_t>(nstruct), 0.0);
      coeffs[static_cast<std::size_t>(m.column)] = 1.0;
      add_le(coeffs, hi - lo);
    }
  }

  const int m_rows = static_cast<int>(le_rows.size());
  // Slack for every row; artificial for rows whose rhs is negative.
  int n_art = 0;
  for (const auto& row : le_rows)
    if (row.rhs < 0.0) ++n_art;

  Tableau tab;
  tab.rows = m_rows;
  tab.cols = nstruct + m_rows + n_art;
  tab.a.assign(static_cast<std::size_t>(m_rows),
               std::vector<double>(static_cast<std::size_t>(tab.cols), 0.0));
  tab.rhs.assign(static_cast<std::size_t>(m_rows), 0.0);
  tab.basis.assign(static_cast<std::size_t>(m_rows), -1);
  tab.zrow.assign(static_cast<std::size_t>(tab.cols), 0.0);

  std::vector<char> is_artificial(static_cast<std::size_t>(tab.cols), 0);
  int art_next = nstruct + m_rows;
  for (int i = 0; i < m_rows; ++i) {
    const Row& row = le_rows[static_cast<std::size_t>(i)];
    double flip = row.rhs < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < nstruct; ++j)
      tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          flip * row.coeffs[static_cast<std::size_t>(j)];
    tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(nstruct + i)] = flip;
    tab.rhs[static_cast<std::size_t>(i)] = flip * row.rhs;
    if (flip < 0.0) {
      tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(art_next)] = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = art_next;
      is_artificial[static_cast<std::size_t>(art_next)] = 1;
      ++art_next;
    } else {
      tab.basis[static_cast<std::size_t>(i)] = nstruct + i;
    }
  }

  std::vector<char> allowed(static_cast<std::size_t>(tab.cols), 1);

  if (n_art > 0) {
    // Phase 1: maximize minus the artificial sum. With artificials basic,
    // z_j - c_j = sum of their rows over non-artificial columns.
    std::fill(tab.zrow.begin(), tab.zrow.end(), 0.0);
    tab.zvalue = 0.0;
    for (int i = 0; i < m_rows; ++i) {
      if (!is_artificial[static_cast<std::size_t>(tab.basis[static_cast<std::size_t>(i)])]) continue;
      for (int j = 0; j < tab.cols; ++j)
        tab.zrow[static_cast<std::size_t>(j)] -=
            tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      tab.zvalue -= tab.rhs[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < tab.cols; ++j)
      if (is_artificial[static_cast<std::size_t>(j)]) tab.zrow[static_cast<std::size_t>(j)] += 1.0;

    const SolveStatus st = tab.iterate(allowed);
    if (st == SolveStatus::Unbounded)
      throw Error("lp: phase one reported an unbounded objective");
    if (tab.zvalue < -kFeasTol) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
    // Pivot leftover artificials out of the basis; rows that cannot release
    // one are linearly dependent and stay parked at zero.
    for (int i = 0; i < m_rows; ++i) {
      if (!is_artificial[static_cast<std::size_t>(tab.basis[static_cast<std::size_t>(i)])]) continue;
      int col = -1;
      for (int j = 0; j < nstruct + m_rows; ++j) {
        if (std::abs(tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) tab.pivot(i, col);
    }
  }

  for (int j = 0; j < tab.cols; ++j)
    if (is_artificial[static_cast<std::size_t>(j)]) allowed[static_cast<std::size_t>(j)] = 0;

  // Phase 2 objective in substituted coordinates (internally a maximization).
  std::vector<double> cost(static_cast<std::size_t>(tab.cols), 0.0);
  const double obj_sign = prob.maximize ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    const double c = obj_sign * prob.objective[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    const auto& m = map[static_cast<std::size_t>(j)];
    cost[static_cast<std::size_t>(m.column)] += c * m.sign;
    if (m.mirror >= 0) cost[static_cast<std::size_t>(m.mirror)] -= c;
  }
  std::fill(tab.zrow.begin(), tab.zrow.end(), 0.0);
  tab.zvalue = 0.0;
  for (int j = 0; j < tab.cols; ++j) tab.zrow[static_cast<std::size_t>(j)] = -cost[static_cast<std::size_t>(j)];
  for (int i = 0; i < m_rows; ++i) {
    const int b = tab.basis[static_cast<std::size_t>(i)];
    const double cb = cost[static_cast<std::size_t>(b)];
    if (cb == 0.0) continue;
    for (int j = 0; j < tab.cols; ++j)
      tab.zrow[static_cast<std::size_t>(j)] +=
          cb * tab.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    tab.zvalue += cb * tab.rhs[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < m_rows; ++i) {
    const int b = tab.basis[static_cast<std::size_t>(i)];
    tab.zrow[static_cast<std::size_t>(b)] = 0.0;
  }

  const SolveStatus st = tab.iterate(allowed);
  if (st == SolveStatus::Unbounded) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }

  std::vector<double> s(static_cast<std::size_t>(tab.cols), 0.0);
  for (int i = 0; i < m_rows; ++i)
    s[static_cast<std::size_t>(tab.basis[static_cast<std::size_t>(i)])] =
        tab.rhs[static_cast<std::size_t>(i)];

  sol.status = SolveStatus::Optimal;
  sol.x.resize(static_cast<std::size_t>(n));
  double obj = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto& m = map[static_cast<std::size_t>(j)];
    double xj = m.offset + m.sign * s[static_cast<std::size_t>(m.column)];
    if (m.mirror >= 0) xj -= s[static_cast<std::size_t>(m.mirror)];
    // Snap to the declared box; simplex keeps values inside up to roundoff.
    const double lo = prob.var_lower[static_cast<std::size_t>(j)];
    const double hi = prob.var_upper[static_cast<std::size_t>(j)];
    if (finite(lo)) xj = std::max(xj, lo);
    if (finite(hi)) xj = std::min(xj, hi);
    sol.x[static_cast<std::size_t>(j)] = xj;
    obj += prob.objective[static_cast<std::size_t>(j)] * xj;
  }
  sol.objective_value = obj;
  return sol;
}

}  // namespace qsi::lp
