#pragma once
// Small dense LP solver (two-phase primal simplex with Bland's rule).
// Problems here have at most a few dozen variables and constraints, so a
// dense tableau is the right tool; no sparse machinery, no external solver.

#include <limits>
#include <vector>

namespace qsi::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// lower <= coeffs . x <= upper; either side may be infinite.
struct Constraint {
  std::vector<double> coeffs;
  double lower = -kInfinity;
  double upper = kInfinity;
};

struct Problem {
  int num_vars = 0;
  bool maximize = false;
  std::vector<double> objective;             // size num_vars
  std::vector<double> var_lower, var_upper;  // finite lower bounds required
  std::vector<Constraint> constraints;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective_value = 0.0;
  std::vector<double> x;
};

Solution solve(const Problem& problem);

}  // namespace qsi::lp
