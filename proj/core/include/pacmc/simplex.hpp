#pragma once

#include <cstddef>
#include <vector>

namespace pacmc {

// min x[n-1]  s.t.  A x <= b,  lower <= x <= upper.
//
// The last variable plays the role of the tube half-width: every row must
// carry a strictly negative coefficient on it, so any choice of the other
// variables is feasible once it is large enough. solve_lp relies on that to
// build its starting vertex.
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows x cols, row-major
  std::vector<double> b;
  std::vector<double> lower;
  std::vector<double> upper;

  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  void validate() const;
};

enum class LpStatus { Optimal, BoundInfeasible };

struct LpSolution {
  std::vector<double> x;  // all variables, the last one is xi
  double xi = 0.0;
  LpStatus status = LpStatus::Optimal;
  std::size_t iterations = 0;
  // max_r (A_r,head x_head - b_r) / -A_r,last: the smallest xi feasible
  // for the returned head variables.
  double max_residual = 0.0;
};

struct LpOptions {
  std::size_t max_iterations = 0;  // 0: 50 * rows
  std::size_t refactor_interval = 50;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-10;
};

// Bounded-variable primal simplex in active-set form with Bland's rule:
// the constraint released is the one with the smallest index among those
// with a wrong-signed multiplier, and ratio-test ties go to the smallest
// index as well (bounds of variable i are index i, row r is cols + r).
// Deterministic; throws SolverStall past the iteration cap.
//
// The upper bound on xi is only checked after the solve: the result is
// BoundInfeasible when the unconstrained optimum exceeds it.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace pacmc
