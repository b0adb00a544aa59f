#pragma once

#include "riskmono/core.hpp"

#include <cstddef>

namespace riskmono::lp {

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  /// 0 selects 50 * (rows + cols).
  std::size_t max_iterations = 0;
};

struct SimplexResult {
  Vector x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Two-phase dense-tableau simplex for  min c^T x  s.t.  A x = b, x >= 0.
/// Dantzig pricing, switching to Bland's rule after a run of degenerate
/// pivots. Throws Error(Solver) on infeasibility, unboundedness, or when the
/// iteration cap is hit.
SimplexResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                                  const SimplexOptions& options = {});

}  // namespace riskmono::lp
