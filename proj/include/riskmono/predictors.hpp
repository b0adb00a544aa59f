#pragma once

#include "riskmono/core.hpp"

#include <cstddef>
#include <string>

namespace riskmono {

enum class BaseKind { Mn2ls, Mn1ls, Ridge, Lasso, Null };

/// A base prediction procedure; `lambda` is used by Ridge and Lasso only.
struct BaseProcedure {
  BaseKind kind = BaseKind::Mn2ls;
  double lambda = 0.0;

  static BaseProcedure mn2ls() { return {BaseKind::Mn2ls, 0.0}; }
  static BaseProcedure mn1ls() { return {BaseKind::Mn1ls, 0.0}; }
  static BaseProcedure ridge(double lambda);
  static BaseProcedure lasso(double lambda);
  static BaseProcedure null() { return {BaseKind::Null, 0.0}; }

  std::string name() const;
};

/// Parses "mn2", "mn1", "ridge", "lasso", "null" (and the long forms
/// "mn2ls"/"mn1ls"); lambda applies to ridge and lasso.
BaseProcedure parse_base_procedure(const std::string& name, double lambda = 0.0);

/// Minimum l2-norm least squares, (X^T X / m)^+ X^T Y / m.
LinearPredictor fit_mn2ls(const Dataset& data);

/// Minimum l1-norm element of the least-squares solution set. Full column
/// rank gives the unique OLS fit; otherwise basis pursuit on the projected
/// response, solved as a linear program.
LinearPredictor fit_mn1ls(const Dataset& data);

/// (X^T X / m + lambda I)^{-1} X^T Y / m.
LinearPredictor fit_ridge(const Dataset& data, double lambda);

struct LassoOptions {
  double tolerance = 1e-10;
  std::size_t max_sweeps = 100000;
};

struct LassoFit {
  LinearPredictor predictor;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent on (1/2m)||Y - X beta||^2 + lambda ||beta||_1.
LassoFit fit_lasso_detailed(const Dataset& data, double lambda, const LassoOptions& options = {});

/// As fit_lasso_detailed; non-convergence is reported in predictor.warnings.
LinearPredictor fit_lasso(const Dataset& data, double lambda, const LassoOptions& options = {});

LinearPredictor fit_null(const Dataset& data);

LinearPredictor fit(const BaseProcedure& base, const Dataset& data);

double soft_threshold(double x, double level) noexcept;

}  // namespace riskmono
