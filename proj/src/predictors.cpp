#include "riskmono/predictors.hpp"

#include "riskmono/error.hpp"
#include "riskmono/linalg.hpp"
#include "riskmono/simplex.hpp"

#include <cmath>
#include <sstream>

namespace riskmono {

BaseProcedure BaseProcedure::ridge(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
          "ridge penalty must be positive");
  return {BaseKind::Ridge, lambda};
}

BaseProcedure BaseProcedure::lasso(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
          "lasso penalty must be positive");
  return {BaseKind::Lasso, lambda};
}

std::string BaseProcedure::name() const {
  switch (kind) {
    case BaseKind::Mn2ls: return "mn2";
    case BaseKind::Mn1ls: return "mn1";
    case BaseKind::Ridge: return "ridge";
    case BaseKind::Lasso: return "lasso";
    case BaseKind::Null: return "null";
  }
  return "unknown";
}

BaseProcedure parse_base_procedure(const std::string& name, double lambda) {
  if (name == "mn2" || name == "mn2ls") return BaseProcedure::mn2ls();
  if (name == "mn1" || name == "mn1ls") return BaseProcedure::mn1ls();
  if (name == "ridge") return BaseProcedure::ridge(lambda);
  if (name == "lasso") return BaseProcedure::lasso(lambda);
  if (name == "null") return BaseProcedure::null();
  fail(ErrorCode::InvalidArgument, "unknown base procedure '" + name + "'");
}

LinearPredictor fit_mn2ls(const Dataset& data) {
  require(data.cols() >= 1, ErrorCode::InvalidArgument, "mn2ls needs at least one feature");
  return LinearPredictor(linalg::min_norm_solve(data.features(), data.response()));
}

LinearPredictor fit_mn1ls(const Dataset& data) {
  const Index p = data.cols();
  require(p >= 1, ErrorCode::InvalidArgument, "mn1ls needs at least one feature");
  if (data.empty()) return LinearPredictor::zeros(p);

  const linalg::ThinSvd svd = linalg::thin_svd(data.features());
  const Index r = svd.rank();
  if (r == 0) return LinearPredictor::zeros(p);
  const Vector rhs = (svd.u.transpose() * data.response()).cwiseQuotient(svd.s);
  if (r == p) return LinearPredictor(svd.v * rhs);

  // X beta = yhat  <=>  V_r^T beta = S_r^{-1} U_r^T y, a full-row-rank system
  // with orthonormal rows. Split beta = b_plus - b_minus.
  const Matrix& vt = svd.v;
  Matrix a(r, 2 * p);
  a.leftCols(p) = vt.transpose();
  a.rightCols(p) = -vt.transpose();
  const Vector cost = Vector::Ones(2 * p);
  lp::SimplexOptions options;
  options.feasibility_tol = 1e-9;
  const lp::SimplexResult sol = lp::solve_standard_form(a, rhs, cost, options);
  Vector beta = sol.x.head(p) - sol.x.tail(p);

  const double residual = (vt.transpose() * beta - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (residual > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "mn1ls linear program returned an infeasible point: residual " << residual
        << " after " << sol.iterations << " iterations";
    fail(ErrorCode::Solver, msg.str());
  }
  return LinearPredictor(std::move(beta));
}

LinearPredictor fit_ridge(const Dataset& data, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
          "ridge penalty must be positive");
  const Index n = data.rows();
  const Index p = data.cols();
  if (n == 0) return LinearPredictor::zeros(p);
  const Matrix& x = data.features();
  const double m = static_cast<double>(n);
  if (p <= n) {
    Matrix lhs = Matrix::Identity(p, p) * lambda;
    lhs.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / m);
    Eigen::LLT<Matrix> llt(lhs.selfadjointView<Eigen::Lower>());
    require(llt.info() == Eigen::Success, ErrorCode::Numeric, "ridge system not positive definite");
    return LinearPredictor(llt.solve(x.transpose() * data.response() / m));
  }
  // Dual form: X^T (X X^T / m + lambda I)^{-1} Y / m.
  Matrix lhs = Matrix::Identity(n, n) * lambda;
  lhs.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / m);
  Eigen::LLT<Matrix> llt(lhs.selfadjointView<Eigen::Lower>());
  require(llt.info() == Eigen::Success, ErrorCode::Numeric, "ridge system not positive definite");
  return LinearPredictor(x.transpose() * llt.solve(data.response() / m));
}

double soft_threshold(double x, double level) noexcept {
  if (x > level) return x - level;
  if (x < -level) return x + level;
  return 0.0;
}

LassoFit fit_lasso_detailed(const Dataset& data, double lambda, const LassoOptions& options) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
          "lasso penalty must be positive");
  const Index n = data.rows();
  const Index p = data.cols();
  LassoFit out;
  out.predictor = LinearPredictor::zeros(p);
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const Matrix& x = data.features();
  const double m = static_cast<double>(n);
  const Vector col_sq = x.colwise().squaredNorm().transpose() / m;
  Vector& beta = out.predictor.coefficients;
  Vector resid = data.response();

  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = beta(j);
      const double z = x.col(j).dot(resid) / m + col_sq(j) * old;
      const double updated = soft_threshold(z, lambda) / col_sq(j);
      const double delta = updated - old;
      if (delta != 0.0) {
        resid.noalias() -= delta * x.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    out.sweeps = sweep + 1;
    if (max_change < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.predictor.warnings.push_back("lasso coordinate descent stopped after " +
                                     std::to_string(out.sweeps) + " sweeps without converging");
  }
  return out;
}

LinearPredictor fit_lasso(const Dataset& data, double lambda, const LassoOptions& options) {
  return fit_lasso_detailed(data, lambda, options).predictor;
}

LinearPredictor fit_null(const Dataset& data) { return LinearPredictor::zeros(data.cols()); }

LinearPredictor fit(const BaseProcedure& base, const Dataset& data) {
  switch (base.kind) {
    case BaseKind::Mn2ls: return fit_mn2ls(data);
    case BaseKind::Mn1ls: return fit_mn1ls(data);
    case BaseKind::Ridge: return fit_ridge(data, base.lambda);
    case BaseKind::Lasso: return fit_lasso(data, base.lambda);
    case BaseKind::Null: return fit_null(data);
  }
  fail(ErrorCode::InvalidArgument, "unknown base procedure");
}

}  // namespace riskmono
