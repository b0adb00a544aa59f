#include "riskmono/simplex.hpp"

#include "riskmono/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace riskmono::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr std::size_t kDegenerateSwitch = 50;

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b) : m_(a.rows()), n_(a.cols()) {
    t_ = Matrix::Zero(m_ + 1, n_ + m_ + 1);
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
    active_.assign(static_cast<std::size_t>(m_), true);
  }

  Index rhs() const { return n_ + m_; }
  Index rows() const { return m_; }
  Index vars() const { return n_; }
  Matrix& t() { return t_; }
  std::vector<Index>& basis() { return basis_; }
  std::vector<bool>& active() { return active_; }

  void pivot(Index row, Index col) {
    const double piv = t_(row, col);
    t_.row(row) /= piv;
    const Eigen::RowVectorXd prow = t_.row(row);
    for (Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * prow;
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  /// Loads the objective row for cost vector `cost` over the first
  /// `cost.size()` columns and prices out the basic columns.
  void set_objective(const Vector& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(cost.size()) = cost.transpose();
    for (Index i = 0; i < m_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const Index bcol = basis_[static_cast<std::size_t>(i)];
      const double cb = t_(m_, bcol);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  /// Runs simplex iterations over columns [0, allowed). Returns iterations used.
  std::size_t optimize(Index allowed, std::size_t max_iter, std::size_t used) {
    std::size_t degenerate = 0;
    while (true) {
      const bool bland = degenerate >= kDegenerateSwitch;
      Index enter = -1;
      double best = -1e-10;
      for (Index j = 0; j < allowed; ++j) {
        const double rc = t_(m_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return used;
      if (used >= max_iter) {
        std::ostringstream msg;
        msg << "simplex hit iteration cap " << max_iter << " (objective "
            << -t_(m_, rhs()) << ", most negative reduced cost " << best << ")";
        fail(ErrorCode::Solver, msg.str());
      }
      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        if (!active_[static_cast<std::size_t>(i)]) continue;
        const double coef = t_(i, enter);
        if (coef <= kPivotTol) continue;
        const double r = t_(i, rhs()) / coef;
        if (r < ratio - 1e-14 ||
            (std::abs(r - ratio) <= 1e-14 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          ratio = r;
          leave = i;
        }
      }
      if (leave < 0) fail(ErrorCode::Solver, "linear program is unbounded");
      degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(leave, enter);
      ++used;
    }
  }

 private:
  Index m_;
  Index n_;
  Matrix t_;
  std::vector<Index> basis_;
  std::vector<bool> active_;
};

}  // namespace

SimplexResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c,
                                  const SimplexOptions& options) {
  require(a.rows() == b.size() && a.cols() == c.size(), ErrorCode::InvalidArgument,
          "linear program dimensions disagree");
  require(a.allFinite() && b.allFinite() && c.allFinite(), ErrorCode::Numeric,
          "linear program has non-finite data");
  const Index m = a.rows();
  const Index n = a.cols();
  const std::size_t max_iter =
      options.max_iterations > 0 ? options.max_iterations : 50 * static_cast<std::size_t>(m + n);

  Tableau tab(a, b);
  // Phase 1: minimise the sum of artificials.
  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  std::size_t iterations = tab.optimize(n + m, max_iter, 0);

  const double infeasibility = -tab.t()(m, tab.rhs());
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (infeasibility > options.feasibility_tol * scale) {
    std::ostringstream msg;
    msg << "linear program infeasible: phase-one residual " << infeasibility << " after "
        << iterations << " iterations";
    fail(ErrorCode::Solver, msg.str());
  }

  // Drive zero-level artificials out of the basis; rows with no usable pivot
  // are redundant constraints and are dropped.
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] < n) continue;
    Index col = -1;
    double best = 1e-9;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.t()(i, j)) > best) {
        best = std::abs(tab.t()(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
    } else {
      tab.active()[static_cast<std::size_t>(i)] = false;
    }
  }

  // Phase 2 over the original columns only.
  tab.set_objective(c);
  iterations = tab.optimize(n, max_iter, iterations);

  SimplexResult out;
  out.x = Vector::Zero(n);
  for (Index i = 0; i < m; ++i) {
    if (!tab.active()[static_cast<std::size_t>(i)]) continue;
    const Index col = tab.basis()[static_cast<std::size_t>(i)];
    if (col < n) out.x(col) = std::max(0.0, tab.t()(i, tab.rhs()));
  }
  out.objective = c.dot(out.x);
  out.iterations = iterations;
  return out;
}

}  // namespace riskmono::lp
