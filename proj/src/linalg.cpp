#include "riskmono/linalg.hpp"

#include "riskmono/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskmono::linalg {

namespace {

bool use_gram(const Matrix& x, SvdRoute route) {
  switch (route) {
    case SvdRoute::Svd: return false;
    case SvdRoute::Gram: return true;
    case SvdRoute::Auto: break;
  }
  const Index lo = std::min(x.rows(), x.cols());
  return lo >= 48 && x.rows() * x.cols() > 40000;
}

ThinSvd truncate(Matrix u, Vector s, Matrix v, double rtol) {
  Index rank = 0;
  const double smax = s.size() > 0 ? s.maxCoeff() : 0.0;
  if (smax > 0.0) {
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) > rtol * smax) ++rank;
    }
  }
  // Sort descending so the retained block is the leading one.
  std::vector<Index> order(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });
  ThinSvd out;
  out.u.resize(u.rows(), rank);
  out.v.resize(v.rows(), rank);
  out.s.resize(rank);
  for (Index k = 0; k < rank; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.u.col(k) = u.col(src);
    out.v.col(k) = v.col(src);
    out.s(k) = s(src);
  }
  return out;
}

ThinSvd gram_svd(const Matrix& x) {
  const Index n = x.rows();
  const Index p = x.cols();
  const bool wide = p > n;
  const Index m = wide ? n : p;
  Matrix gram = Matrix::Zero(m, m);
  if (wide) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram.selfadjointView<Eigen::Lower>());
  require(eig.info() == Eigen::Success, ErrorCode::Solver, "Gram eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  const double rtol = pinv_rtol(n, p);
  // Eigenvalues of the Gram matrix carry absolute error ~ eps * m * lmax, so
  // the effective cutoff cannot go below that floor.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m);
  const double cut = std::max(rtol * rtol, floor) * lmax;
  Index rank = 0;
  for (Index i = 0; i < m; ++i) {
    if (lmax > 0.0 && lambda(i) > cut) ++rank;
  }
  ThinSvd out;
  out.s.resize(rank);
  out.u.resize(n, rank);
  out.v.resize(p, rank);
  // Eigen returns eigenvalues ascending; emit descending.
  for (Index k = 0; k < rank; ++k) {
    const Index src = m - 1 - k;
    const double sv = std::sqrt(lambda(src));
    out.s(k) = sv;
    if (wide) {
      out.u.col(k) = eig.eigenvectors().col(src);
      out.v.col(k) = x.transpose() * out.u.col(k) / sv;
    } else {
      out.v.col(k) = eig.eigenvectors().col(src);
      out.u.col(k) = x * out.v.col(k) / sv;
    }
  }
  return out;
}

}  // namespace

double pinv_rtol(Index n, Index p) noexcept {
  return 1e-12 * static_cast<double>(std::max(n, p));
}

ThinSvd thin_svd(const Matrix& x, SvdRoute route) {
  require(x.allFinite(), ErrorCode::Numeric, "matrix contains non-finite entries");
  if (x.rows() == 0 || x.cols() == 0) {
    return ThinSvd{Matrix(x.rows(), 0), Vector(0), Matrix(x.cols(), 0)};
  }
  if (use_gram(x, route)) return gram_svd(x);
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  require(svd.info() == Eigen::Success, ErrorCode::Solver, "singular value decomposition failed");
  return truncate(svd.matrixU(), svd.singularValues(), svd.matrixV(),
                  pinv_rtol(x.rows(), x.cols()));
}

Vector min_norm_solve(const Matrix& x, const Vector& y, SvdRoute route) {
  require(y.size() == x.rows(), ErrorCode::InvalidArgument, "dimension mismatch in least squares");
  require(y.allFinite(), ErrorCode::Numeric, "response contains non-finite entries");
  if (x.rows() == 0) return Vector::Zero(x.cols());
  const ThinSvd svd = thin_svd(x, route);
  const Vector coef = (svd.u.transpose() * y).cwiseQuotient(svd.s);
  return svd.v * coef;
}

}  // namespace riskmono::linalg
