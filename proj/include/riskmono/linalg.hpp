#pragma once

#include "riskmono/core.hpp"

namespace riskmono::linalg {

/// How the singular system of X is obtained.
///   Svd  - divide-and-conquer SVD of X itself.
///   Gram - symmetric eigendecomposition of the smaller Gram matrix (XX^T or
///          X^T X); same singular vectors, squared conditioning, much faster
///          for the wide matrices the risk sweeps produce.
///   Auto - Svd for small problems, Gram otherwise.
enum class SvdRoute { Auto, Svd, Gram };

/// Relative singular-value cutoff 1e-12 * max(n, p).
double pinv_rtol(Index n, Index p) noexcept;

/// Rank-truncated thin SVD: X = U diag(s) V^T with s > rtol * s_max.
struct ThinSvd {
  Matrix u;
  Vector s;
  Matrix v;
  Index rank() const noexcept { return s.size(); }
};

ThinSvd thin_svd(const Matrix& x, SvdRoute route = SvdRoute::Auto);

/// Minimum l2-norm least-squares solution X^+ y.
Vector min_norm_solve(const Matrix& x, const Vector& y, SvdRoute route = SvdRoute::Auto);

}  // namespace riskmono::linalg
