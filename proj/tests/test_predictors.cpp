#include "helpers.hpp"
#include "riskmono/predictors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace riskmono;

namespace {

// Smallest l1 norm over all basic solutions X_S beta_S = y with |S| = rank(X) = n.
double l1_vertex_oracle(const Matrix& x, const Vector& y) {
  const Index n = x.rows(), p = x.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(p), 0);
  std::fill(pick.end() - n, pick.end(), 1);
  do {
    Matrix sub(n, n);
    Index k = 0;
    for (Index j = 0; j < p; ++j)
      if (pick[static_cast<std::size_t>(j)]) sub.col(k++) = x.col(j);
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() < n) continue;
    best = std::min(best, lu.solve(y).lpNorm<1>());
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_CASE("mn2ls examples") {
  Vector y(3);
  y << 1, 2, 3;
  CHECK((fit_mn2ls(Dataset(Matrix::Identity(3, 3), y)).coefficients - y).norm() < 1e-12);

  Matrix x(1, 2);
  x << 1, 2;
  Vector y1(1);
  y1 << 2;
  const Vector b = fit_mn2ls(Dataset(x, y1)).coefficients;
  // x^T (x x^T)^{-1} y
  const Vector oracle = x.transpose() * ((x * x.transpose()).inverse() * y1);
  CHECK(b(0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(b(1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK((b - oracle).norm() < 1e-12);
}

TEST_CASE("mn2ls equals OLS for tall full-rank designs") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Dataset d = testutil::gaussian_data(40, 6 + static_cast<Index>(s), s);
    const Matrix& x = d.features();
    const Vector ols = (x.transpose() * x).ldlt().solve(x.transpose() * d.response());
    CHECK((fit_mn2ls(d).coefficients - ols).norm() < 1e-8);
  }
}

TEST_CASE("mn2ls wide designs interpolate with minimum norm") {
  const Dataset d = testutil::gaussian_data(10, 40, 3);
  const Vector b = fit_mn2ls(d).coefficients;
  CHECK((d.features() * b - d.response()).norm() < 1e-9);
  // b lies in the row space of X.
  const Matrix& x = d.features();
  const Vector proj = x.transpose() * (x * x.transpose()).ldlt().solve(x * b);
  CHECK((proj - b).norm() < 1e-9);
}

TEST_CASE("mn1ls examples") {
  Matrix x(1, 2);
  x << 1, 2;
  Vector y(1);
  y << 2;
  const Vector b = fit_mn1ls(Dataset(x, y)).coefficients;
  CHECK(b(0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(b(1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b.lpNorm<1>() == doctest::Approx(1.0));

  Vector y2(2);
  y2 << 1, -1;
  const Vector b2 = fit_mn1ls(Dataset(Matrix::Identity(2, 2), y2)).coefficients;
  CHECK((b2 - y2).norm() < 1e-12);
}

TEST_CASE("mn1ls matches vertex enumeration") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    CounterRng rng(derive_seed(5, "mn1", s));
    const Index n = 1 + static_cast<Index>(rng.below(5));
    const Index p = n + 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(8 - n)));
    const Dataset d = testutil::gaussian_data(n, p, derive_seed(5, "data", s));
    const Vector b = fit_mn1ls(d).coefficients;
    CHECK((d.features() * b - d.response()).lpNorm<Eigen::Infinity>() < 1e-7);
    CHECK(b.lpNorm<1>() == doctest::Approx(l1_vertex_oracle(d.features(), d.response())).epsilon(1e-7));
  }
}

TEST_CASE("mn1ls on a rank-deficient design minimizes l1 over the least-squares set") {
  // Two identical columns: the l1 norm is indifferent to the split, the fit is not.
  Matrix x(4, 3);
  x << 1, 1, 0, 2, 2, 1, 0, 0, 1, 1, 1, 1;
  const Vector y = testutil::gaussian_vec(4, 2);
  const Vector b = fit_mn1ls(Dataset(x, y)).coefficients;
  const Vector ls = x.completeOrthogonalDecomposition().solve(y);
  CHECK((x * b - x * ls).norm() < 1e-8);
  CHECK(b.lpNorm<1>() <= ls.lpNorm<1>() + 1e-9);
}

TEST_CASE("ridge examples") {
  Vector y(2);
  y << 2, 2;
  const Vector b = fit_ridge(Dataset(Matrix::Identity(2, 2), y), 1.0).coefficients;
  // (X^T X / m + lambda I)^{-1} X^T Y / m with m = 2
  const Matrix a = Matrix::Identity(2, 2) / 2.0 + Matrix::Identity(2, 2);
  const Vector oracle = a.inverse() * (y / 2.0);
  CHECK((b - oracle).norm() < 1e-12);

  const Dataset d = testutil::gaussian_data(30, 5, 8);
  const Vector big = fit_ridge(d, 1e12).coefficients;
  const double scale = (d.features().transpose() * d.response() / 30.0).norm();
  CHECK(big.norm() < 1e-6 * scale);

  const Matrix& x = d.features();
  const Vector ols = (x.transpose() * x).ldlt().solve(x.transpose() * d.response());
  CHECK((fit_ridge(d, 1e-10).coefficients - ols).norm() < 1e-5 * ols.norm());
}

TEST_CASE("ridge primal and dual forms agree") {
  const Dataset wide = testutil::gaussian_data(15, 40, 21);
  const Matrix& x = wide.features();
  const double lambda = 0.3, m = 15;
  const Vector primal =
      (x.transpose() * x / m + lambda * Matrix::Identity(40, 40)).ldlt().solve(x.transpose() * wide.response() / m);
  CHECK((fit_ridge(wide, lambda).coefficients - primal).norm() < 1e-9);
}

TEST_CASE("lasso examples") {
  const Dataset d = testutil::gaussian_data(20, 6, 4);
  const double lmax = (d.features().transpose() * d.response() / 20.0).lpNorm<Eigen::Infinity>();
  CHECK(fit_lasso(d, lmax * 1.0001).coefficients.isZero());

  // Orthogonal design scaled so X^T X / m = I.
  const Matrix q = testutil::gaussian(16, 4, 5).householderQr().householderQ() * Matrix::Identity(16, 4);
  const Matrix x = q * 4.0;
  const Vector y = testutil::gaussian_vec(16, 6);
  const Vector z = x.transpose() * y / 16.0;
  const double lambda = 0.2;
  const Vector b = fit_lasso(Dataset(x, y), lambda).coefficients;
  for (Index j = 0; j < 4; ++j) {
    const double oracle = std::copysign(std::max(std::abs(z(j)) - lambda, 0.0), z(j));
    CHECK(b(j) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("tiny-penalty lasso approaches the mn1ls objective") {
  const Dataset d = testutil::gaussian_data(3, 6, 12);
  const double lambda = 1e-8;
  auto objective = [&](const Vector& b) {
    return (d.response() - d.features() * b).squaredNorm() / 6.0 + lambda * b.lpNorm<1>();
  };
  const auto fitted = fit_lasso_detailed(d, lambda);
  const Vector mn1 = fit_mn1ls(d).coefficients;
  CHECK(std::abs(objective(fitted.predictor.coefficients) - objective(mn1)) < 1e-6);
}

TEST_CASE("lasso non-convergence is reported") {
  const Dataset d = testutil::gaussian_data(10, 30, 13);
  LassoOptions opts;
  opts.max_sweeps = 2;
  const auto fitted = fit_lasso_detailed(d, 1e-6, opts);
  CHECK_FALSE(fitted.converged);
  CHECK_FALSE(fit_lasso(d, 1e-6, opts).warnings.empty());
}

TEST_CASE("null predictor and dispatch") {
  const Dataset d = testutil::gaussian_data(5, 3, 1);
  CHECK(fit_null(d).coefficients.isZero());
  CHECK(fit_null(d).predict_one(Vector::Ones(3)) == 0.0);
  CHECK(parse_base_procedure("mn2").kind == BaseKind::Mn2ls);
  CHECK(parse_base_procedure("mn1ls").kind == BaseKind::Mn1ls);
  CHECK(parse_base_procedure("ridge", 0.5).lambda == 0.5);
  CHECK_THROWS(parse_base_procedure("svm"));
  CHECK(soft_threshold(3, 1) == 2);
  CHECK(soft_threshold(-3, 1) == -2);
  CHECK(soft_threshold(0.5, 1) == 0);
}
