#include "helpers.hpp"
#include "riskmono/error.hpp"
#include "riskmono/predictors.hpp"
#include "riskmono/profiles.hpp"
#include "riskmono/risk_estimation.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace riskmono;
using namespace riskmono::profiles;

namespace {

const Spectrum kIso = Spectrum::point_mass(1.0);

double normal_quantile(double u) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Stratified standard-normal nodes.
std::vector<double> normal_nodes(int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = normal_quantile((i + 0.5) / n);
  return z;
}

double soft(double x, double t) { return x > t ? x - t : (x < -t ? x + t : 0.0); }

// Excess risk of the isotropic mn2ls one-step ingredient in terms of
// t1 = 1/zeta1 and t2 = 1/zeta2.
double excess_t(double t1, double t2, double s) {
  double e1;
  if (t1 == 0.0) e1 = s;
  else if (t1 < 1.0) e1 = s * (1 - t1) + t1 / (1 - t1);
  else if (t1 > 1.0) e1 = 1 / (t1 - 1);
  else return std::numeric_limits<double>::infinity();
  if (t2 == 0.0) return e1;
  if (t2 < 1.0) return e1 * (1 - t2) + t2 / (1 - t2);
  if (t2 > 1.0) return 1 / (t2 - 1);
  return std::numeric_limits<double>::infinity();
}

double grid_optimum(double gamma, double s, int k) {
  const double budget = 1.0 / gamma;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= k; ++i) {
    const double t1 = budget * i / k;
    for (int j = 0; j <= k - i; ++j) best = std::min(best, excess_t(t1, budget * j / k, s));
  }
  return best;
}

}  // namespace

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(Spectrum({{1.0, 0.5}}), Error);
  CHECK_THROWS_AS(Spectrum({{-1.0, 1.0}}), Error);
  CHECK_THROWS_AS(Spectrum({{1.0, 1.5}, {2.0, -0.5}}), Error);
  const Spectrum s({{0.5, 0.25}, {2.0, 0.75}});
  CHECK(s.min_value() == 0.5);
  CHECK(s.max_value() == 2.0);
  CHECK(s.integrate([](double r) { return r; }) == doctest::Approx(1.625));
}

TEST_CASE("isotropic fixed points") {
  for (double phi : {1.1, 1.5, 2.0, 5.0, 10.0, 100.0}) {
    const auto st = solve_v(phi, kIso);
    CHECK(std::abs(st.v - 1 / (phi - 1)) < 1e-9);
    CHECK(std::abs(st.tvg - 1 / (phi - 1)) < 1e-9);
    CHECK(std::abs(st.tv - phi / std::pow(phi - 1, 3)) < 1e-9);
  }
  CHECK(solve_v(2.0, kIso).v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solve_v(1.1, kIso).v == doctest::Approx(10.0).epsilon(1e-10));
  CHECK_THROWS_AS(solve_v(0.5, kIso), Error);
  CHECK_THROWS_AS(solve_v(std::nan(""), kIso), Error);
}

TEST_CASE("two-atom fixed point against an independent bisection") {
  const Spectrum h({{0.5, 0.5}, {2.0, 0.5}});
  const double phi = 2.0;
  auto f = [&](double v) { return 0.5 * v * 0.5 / (1 + v * 0.5) + 0.5 * v * 2 / (1 + v * 2) - 1 / phi; };
  double lo = 1e-12, hi = 1e6;
  for (int i = 0; i < 300; ++i) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(solve_v(phi, h).v - lo) < 1e-10);
}

TEST_CASE("mn2ls profile values") {
  const ModelEnergy e{4.0, 1.0};
  CHECK(mn2ls_profile(2.0, e, kIso, kIso) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(mn2ls_profile(kInf, e, kIso, kIso) == 5.0);
  CHECK(mn2ls_profile(0.5, {4.0, 1.0}, kIso, kIso) == doctest::Approx(2.0));
  CHECK(std::isinf(mn2ls_profile(1.0, e, kIso, kIso)));
  for (double phi : {0.3, 1.3, 2.5, 7.0, 40.0}) {
    CHECK(mn2ls_profile(phi, e, kIso, kIso) == doctest::Approx(mn2ls_profile_isotropic(phi, 4, 1)).epsilon(1e-10));
  }
  // Splitting an atom changes nothing.
  const Spectrum split({{1.0, 0.3}, {1.0, 0.7}});
  CHECK(mn2ls_profile(3.0, e, split, split) == doctest::Approx(mn2ls_profile_isotropic(3.0, 4, 1)).epsilon(1e-10));
}

TEST_CASE("anisotropic mn2ls profile against simulation") {
  // Sigma has eigenvalues 0.5 and 2 in equal proportion; beta isotropic, so G = H.
  const Spectrum h({{0.5, 0.5}, {2.0, 0.5}});
  const double rho2 = 2.0, sigma2 = 1.0;
  const Index n = 300, p = 600;
  Vector scale(p);
  for (Index j = 0; j < p; ++j) scale(j) = j % 2 ? 2.0 : 0.5;
  double total = 0;
  const int reps = 6;
  for (int r = 0; r < reps; ++r) {
    Matrix x = testutil::gaussian(n, p, derive_seed(r, "x"));
    for (Index j = 0; j < p; ++j) x.col(j) *= std::sqrt(scale(j));
    const Vector beta = testutil::gaussian_vec(p, derive_seed(r, "b")) * std::sqrt(rho2 / p);
    const Vector y = x * beta + testutil::gaussian_vec(n, derive_seed(r, "e")) * std::sqrt(sigma2);
    const Vector diff = fit_mn2ls(Dataset(x, y)).coefficients - beta;
    total += diff.dot(scale.asDiagonal() * diff) + sigma2;
  }
  const double analytic = mn2ls_profile(2.0, {rho2, sigma2}, h, h);
  CHECK(std::abs(total / reps - analytic) < 0.05 * analytic);
}

TEST_CASE("mn1ls moments against quadrature") {
  const Mn1lsPrior prior{0.1, 3.0};
  const auto z = normal_nodes(200000);
  for (auto [tau, alpha] : {std::pair{1.0, 0.5}, {2.0, 1.3}, {0.7, 2.2}}) {
    double mse = 0, exceed = 0;
    for (double zi : z) {
      for (auto [theta, w] : {std::pair{0.0, 0.9}, {3.0, 0.1}}) {
        const double obs = theta + tau * zi;
        const double d = soft(obs, alpha * tau) - theta;
        mse += w * d * d;
        exceed += w * (std::abs(obs) > alpha * tau ? 1.0 : 0.0);
      }
    }
    mse /= static_cast<double>(z.size());
    exceed /= static_cast<double>(z.size());
    const auto m = mn1ls_moments(tau, alpha, prior);
    CHECK(m.mse == doctest::Approx(mse).epsilon(1e-4));
    CHECK(m.exceed == doctest::Approx(exceed).epsilon(1e-4));
  }
}

TEST_CASE("mn1ls profile values") {
  CHECK(mn1ls_profile(kInf, Mn1lsPrior{0.01, 20.0}, 1.0) == 5.0);
  CHECK(mn1ls_profile(0.8, Mn1lsPrior{0.01, 20.0}, 1.0) == doctest::Approx(5.0));
  CHECK(std::isinf(mn1ls_profile(1.0, Mn1lsPrior{0.01, 20.0}, 1.0)));
}

TEST_CASE("mn1ls state against a quadrature and grid search oracle") {
  const double eps = 0.005, sigma2 = 1.0, phi = 2.0;
  const Mn1lsPrior prior{eps, 2.0 / std::sqrt(eps)};
  const auto z = normal_nodes(20000);
  auto moments = [&](double tau, double alpha) {
    double mse = 0, exceed = 0;
    for (double zi : z) {
      for (auto [theta, w] : {std::pair{0.0, 1 - eps}, {prior.magnitude, eps}}) {
        const double obs = theta + tau * zi;
        const double d = soft(obs, alpha * tau) - theta;
        mse += w * d * d;
        exceed += w * (std::abs(obs) > alpha * tau ? 1.0 : 0.0);
      }
    }
    return std::pair{mse / z.size(), exceed / z.size()};
  };
  auto alpha_for = [&](double tau) {
    double lo = 0, hi = 20;
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (lo + hi);
      (moments(tau, mid).second > 1 / phi ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto gap = [&](double tau) { return std::abs(sigma2 + moments(tau, alpha_for(tau)).first - tau * tau); };
  double best_tau = 1, best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 60; ++i) {
    const double tau = 1.0 + 4.0 * i / 60;
    if (double g = gap(tau); g < best_gap) best_gap = g, best_tau = tau;
  }
  const double width = 4.0 / 60;
  for (int i = 0; i <= 40; ++i) {
    const double tau = best_tau - width + 2 * width * i / 40;
    if (double g = gap(tau); g < best_gap) best_gap = g, best_tau = tau;
  }
  const auto st = solve_mn1ls_state(phi, prior, sigma2);
  CHECK(st.tau2 == doctest::Approx(best_tau * best_tau).epsilon(0.01));
  CHECK(st.residual_tau < 1e-8 * st.tau2);
  CHECK(st.residual_alpha < 1e-10);
}

TEST_CASE("design-scaled mn1ls normalization") {
  const Mn1lsPrior prior{0.01, 20.0};
  const auto printed = solve_mn1ls_state(3.0, prior, 1.0, Mn1lsNormalization::Printed);
  const auto scaled = solve_mn1ls_state(3.0, prior, 1.0, Mn1lsNormalization::DesignScaled);
  CHECK(scaled.residual_alpha < 1e-10);
  CHECK(printed.tau2 != doctest::Approx(scaled.tau2));
  CHECK(mn1ls_profile(kInf, prior, 1.0, Mn1lsNormalization::DesignScaled) == 5.0);
}

TEST_CASE("one-step profile conventions") {
  const ModelEnergy e{4.0, 1.0};
  CHECK(onestep_profile(2.0, kInf, 3.7, e, kIso, kIso) == 3.7);
  for (double p2 : {1.2, 2.0, 9.0}) {
    CHECK(upsilon_b(p2, kIso, kIso) == doctest::Approx(1 - 1 / p2).epsilon(1e-12));
    const double r = 3.3;
    const double expected = r * (1 - 1 / p2) + 1.0 * (1 / p2 + 1 / (p2 - 1));
    CHECK(onestep_profile(1.5, p2, r, e, kIso, kIso) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("one-step profile matches the iterated formula on a grid") {
  const ModelEnergy e{4.0, 1.0};
  for (int i = 0; i < 20; ++i) {
    const double p1 = 1.05 + (50 - 1.05) * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double p2 = 1.05 + (50 - 1.05) * j / 19.0;
      const double general = onestep_profile(p1, p2, mn2ls_profile_isotropic(p1, 4, 1), e, kIso, kIso);
      CHECK(std::abs(general - mn2ls_onestep_iterated(p1, p2, 4, 1)) < 1e-10);
    }
  }
}

TEST_CASE("snr star") { CHECK(std::abs(snr_star() - 10.7041) < 1e-3); }

TEST_CASE("optimized one-step examples") {
  CHECK(optimize_onestep_iso(0.25, 1.0).excess_risk == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(optimize_onestep_iso(3.0, 1.0).excess_risk == doctest::Approx(1.0).epsilon(1e-12));
  const auto flat = optimize_onestep_iso(1.01, 4.0);
  CHECK(flat.branch == OneStepBranch::Unconstrained);
  CHECK(flat.excess_risk == doctest::Approx(2 * std::sqrt(3.0) - 1).epsilon(1e-12));
}

TEST_CASE("optimized one-step against a constrained grid search") {
  for (auto [gamma, s] : {std::pair{0.5, 4.0}, {0.9, 20.0}, {1.2, 4.0}, {1.5, 4.0}, {1.5, 20.0},
                          {2.0, 4.0}, {3.0, 4.0}, {2.0, 1.0}, {0.7, 0.5}, {5.0, 12.0}, {0.3, 50.0}}) {
    const auto opt = optimize_onestep_iso(gamma, s);
    const double grid = grid_optimum(gamma, s, 1500);
    INFO("gamma " << gamma << " snr " << s);
    CHECK(opt.excess_risk <= grid + 1e-12);
    CHECK(opt.excess_risk >= grid - 2e-3 * std::max(1.0, grid));
    const double t1 = std::isinf(opt.zeta1) ? 0.0 : 1 / opt.zeta1;
    const double t2 = std::isinf(opt.zeta2) ? 0.0 : 1 / opt.zeta2;
    CHECK(t1 + t2 <= 1 / gamma + 1e-12);
    CHECK(excess_t(t1, t2, s) == doctest::Approx(opt.excess_risk).epsilon(1e-9));
  }
}

TEST_CASE("gamma star threshold above snr star") {
  const double s = 20.0;
  const auto at = optimize_onestep_iso(0.5, s);
  REQUIRE(std::isfinite(at.gamma_star));
  const double gs = at.gamma_star;
  CHECK(optimize_onestep_iso(gs * 0.98, s).branch == OneStepBranch::Underparameterized);
  CHECK(optimize_onestep_iso(std::min(0.999, gs * 1.02), s).branch != OneStepBranch::Underparameterized);
  CHECK(std::isnan(optimize_onestep_iso(0.5, 4.0).gamma_star));
}

TEST_CASE("monotonized profile") {
  auto increasing = [](double z) { return std::isinf(z) ? kInf : z; };
  CHECK(monotonize_profile(2.5, increasing) == doctest::Approx(2.5));
  auto constant = [](double) { return 3.0; };
  for (double g : {0.1, 1.0, 100.0}) CHECK(monotonize_profile(g, constant) == 3.0);

  auto mn2 = [](double z) { return mn2ls_profile_isotropic(z, 4, 1); };
  const double at_one = monotonize_profile(1.0, mn2);
  CHECK(at_one < 5.0);
  CHECK(at_one < mn2(1.05));
  // The isotropic minimum over zeta > 1 sits at sqrt(snr)/(sqrt(snr) - 1) = 2 with value 4.
  CHECK(at_one == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(monotonize_profile(3.0, mn2) == doctest::Approx(mn2(3.0)).epsilon(1e-12));
  auto no_null = [&](double z) { return std::isinf(z) ? std::nan("") : mn2(z); };
  CHECK(monotonize_profile(1e7, no_null) == doctest::Approx(mn2(1e7)));
}
