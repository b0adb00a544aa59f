#include "riskmono/selftest.hpp"

#include "riskmono/core.hpp"
#include "riskmono/monotonize.hpp"
#include "riskmono/predictors.hpp"
#include "riskmono/profiles.hpp"
#include "riskmono/random.hpp"
#include "riskmono/risk_estimation.hpp"
#include "riskmono/simulation.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace riskmono {

namespace {

Matrix gaussian(Index n, Index p, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix x(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = rng.normal();
  return x;
}

Vector gaussian_vec(Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

SelftestCheck check(const std::string& name, const std::function<std::string()>& body) {
  SelftestCheck out{name, false, {}};
  try {
    out.detail = body();
    out.passed = out.detail.empty();
  } catch (const std::exception& e) {
    out.detail = std::string("exception: ") + e.what();
  }
  return out;
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  using namespace profiles;
  std::vector<SelftestCheck> out;

  out.push_back(check("isotropic fixed point", [] {
    for (double phi : {1.1, 1.5, 2.0, 5.0, 10.0, 100.0}) {
      const auto st = solve_v(phi, Spectrum::point_mass(1.0));
      const double err = std::max({std::abs(st.v - 1.0 / (phi - 1.0)), std::abs(st.tvg - 1.0 / (phi - 1.0)),
                                   std::abs(st.tv - phi / std::pow(phi - 1.0, 3))});
      if (err > 1e-9) return "phi " + num(phi) + " error " + num(err);
    }
    return std::string();
  }));

  out.push_back(check("snr star", [] {
    const double s = snr_star();
    return std::abs(s - 10.7041) < 1e-3 ? std::string() : "got " + num(s);
  }));

  out.push_back(check("null risk anchors", [] {
    const double a = mn2ls_profile(kInf, {4.0, 1.0}, Spectrum::point_mass(1.0), Spectrum::point_mass(1.0));
    const double b = mn1ls_profile(kInf, Mn1lsPrior{0.01, 20.0}, 1.0);
    return a == 5.0 && b == 5.0 ? std::string() : "got " + num(a) + ", " + num(b);
  }));

  out.push_back(check("mom batch counts", [] {
    for (int k = 1; k <= 20; ++k) {
      const double eta = std::exp(-k / 8.0);
      if (mom_batch_count(eta) != static_cast<std::size_t>(k)) return "eta = exp(-" + std::to_string(k) + "/8)";
    }
    const std::vector<double> v = {1, 2, 3, 1000};
    return median_of_means(v, 2) == 251.5 ? std::string() : "median of means example";
  }));

  out.push_back(check("mn2ls normal equations", [] {
    for (Index p : {3, 12}) {
      const Matrix x = gaussian(8, p, derive_seed(7, "x", static_cast<std::uint64_t>(p)));
      const Vector y = gaussian_vec(8, derive_seed(7, "y", static_cast<std::uint64_t>(p)));
      const Vector b = fit_mn2ls(Dataset(x, y)).coefficients;
      const double res = (x.transpose() * (x * b - y)).lpNorm<Eigen::Infinity>();
      if (res > 1e-8) return "p " + std::to_string(p) + " residual " + num(res);
    }
    return std::string();
  }));

  out.push_back(check("mn1ls interpolates", [] {
    const Matrix x = gaussian(4, 7, 11);
    const Vector y = gaussian_vec(4, 12);
    const Vector b = fit_mn1ls(Dataset(x, y)).coefficients;
    const double res = (x * b - y).lpNorm<Eigen::Infinity>();
    return res < 1e-7 ? std::string() : "residual " + num(res);
  }));

  out.push_back(check("one-step ingredient identity", [] {
    const Matrix x1 = gaussian(6, 10, 21), x2 = gaussian(5, 10, 22);
    const Vector y1 = gaussian_vec(6, 23), y2 = gaussian_vec(5, 24);
    const Dataset d1(x1, y1), d2(x2, y2);
    const Vector base = fit_mn2ls(d1).coefficients;
    const Vector direct = onestep_ingredient(BaseProcedure::mn2ls(), d1, d2).coefficients;
    const Matrix pinv2 = x2.completeOrthogonalDecomposition().pseudoInverse();
    const Vector closed = (Matrix::Identity(10, 10) - pinv2 * x2) * base + pinv2 * y2;
    const double dev = (direct - closed).lpNorm<Eigen::Infinity>();
    return dev < 1e-8 ? std::string() : "deviation " + num(dev);
  }));

  out.push_back(check("iterated one-step formula", [] {
    const Spectrum h = Spectrum::point_mass(1.0);
    for (double p1 : {1.2, 3.0, 20.0})
      for (double p2 : {1.1, 2.0, 40.0}) {
        const double base = mn2ls_profile_isotropic(p1, 4.0, 1.0);
        const double general = onestep_profile(p1, p2, base, {4.0, 1.0}, h, h);
        const double iterated = mn2ls_onestep_iterated(p1, p2, 4.0, 1.0);
        if (std::abs(general - iterated) > 1e-10) return "phi " + num(p1) + "," + num(p2);
      }
    return std::string();
  }));

  out.push_back(check("monotonized profile is non-decreasing", [] {
    auto prof = [](double z) { return mn2ls_profile_isotropic(z, 4.0, 1.0); };
    double prev = -kInf;
    for (double g : {0.2, 0.5, 0.9, 1.1, 2.0, 5.0}) {
      const double m = monotonize_profile(g, prof);
      if (m < prev - 1e-9) return "decrease at gamma " + num(g);
      if (m > 5.0 + 1e-12) return "above null risk at gamma " + num(g);
      prev = m;
    }
    return std::string();
  }));

  out.push_back(check("sweep determinism", [] {
    SweepConfig cfg;
    cfg.n = 40;
    cfg.gamma_grid = {0.5, 2.0};
    cfg.reps = 2;
    cfg.procedure = ProcedureKind::ZeroStep;
    cfg.model = DataModel::dense(2.0, 1.0, 1);
    cfg.mono.block = 8;
    cfg.master_seed = 5;
    cfg.threads = 1;
    const std::string a = curve_csv(run_sweep(cfg));
    cfg.threads = 2;
    const std::string b = curve_csv(run_sweep(cfg));
    return a == b ? std::string() : "outputs differ";
  }));

  return out;
}

}  // namespace riskmono
