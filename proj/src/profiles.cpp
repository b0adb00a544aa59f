#include "riskmono/profiles.hpp"

#include "riskmono/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace riskmono::profiles {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Bisection for a sign change of f on [lo, hi]; runs to floating-point
/// resolution of the bracket.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section minimisation of f on [a, b]; stops at relative width `rtol`.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double rtol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 500 && (b - a) > rtol * std::max(std::abs(a), std::abs(b)); ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double std_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

void check_energy(const ModelEnergy& e) {
  require(e.rho2 >= 0.0 && std::isfinite(e.rho2), ErrorCode::InvalidArgument,
          "signal energy must be finite and nonnegative");
  require(e.sigma2 > 0.0 && std::isfinite(e.sigma2), ErrorCode::InvalidArgument,
          "noise energy must be finite and positive");
}

}  // namespace

Spectrum::Spectrum(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  require(!atoms_.empty(), ErrorCode::InvalidArgument, "spectrum needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    require(a.value > 0.0 && std::isfinite(a.value), ErrorCode::InvalidArgument,
            "spectrum atoms must be finite and positive");
    require(a.weight >= 0.0 && std::isfinite(a.weight), ErrorCode::InvalidArgument,
            "spectrum weights must be nonnegative");
    total += a.weight;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "spectrum weights must sum to one");
}

double Spectrum::min_value() const noexcept {
  double m = atoms_.front().value;
  for (const auto& a : atoms_) m = std::min(m, a.value);
  return m;
}

double Spectrum::max_value() const noexcept {
  double m = atoms_.front().value;
  for (const auto& a : atoms_) m = std::max(m, a.value);
  return m;
}

FixedPointState solve_v(double phi, const Spectrum& h) {
  require(!std::isnan(phi), ErrorCode::Domain, "aspect ratio is NaN");
  require(phi > 1.0 && std::isfinite(phi), ErrorCode::Domain,
          "companion fixed point needs a finite aspect ratio above one");
  const double target = 1.0 / phi;
  auto excess = [&](double v) {
    return h.integrate([v](double r) { return v * r / (1.0 + v * r); }) - target;
  };
  double hi = 1.0;
  int grow = 0;
  while (excess(hi) <= 0.0) {
    hi *= 2.0;
    if (++grow > 2000 || !std::isfinite(hi)) {
      std::ostringstream msg;
      msg << "fixed point bracket failed for phi = " << phi << " (scanned up to v = " << hi << ")";
      fail(ErrorCode::Solver, msg.str());
    }
  }
  FixedPointState st;
  st.phi = phi;
  st.v = bisect(excess, 0.0, hi);
  st.residual = std::abs(excess(st.v));
  const double v = st.v;
  const double m1 = h.integrate([v](double r) { return r / ((1.0 + v * r) * (1.0 + v * r)); });
  const double m2 = h.integrate([v](double r) { return r * r / ((1.0 + v * r) * (1.0 + v * r)); });
  // Using the fixed-point identity, 1/v^2 - phi int r^2/(1+vr)^2 dH equals
  // phi int r/(v (1+vr)^2) dH, which avoids cancellation as phi -> 1.
  st.tv = v / (phi * m1);
  st.tvg = st.tv * phi * m2;
  return st;
}

double mn2ls_profile(double phi, const ModelEnergy& energy, const Spectrum& h, const Spectrum& g) {
  check_energy(energy);
  require(phi > 0.0, ErrorCode::Domain, "aspect ratio must be positive");
  if (phi < 1.0) return energy.sigma2 / (1.0 - phi);
  if (phi == 1.0) return kInf;
  if (std::isinf(phi)) {
    return energy.rho2 * g.integrate([](double r) { return r; }) + energy.sigma2;
  }
  const FixedPointState st = solve_v(phi, h);
  const double v = st.v;
  const double bias = g.integrate([v](double r) { return r / ((1.0 + v * r) * (1.0 + v * r)); });
  const double m2 = h.integrate([v](double r) { return r * r / ((1.0 + v * r) * (1.0 + v * r)); });
  return energy.rho2 * (1.0 + st.tvg) * bias + energy.sigma2 * (phi * st.tv * m2 + 1.0);
}

double mn2ls_profile_isotropic(double phi, double rho2, double sigma2) {
  require(phi > 0.0, ErrorCode::Domain, "aspect ratio must be positive");
  if (phi < 1.0) return sigma2 * (phi / (1.0 - phi)) + sigma2;
  if (phi == 1.0) return kInf;
  if (std::isinf(phi)) return rho2 + sigma2;
  return rho2 * (1.0 - 1.0 / phi) + sigma2 * (1.0 / (phi - 1.0)) + sigma2;
}

double mn2ls_onestep_iterated(double phi1, double phi2, double rho2, double sigma2) {
  const double base = mn2ls_profile_isotropic(phi1, rho2, sigma2);
  if (std::isinf(base)) return phi2 < 1.0 ? sigma2 / (1.0 - phi2) : kInf;
  return mn2ls_profile_isotropic(phi2, base - sigma2, sigma2);
}

Mn1lsMoments mn1ls_moments(double tau, double alpha, const Mn1lsPrior& prior) {
  require(tau > 0.0 && alpha >= 0.0, ErrorCode::Domain, "moments need tau > 0 and alpha >= 0");
  const double b = alpha * tau;
  Mn1lsMoments out;
  const Atom atoms[] = {{0.0, 1.0 - prior.epsilon}, {prior.magnitude, prior.epsilon}};
  for (const auto& [theta, w] : atoms) {
    // soft(theta + tau Z) - theta is tau Z - b above the threshold, tau Z + b
    // below its negative, and -theta in between.
    const double a = (b - theta) / tau;
    const double c = (-b - theta) / tau;
    const double sf_a = std_normal_sf(a);
    const double cdf_c = std_normal_cdf(c);
    const double pdf_a = std_normal_pdf(a);
    const double pdf_c = std_normal_pdf(c);
    const double upper = tau * tau * (sf_a + a * pdf_a) - 2.0 * b * tau * pdf_a + b * b * sf_a;
    const double lower = tau * tau * (cdf_c - c * pdf_c) - 2.0 * b * tau * pdf_c + b * b * cdf_c;
    const double middle = theta * theta * std::max(0.0, std_normal_cdf(a) - cdf_c);
    out.mse += w * (upper + lower + middle);
    out.exceed += w * (sf_a + cdf_c);
  }
  return out;
}

namespace {

void check_prior(const Mn1lsPrior& prior, double sigma2) {
  require(prior.epsilon > 0.0 && prior.epsilon < 1.0, ErrorCode::InvalidArgument,
          "sparsity epsilon must lie in (0, 1)");
  require(prior.magnitude > 0.0 && std::isfinite(prior.magnitude), ErrorCode::InvalidArgument,
          "prior magnitude must be positive");
  require(sigma2 > 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
          "noise energy must be positive");
}

}  // namespace

Mn1lsState solve_mn1ls_state(double phi, const Mn1lsPrior& prior, double sigma2,
                             Mn1lsNormalization norm) {
  check_prior(prior, sigma2);
  require(phi > 1.0 && std::isfinite(phi), ErrorCode::Domain,
          "the (tau, alpha) system needs a finite aspect ratio above one");
  const double target = 1.0 / phi;
  const bool scaled = norm == Mn1lsNormalization::DesignScaled;
  Mn1lsPrior theta = prior;
  if (scaled) theta.magnitude = prior.magnitude / std::sqrt(phi);
  const double mse_weight = scaled ? phi : 1.0;

  auto alpha_for = [&](double tau) {
    auto f = [&](double alpha) { return mn1ls_moments(tau, alpha, theta).exceed - target; };
    double hi = 1.0;
    int grow = 0;
    while (f(hi) >= 0.0) {
      hi *= 2.0;
      if (++grow > 200) {
        std::ostringstream msg;
        msg << "threshold bracket failed at tau = " << tau << " (alpha up to " << hi << ")";
        fail(ErrorCode::Solver, msg.str());
      }
    }
    return bisect(f, 0.0, hi);
  };
  auto outer = [&](double tau) {
    const double alpha = alpha_for(tau);
    return sigma2 + mse_weight * mn1ls_moments(tau, alpha, theta).mse - tau * tau;
  };

  const double lo = std::sqrt(sigma2);
  double hi = 2.0 * lo;
  int grow = 0;
  while (outer(hi) > 0.0) {
    hi *= 2.0;
    if (++grow > 200) {
      std::ostringstream msg;
      msg << "tau bracket failed for phi = " << phi << " (tau up to " << hi << ")";
      fail(ErrorCode::Solver, msg.str());
    }
  }
  Mn1lsState st;
  st.phi = phi;
  const double tau = outer(lo) <= 0.0 ? lo : bisect(outer, lo, hi);
  st.tau2 = tau * tau;
  st.alpha = alpha_for(tau);
  const Mn1lsMoments m = mn1ls_moments(tau, st.alpha, theta);
  st.residual_tau = std::abs(st.tau2 - sigma2 - mse_weight * m.mse);
  st.residual_alpha = std::abs(target - m.exceed);
  const double scale = std::max(1.0, st.tau2);
  if (st.residual_tau > 1e-8 * scale || st.residual_alpha > 1e-10) {
    std::ostringstream msg;
    msg << "(tau, alpha) system did not converge at phi = " << phi
        << ": residuals " << st.residual_tau << ", " << st.residual_alpha;
    fail(ErrorCode::Solver, msg.str());
  }
  return st;
}

double mn1ls_profile(double phi, const Mn1lsPrior& prior, double sigma2, Mn1lsNormalization norm) {
  check_prior(prior, sigma2);
  require(phi > 0.0, ErrorCode::Domain, "aspect ratio must be positive");
  if (phi < 1.0) return sigma2 / (1.0 - phi);
  if (phi == 1.0) return kInf;
  if (std::isinf(phi)) return sigma2 + prior.signal_energy();
  return solve_mn1ls_state(phi, prior, sigma2, norm).tau2;
}

double upsilon_b(double phi2, const Spectrum& h, const Spectrum& q) {
  const FixedPointState st = solve_v(phi2, h);
  const double v = st.v;
  return (1.0 + st.tvg) * q.integrate([v](double r) { return 1.0 / ((1.0 + v * r) * (1.0 + v * r)); });
}

double onestep_profile(double phi1, double phi2, double rdet_base_at_phi1, const ModelEnergy& energy,
                       const Spectrum& h, const Spectrum& q) {
  check_energy(energy);
  require(phi1 > 0.0 && phi2 > 0.0, ErrorCode::Domain, "aspect ratios must be positive");
  if (std::isinf(phi2)) return rdet_base_at_phi1;
  if (phi2 < 1.0) return energy.sigma2 / (1.0 - phi2);
  if (phi2 == 1.0) return kInf;
  if (std::isinf(rdet_base_at_phi1)) return kInf;
  const FixedPointState st = solve_v(phi2, h);
  const double v = st.v;
  const double ub =
      (1.0 + st.tvg) * q.integrate([v](double r) { return 1.0 / ((1.0 + v * r) * (1.0 + v * r)); });
  return rdet_base_at_phi1 * ub + energy.sigma2 * (1.0 - ub) + energy.sigma2 * st.tvg;
}

double snr_star() {
  static const double value = [] {
    auto f = [](double x) {
      const double c = std::sqrt(2.0 * std::sqrt(x) - 1.0);
      return 1.0 - 1.0 / (2.0 * c) - 1.0 / (2.0 - 1.0 / std::sqrt(x) - 1.0 / c);
    };
    const double lo = 2.0;
    const double hi = 100.0;
    require(f(lo) * f(hi) < 0.0, ErrorCode::Solver, "SNR* bracket [2, 100] has no sign change");
    return bisect(f, lo, hi);
  }();
  return value;
}

namespace {

// s (1 - 1/z) + 1/(z - 1) for z > 1 with the limits at z = 1 and z = inf.
double overparam_step(double z, double s) {
  if (std::isinf(z)) return s;
  if (z == 1.0) return kInf;
  return s * (1.0 - 1.0 / z) + 1.0 / (z - 1.0);
}

double lagrange_residual(double z1, double z2, double s) {
  const double a = z1 / (z1 - 1.0);
  const double b = z2 / (z2 - 1.0);
  return s * (1.0 / z1 - 1.0 / z2) - (a * a - b * b + (1.0 / (z1 - 1.0)) * (1.0 - (z1 / z2) * a));
}

struct Candidate {
  double z1;
  double z2;
  double value;
  OneStepBranch branch;
};

/// Optimum over zeta1, zeta2 > 1 (the overparameterized problem).
Candidate overparam_optimum(double gamma, double s, int* roots_found) {
  Candidate best{kInf, kInf, s, OneStepBranch::Null};
  auto consider = [&](double z1, double z2, OneStepBranch branch) {
    const double val = onestep_excess_iso(z1, z2, s);
    if (val < best.value) best = Candidate{z1, z2, val, branch};
  };
  if (roots_found) *roots_found = 0;
  if (s <= 1.0) return best;

  const double rs = std::sqrt(s);
  const double z1s = rs / (rs - 1.0);
  consider(std::max(z1s, gamma), kInf, OneStepBranch::ZeroStep);

  const double c = std::sqrt(2.0 * rs - 1.0);
  const double z2s = c / (c - 1.0);
  if (1.0 / z1s + 1.0 / z2s <= 1.0 / gamma) {
    consider(z1s, z2s, OneStepBranch::Unconstrained);
    return best;
  }

  // Active constraint: t = 1/zeta1, 1/zeta2 = 1/gamma - t, zeta1 > 1, zeta2 > 1.
  const double t_lo = std::max(0.0, 1.0 / gamma - 1.0);
  const double t_hi = std::min(1.0, 1.0 / gamma);
  if (!(t_hi > t_lo)) return best;
  auto z2_of = [gamma](double t) { return 1.0 / (1.0 / gamma - t); };
  auto objective = [&](double t) { return onestep_excess_iso(1.0 / t, z2_of(t), s); };
  auto residual = [&](double t) { return lagrange_residual(1.0 / t, z2_of(t), s); };

  constexpr int kScan = 4000;
  std::vector<double> ts(kScan);
  std::vector<double> vals(kScan);
  std::vector<double> res(kScan);
  const double width = t_hi - t_lo;
  for (int i = 0; i < kScan; ++i) {
    ts[i] = t_lo + width * (i + 1.0) / (kScan + 1.0);
    vals[i] = objective(ts[i]);
    res[i] = residual(ts[i]);
  }
  int roots = 0;
  for (int i = 0; i + 1 < kScan; ++i) {
    if (std::isfinite(res[i]) && std::isfinite(res[i + 1]) && (res[i] < 0.0) != (res[i + 1] < 0.0)) {
      const double t = bisect(residual, ts[i], ts[i + 1]);
      ++roots;
      consider(1.0 / t, z2_of(t), OneStepBranch::Lagrange);
    }
  }
  if (roots_found) *roots_found = roots;
  // Golden-section polish around every interior local minimum of the scan.
  for (int i = 0; i < kScan; ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i + 1 == kScan || vals[i] <= vals[i + 1];
    if (!left_ok || !right_ok || !std::isfinite(vals[i])) continue;
    const double a = i == 0 ? ts[i] : ts[i - 1];
    const double b = i + 1 == kScan ? ts[i] : ts[i + 1];
    const auto [t, val] = golden_min(objective, a, b, 1e-14);
    consider(1.0 / t, z2_of(t), OneStepBranch::Lagrange);
    (void)val;
  }
  return best;
}

}  // namespace

double onestep_excess_iso(double zeta1, double zeta2, double snr) {
  require(zeta1 > 0.0 && zeta2 > 0.0, ErrorCode::Domain, "split aspect ratios must be positive");
  if (zeta2 < 1.0) return zeta2 / (1.0 - zeta2);
  if (zeta2 == 1.0) return kInf;
  double base;
  if (zeta1 < 1.0) {
    base = zeta1 / (1.0 - zeta1);
  } else {
    base = overparam_step(zeta1, snr);
  }
  if (std::isinf(base)) return kInf;
  return overparam_step(zeta2, base);
}

std::string to_string(OneStepBranch branch) {
  switch (branch) {
    case OneStepBranch::Underparameterized: return "underparameterized";
    case OneStepBranch::Null: return "null";
    case OneStepBranch::ZeroStep: return "zero-step";
    case OneStepBranch::Unconstrained: return "unconstrained";
    case OneStepBranch::Lagrange: return "lagrange";
  }
  return "unknown";
}

OneStepOptimum optimize_onestep_iso(double gamma, double snr) {
  require(gamma > 0.0 && std::isfinite(gamma), ErrorCode::Domain, "gamma must be positive and finite");
  require(snr >= 0.0 && std::isfinite(snr), ErrorCode::Domain, "SNR must be finite and nonnegative");
  OneStepOptimum out;
  out.gamma = gamma;
  int roots = 0;
  const Candidate over = overparam_optimum(gamma, snr, &roots);
  out.lagrange_roots = roots;
  out.zeta1 = over.z1;
  out.zeta2 = over.z2;
  out.excess_risk = over.value;
  out.branch = over.branch;
  if (gamma < 1.0) {
    const double under = gamma / (1.0 - gamma);
    if (under <= out.excess_risk) {
      out.zeta1 = gamma;
      out.zeta2 = kInf;
      out.excess_risk = under;
      out.branch = OneStepBranch::Underparameterized;
    }
  }
  if (snr > snr_star()) {
    // gamma* is where gamma/(1-gamma) meets the overparameterized optimum,
    // which is non-decreasing in gamma.
    auto gap = [snr](double g) { return g / (1.0 - g) - overparam_optimum(g, snr, nullptr).value; };
    const double lo = 1e-12;
    const double hi = 1.0 - 1e-12;
    out.gamma_star = (gap(lo) < 0.0 && gap(hi) > 0.0) ? bisect(gap, lo, hi) : kNaN;
  }
  return out;
}

double monotonize_profile(double gamma, const Profile& profile) {
  require(gamma > 0.0, ErrorCode::Domain, "gamma must be positive");
  double best = kInf;
  double best_z = kNaN;
  auto consider = [&](double z, double val) {
    if (std::isfinite(val) && val < best) {
      best = val;
      best_z = z;
    }
  };
  consider(kInf, profile(kInf));
  if (std::isinf(gamma)) return best;

  constexpr int kScan = 400;
  constexpr double kUpper = 1e6;
  std::vector<double> zs;
  std::vector<double> vals;
  if (gamma >= kUpper) {
    zs.push_back(gamma);
  } else {
    const double lg = std::log(gamma);
    const double lu = std::log(kUpper);
    for (int i = 0; i < kScan; ++i) {
      zs.push_back(i == 0 ? gamma : std::exp(lg + (lu - lg) * i / (kScan - 1.0)));
    }
  }
  vals.reserve(zs.size());
  int best_scan = -1;
  double best_scan_val = kInf;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double val = profile(zs[i]);
    vals.push_back(val);
    consider(zs[i], val);
    if (std::isfinite(val) && val < best_scan_val) {
      best_scan_val = val;
      best_scan = static_cast<int>(i);
    }
  }
  if (best_scan >= 0 && zs.size() > 1) {
    const auto i = static_cast<std::size_t>(best_scan);
    const double a = i == 0 ? zs[0] : zs[i - 1];
    const double b = i + 1 == zs.size() ? zs[i] : zs[i + 1];
    auto in_log = [&](double u) {
      const double val = profile(std::exp(u));
      return std::isfinite(val) ? val : kInf;
    };
    const auto [u, val] = golden_min(in_log, std::log(a), std::log(b), 1e-6);
    consider(std::exp(u), val);
  }
  (void)best_z;
  return best;
}

}  // namespace riskmono::profiles
