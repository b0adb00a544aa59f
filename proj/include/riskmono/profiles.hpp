#pragma once

#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace riskmono::profiles {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double value = 1.0;
  double weight = 1.0;
};

/// Finite discrete distribution on (0, inf). Weights are nonnegative and sum
/// to one within 1e-12.
class Spectrum {
 public:
  explicit Spectrum(std::vector<Atom> atoms);
  Spectrum(std::initializer_list<Atom> atoms) : Spectrum(std::vector<Atom>(atoms)) {}

  static Spectrum point_mass(double value) { return Spectrum({Atom{value, 1.0}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Exact weighted sum of f over the atoms.
  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (const auto& a : atoms_) sum += a.weight * f(a.value);
    return sum;
  }

  double min_value() const noexcept;
  double max_value() const noexcept;

 private:
  std::vector<Atom> atoms_;
};

/// Covariance spectrum H, signal-projection distribution G, and the optional
/// one-step weighting distribution Q.
struct SpectralInputs {
  Spectrum h = Spectrum::point_mass(1.0);
  Spectrum g = Spectrum::point_mass(1.0);
  std::optional<Spectrum> q;
};

struct ModelEnergy {
  double rho2 = 0.0;
  double sigma2 = 1.0;

  double snr() const noexcept { return rho2 / sigma2; }
};

/// Companion fixed point v(0; phi) and the derived scalars tv, tvg.
struct FixedPointState {
  double phi = 0.0;
  double v = 0.0;
  double tv = 0.0;
  double tvg = 0.0;
  /// |1/phi - int v r / (1 + v r) dH| at the returned v.
  double residual = 0.0;
};

/// v > 0 with 1/phi = int v r / (1 + v r) dH(r), by bracketed bisection; phi > 1.
FixedPointState solve_v(double phi, const Spectrum& h);

/// Limiting squared risk of minimum l2-norm least squares at aspect ratio phi.
double mn2ls_profile(double phi, const ModelEnergy& energy, const Spectrum& h, const Spectrum& g);

/// Isotropic closed form: sigma2/(1-phi) below one, rho2(1-1/phi) + sigma2/(phi-1) + sigma2 above.
double mn2ls_profile_isotropic(double phi, double rho2, double sigma2);

/// Isotropic mn2ls one-step ingredient risk as mn2ls applied to the reduced
/// signal energy R(phi1) - sigma2 at aspect ratio phi2.
double mn2ls_onestep_iterated(double phi1, double phi2, double rho2, double sigma2);

/// Two-point prior: magnitude with probability epsilon, zero otherwise.
struct Mn1lsPrior {
  double epsilon = 0.01;
  double magnitude = 20.0;

  double signal_energy() const noexcept { return epsilon * magnitude * magnitude; }
};

/// E[(soft(Theta + tau Z; alpha tau) - Theta)^2] and P(|Theta + tau Z| > alpha tau).
struct Mn1lsMoments {
  double mse = 0.0;
  double exceed = 0.0;
};

Mn1lsMoments mn1ls_moments(double tau, double alpha, const Mn1lsPrior& prior);

/// Which normalization of the (tau, alpha) system to solve.
///   Printed      - tau^2 = sigma2 + E[(eta(Theta + tau Z; alpha tau) - Theta)^2]
///                  with Theta ~ eps delta_M + (1 - eps) delta_0.
///   DesignScaled - tau^2 = sigma2 + phi E[...] with Theta scaled by 1/sqrt(phi);
///                  the state evolution for standard-normal designs with
///                  coefficients M / sqrt(p), which is what simulations attain.
enum class Mn1lsNormalization { Printed, DesignScaled };

struct Mn1lsState {
  double phi = 0.0;
  double tau2 = 0.0;
  double alpha = 0.0;
  double residual_tau = 0.0;    // |tau^2 - sigma2 - mse|
  double residual_alpha = 0.0;  // |1/phi - exceed|
};

/// Solves the (tau, alpha) system for phi > 1: alpha by bisection on the
/// exceedance equation, tau by bisection on the outer equation.
Mn1lsState solve_mn1ls_state(double phi, const Mn1lsPrior& prior, double sigma2,
                             Mn1lsNormalization norm = Mn1lsNormalization::Printed);

/// Limiting squared risk of minimum l1-norm least squares.
double mn1ls_profile(double phi, const Mn1lsPrior& prior, double sigma2,
                     Mn1lsNormalization norm = Mn1lsNormalization::Printed);

/// (1 + tvg(phi2)) int 1 / (1 + v(phi2) r)^2 dQ(r).
double upsilon_b(double phi2, const Spectrum& h, const Spectrum& q);

/// Limiting risk of a one-step ingredient given the base risk at phi1.
double onestep_profile(double phi1, double phi2, double rdet_base_at_phi1, const ModelEnergy& energy,
                       const Spectrum& h, const Spectrum& q);

/// Root of the boundary equation separating the optimized one-step regimes
/// (approximately 10.7041); computed once and cached.
double snr_star();

/// Excess risk R / sigma2 - 1 of the isotropic mn2ls one-step ingredient at
/// split aspect ratios (zeta1, zeta2); either may be +inf.
double onestep_excess_iso(double zeta1, double zeta2, double snr);

enum class OneStepBranch {
  Underparameterized,  // zeta1 = gamma, zeta2 = inf
  Null,                // zeta1 = zeta2 = inf
  ZeroStep,            // zeta2 = inf, zeta1 > 1
  Unconstrained,       // interior optimum, constraint slack
  Lagrange,            // constraint 1/zeta1 + 1/zeta2 = 1/gamma active
};

std::string to_string(OneStepBranch branch);

struct OneStepOptimum {
  double gamma = 0.0;
  double zeta1 = kInf;
  double zeta2 = kInf;
  double excess_risk = 0.0;
  OneStepBranch branch = OneStepBranch::Null;
  /// Number of stationary points of the active-constraint problem found.
  int lagrange_roots = 0;
  /// Threshold below which gamma/(1-gamma) is optimal when snr > snr_star().
  double gamma_star = std::numeric_limits<double>::quiet_NaN();

  double risk(double sigma2) const noexcept { return sigma2 * (1.0 + excess_risk); }
};

/// Optimized one-step risk with the isotropic mn2ls base over
/// 1/zeta1 + 1/zeta2 <= 1/gamma.
OneStepOptimum optimize_onestep_iso(double gamma, double snr);

using Profile = std::function<double(double)>;

/// min over zeta in [gamma, inf] of profile(zeta): 400-point log scan up to
/// 1e6, an explicit evaluation at +inf, and golden-section refinement around
/// the best scan point. Non-finite values are skipped.
double monotonize_profile(double gamma, const Profile& profile);

}  // namespace riskmono::profiles
