#pragma once

#include "riskmono/core.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace riskmono {

/// How test losses are centred into a risk estimate: plain average or
/// median-of-means with B = ceil(8 ln(1/eta)) batches.
struct CenteringMethod {
  enum class Kind { Avg, Mom };
  Kind kind = Kind::Avg;
  double eta = 0.0;

  static CenteringMethod avg() { return {Kind::Avg, 0.0}; }
  static CenteringMethod mom(double eta);

  std::size_t batches() const;
};

/// ceil(8 ln(1/eta)) for eta in (0, 1). Values of 8 ln(1/eta) within 1e-9 of an
/// integer are treated as that integer, so eta = exp(-k/8) gives exactly k.
std::size_t mom_batch_count(double eta);

struct RiskEstimate {
  double value = 0.0;
  std::size_t n_te = 0;
  CenteringMethod method;
  /// Standard error of `value` when it is a plain Monte-Carlo average.
  double std_error = std::numeric_limits<double>::quiet_NaN();
};

std::vector<double> test_losses(const LinearPredictor& pred, const Dataset& test, LossKind loss);

/// Median of the means of `batches` contiguous blocks; the first n % B blocks
/// hold one extra element. Even batch counts average the two middle means.
double median_of_means(std::span<const double> values, std::size_t batches);

RiskEstimate estimate_risk_avg(const LinearPredictor& pred, const Dataset& test, LossKind loss);
RiskEstimate estimate_risk_mom(const LinearPredictor& pred, const Dataset& test, LossKind loss,
                               double eta);
RiskEstimate estimate_risk(const LinearPredictor& pred, const Dataset& test, LossKind loss,
                           const CenteringMethod& cen);

/// Linear model with isotropic standard-normal features:
/// Y = X^T beta + noise, noise ~ N(0, sigma2).
struct LinearModel {
  Vector beta;
  double sigma2 = 1.0;
};

/// Closed-form conditional squared risk ||beta_hat - beta||^2 + sigma2.
double conditional_risk(const LinearPredictor& pred, const LinearModel& model);

/// (beta_hat - beta)^T Sigma (beta_hat - beta) + sigma2 for a general covariance.
double conditional_risk(const LinearPredictor& pred, const Vector& beta, const Matrix& covariance,
                        double sigma2);

/// Average squared loss on n_mc fresh draws from `model`.
RiskEstimate mc_true_risk(const LinearPredictor& pred, const LinearModel& model, std::size_t n_mc,
                          std::uint64_t seed);

struct DeltaDiagnostics {
  double delta_add = 0.0;
  double delta_mul = 0.0;
};

/// delta_add = max |Rhat - R|, delta_mul = max |Rhat / R - 1|. A zero true
/// risk throws Error(Domain) unless `multiplicative` is false, in which case
/// delta_mul is reported as NaN.
DeltaDiagnostics delta_diagnostics(std::span<const RiskEstimate> estimates,
                                   std::span<const double> true_risks, bool multiplicative = true);

/// Upper bounds on the risk of the selected predictor implied by the
/// deterministic oracle inequalities, given the best candidate true risk.
struct OracleBounds {
  double additive = 0.0;
  double multiplicative = 0.0;

  bool satisfied_by(double selected_risk, double slack = 1e-10) const;
};

OracleBounds oracle_bounds(double min_true_risk, const DeltaDiagnostics& deltas);

}  // namespace riskmono
