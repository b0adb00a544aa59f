#include "riskmono/risk_estimation.hpp"

#include "riskmono/error.hpp"
#include "riskmono/random.hpp"

#include <algorithm>
#include <cmath>

namespace riskmono {

std::size_t mom_batch_count(double eta) {
  require(eta > 0.0 && eta < 1.0, ErrorCode::InvalidArgument, "MOM eta must lie in (0, 1)");
  const double raw = 8.0 * std::log(1.0 / eta);
  const double nearest = std::round(raw);
  const double b = std::abs(raw - nearest) <= 1e-9 ? nearest : std::ceil(raw);
  return static_cast<std::size_t>(std::max(1.0, b));
}

CenteringMethod CenteringMethod::mom(double eta) {
  mom_batch_count(eta);
  return {Kind::Mom, eta};
}

std::size_t CenteringMethod::batches() const {
  return kind == Kind::Avg ? 1 : mom_batch_count(eta);
}

std::vector<double> test_losses(const LinearPredictor& pred, const Dataset& test, LossKind loss) {
  require(pred.dim() == test.cols(), ErrorCode::InvalidArgument,
          "predictor dimension does not match test features");
  const Vector yhat = pred.predict(test.features());
  std::vector<double> out(static_cast<std::size_t>(test.rows()));
  for (Index i = 0; i < test.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = evaluate_loss(loss, test.response()(i), yhat(i));
  }
  return out;
}

namespace {

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double median_of_means(std::span<const double> values, std::size_t batches) {
  const std::size_t n = values.size();
  require(batches >= 1 && batches <= n, ErrorCode::InfeasibleEta,
          "median-of-means needs 1 <= B <= n (B = " + std::to_string(batches) +
              ", n = " + std::to_string(n) + ")");
  const std::size_t base = n / batches;
  const std::size_t extra = n % batches;
  std::vector<double> means;
  means.reserve(batches);
  std::size_t start = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    means.push_back(mean_of(values.subspan(start, len)));
    start += len;
  }
  std::sort(means.begin(), means.end());
  if (batches % 2 == 1) return means[batches / 2];
  return 0.5 * (means[batches / 2 - 1] + means[batches / 2]);
}

RiskEstimate estimate_risk_avg(const LinearPredictor& pred, const Dataset& test, LossKind loss) {
  require(!test.empty(), ErrorCode::InvalidArgument, "risk estimate needs a nonempty test set");
  const auto losses = test_losses(pred, test, loss);
  return RiskEstimate{mean_of(losses), losses.size(), CenteringMethod::avg()};
}

RiskEstimate estimate_risk_mom(const LinearPredictor& pred, const Dataset& test, LossKind loss,
                               double eta) {
  require(!test.empty(), ErrorCode::InvalidArgument, "risk estimate needs a nonempty test set");
  const std::size_t batches = mom_batch_count(eta);
  const auto n_te = static_cast<std::size_t>(test.rows());
  require(batches <= n_te, ErrorCode::InfeasibleEta,
          "eta = " + std::to_string(eta) + " implies B = " + std::to_string(batches) +
              " batches, more than the " + std::to_string(n_te) + " test rows");
  const auto losses = test_losses(pred, test, loss);
  return RiskEstimate{median_of_means(losses, batches), n_te, CenteringMethod{CenteringMethod::Kind::Mom, eta}};
}

RiskEstimate estimate_risk(const LinearPredictor& pred, const Dataset& test, LossKind loss,
                           const CenteringMethod& cen) {
  if (cen.kind == CenteringMethod::Kind::Avg) return estimate_risk_avg(pred, test, loss);
  return estimate_risk_mom(pred, test, loss, cen.eta);
}

double conditional_risk(const LinearPredictor& pred, const LinearModel& model) {
  require(pred.dim() == model.beta.size(), ErrorCode::InvalidArgument,
          "predictor dimension does not match model");
  return (pred.coefficients - model.beta).squaredNorm() + model.sigma2;
}

double conditional_risk(const LinearPredictor& pred, const Vector& beta, const Matrix& covariance,
                        double sigma2) {
  require(pred.dim() == beta.size() && covariance.rows() == beta.size() &&
              covariance.cols() == beta.size(),
          ErrorCode::InvalidArgument, "dimension mismatch in conditional risk");
  const Vector diff = pred.coefficients - beta;
  return diff.dot(covariance * diff) + sigma2;
}

RiskEstimate mc_true_risk(const LinearPredictor& pred, const LinearModel& model, std::size_t n_mc,
                          std::uint64_t seed) {
  require(n_mc >= 1, ErrorCode::InvalidArgument, "Monte-Carlo risk needs n_mc >= 1");
  require(pred.dim() == model.beta.size(), ErrorCode::InvalidArgument,
          "predictor dimension does not match model");
  const Vector diff = pred.coefficients - model.beta;
  const double noise_sd = std::sqrt(model.sigma2);
  CounterRng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    // y - yhat = x^T (beta - beta_hat) + noise.
    double resid = 0.0;
    for (Index j = 0; j < diff.size(); ++j) resid -= rng.normal() * diff(j);
    resid += noise_sd * rng.normal();
    const double loss = evaluate_loss(LossKind::SquaredError, resid, 0.0);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double n = static_cast<double>(n_mc);
  RiskEstimate out{sum / n, n_mc, CenteringMethod::avg()};
  if (n_mc > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

DeltaDiagnostics delta_diagnostics(std::span<const RiskEstimate> estimates,
                                   std::span<const double> true_risks, bool multiplicative) {
  require(!estimates.empty() && estimates.size() == true_risks.size(), ErrorCode::InvalidArgument,
          "delta diagnostics need equal-length nonempty inputs");
  DeltaDiagnostics out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double r = true_risks[i];
    out.delta_add = std::max(out.delta_add, std::abs(estimates[i].value - r));
    if (multiplicative) {
      require(r > 0.0, ErrorCode::Domain,
              "multiplicative deviation undefined for zero true risk at index " + std::to_string(i));
      out.delta_mul = std::max(out.delta_mul, std::abs(estimates[i].value / r - 1.0));
    }
  }
  if (!multiplicative) out.delta_mul = std::numeric_limits<double>::quiet_NaN();
  return out;
}

OracleBounds oracle_bounds(double min_true_risk, const DeltaDiagnostics& deltas) {
  OracleBounds out;
  out.additive = min_true_risk + 2.0 * deltas.delta_add;
  if (std::isnan(deltas.delta_mul)) {
    out.multiplicative = std::numeric_limits<double>::infinity();
  } else {
    const double denom = std::max(0.0, 1.0 - deltas.delta_mul);
    out.multiplicative = denom > 0.0 ? (1.0 + deltas.delta_mul) / denom * min_true_risk
                                     : std::numeric_limits<double>::infinity();
  }
  return out;
}

bool OracleBounds::satisfied_by(double selected_risk, double slack) const {
  const double tol = slack * std::max(1.0, std::abs(selected_risk));
  return selected_risk <= additive + tol && selected_risk <= multiplicative + tol;
}

}  // namespace riskmono
