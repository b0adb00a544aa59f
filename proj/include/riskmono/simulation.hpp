#pragma once

#include "riskmono/core.hpp"
#include "riskmono/monotonize.hpp"
#include "riskmono/predictors.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace riskmono {

enum class SignalKind { DenseGaussian, SparseBernoulli };

/// Isotropic Gaussian design with a random coefficient vector.
///   DenseGaussian:   beta_j ~ N(0, rho2 / p)
///   SparseBernoulli: beta_j = magnitude / sqrt(p epsilon) with probability epsilon, else 0
/// In both cases E||beta||^2 equals signal_energy().
struct DataModel {
  SignalKind kind = SignalKind::DenseGaussian;
  double rho2 = 1.0;
  double epsilon = 0.01;
  double magnitude = 1.0;
  double sigma2 = 1.0;
  std::size_t p = 1;

  static DataModel dense(double rho2, double sigma2, std::size_t p);
  static DataModel sparse(double epsilon, double magnitude, double sigma2, std::size_t p);

  double signal_energy() const noexcept;
  void validate() const;
};

struct GeneratedData {
  Dataset data;
  Vector beta;
};

/// Column j of X is read from its own stream derive_seed(seed, "x", j), so two
/// calls with the same seed and different p share their leading columns.
GeneratedData generate(const DataModel& model, std::size_t n, std::uint64_t seed);

/// "a:b:k" (linear) or "a:b:klog" (logarithmic) with both endpoints included,
/// or a comma-separated list. The result is sorted ascending.
std::vector<double> parse_grid(const std::string& text);

struct SweepConfig {
  std::size_t n = 200;
  std::vector<double> gamma_grid;
  std::size_t reps = 10;
  /// Fresh test points for the Monte-Carlo risk column; zero disables it.
  std::size_t n_mc = 0;
  DataModel model;
  ProcedureKind procedure = ProcedureKind::Base;
  BaseProcedure base = BaseProcedure::mn2ls();
  MonotonizeConfig mono = [] {
    MonotonizeConfig m;
    m.nu = 0.5;
    return m;
  }();
  /// Bag counts M; one output row per value (Base uses only the first).
  std::vector<std::size_t> bags = {1};
  std::uint64_t master_seed = 0;
  /// Worker cap; zero uses RISKMONO_THREADS or the hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

struct CurveRow {
  double gamma = 0.0;
  std::size_t p = 0;
  std::string proc;
  std::size_t bags = 1;
  double mean_risk = 0.0;
  double se_risk = 0.0;
  double mean_risk_mc = 0.0;
  double se_risk_mc = 0.0;
  double analytic = 0.0;
  double monotonized_analytic = 0.0;
  std::size_t n_fail = 0;
  /// More than 20% of the replications failed; the means are NaN.
  bool invalid = false;
  /// Per-replication closed-form risks (NaN for failures), kept for paired analyses.
  std::vector<double> rep_risks;
};

struct CurveTable {
  std::vector<CurveRow> rows;
  std::vector<std::string> messages;
};

std::string procedure_label(ProcedureKind kind);
ProcedureKind parse_procedure(const std::string& name);

/// Limiting base-procedure risk at gamma for the model, or NaN when no
/// closed form is available.
double analytic_base_profile(const DataModel& model, const BaseProcedure& base, double gamma);
/// Limiting risk of the procedure with M = 1 (monotonized base profile or the
/// optimized one-step risk), or NaN when unavailable.
double analytic_procedure_profile(const DataModel& model, const BaseProcedure& base,
                                  ProcedureKind proc, double gamma, bool include_null);

/// Seed of replication `rep`. It does not depend on gamma, so all grid points
/// see common random numbers.
std::uint64_t replication_seed(std::uint64_t master, std::size_t rep);

CurveTable run_sweep(const SweepConfig& cfg);

void write_curve_csv(std::ostream& out, const CurveTable& table);
std::string curve_csv(const CurveTable& table);

/// Plain-text `key = value` lines, `#` starts a comment. Unknown keys throw.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig read_sweep_config(const std::string& path);
/// Applies one key/value pair; used by the parser and for CLI overrides.
void apply_sweep_setting(SweepConfig& cfg, const std::string& key, const std::string& value);

}  // namespace riskmono
