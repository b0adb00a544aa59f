#pragma once

#include "riskmono/core.hpp"
#include "riskmono/cv_select.hpp"
#include "riskmono/predictors.hpp"
#include "riskmono/risk_estimation.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace riskmono {

struct MonotonizeConfig {
  /// Grid step floor(n^nu). When zero it is derived from `nu`.
  std::size_t block = 0;
  double nu = 0.0;
  std::size_t bags = 1;   // M
  /// Test-split size; zero selects default_test_size(n).
  std::size_t n_te = 0;
  CenteringMethod cen = CenteringMethod::avg();
  bool include_null = true;
  std::uint64_t seed = 0;

  std::size_t block_size(std::size_t n) const;
  std::size_t test_size(std::size_t n) const;
};

/// floor(n^nu), guarding against pow() landing just below an integer.
std::size_t block_from_nu(std::size_t n, double nu);

/// ceil(n_tr / block - 2) in exact integer arithmetic (may be <= 0).
long long grid_endpoint(std::size_t n_tr, std::size_t block);

struct ZeroStepGrid {
  std::size_t n_tr = 0;
  std::size_t block = 0;
  std::vector<std::size_t> xi;     // 1, 2, ..., endpoint
  std::vector<std::size_t> sizes;  // n_tr - xi * block
};

struct OneStepPair {
  std::size_t xi1 = 0;
  std::size_t xi2 = 0;
  std::size_t n1 = 0;  // n_tr - xi1 * block
  std::size_t n2 = 0;  // xi2 * block
};

struct OneStepGrid {
  std::size_t n_tr = 0;
  std::size_t block = 0;
  std::vector<OneStepPair> pairs;  // xi1 ascending, then xi2 ascending from 0
};

ZeroStepGrid make_zero_step_grid(std::size_t n_tr, std::size_t block);
OneStepGrid make_one_step_grid(std::size_t n_tr, std::size_t block);

/// Coefficient average of `bags` base fits on independent size-k subsamples.
LinearPredictor bagged_ingredient(const BaseProcedure& base, const Dataset& train, std::size_t k,
                                  std::size_t bags, std::uint64_t seed);

/// Base fit on d1 followed by an mn2ls fit of the d2 residuals; d2 empty
/// returns the base fit unchanged.
LinearPredictor onestep_ingredient(const BaseProcedure& base, const Dataset& d1, const Dataset& d2);

/// Coefficient average of `bags` one-step ingredients on independent disjoint
/// pairs of sizes (n1, n2).
LinearPredictor onestep_averaged(const BaseProcedure& base, const Dataset& train, std::size_t n1,
                                 std::size_t n2, std::size_t bags, std::uint64_t seed);

/// Seed of the j-th subsample draw at grid index xi. One-step pairs with
/// xi2 = 0 reuse it, so their ingredients coincide with the zero-step ones.
std::uint64_t ingredient_seed(std::uint64_t seed, std::size_t xi, std::size_t bag);

enum class ProcedureKind { Base, ZeroStep, OneStep };

struct MonotonizeResult {
  ProcedureKind procedure = ProcedureKind::ZeroStep;
  CvResult cv;
  std::size_t block = 0;
  std::size_t n_tr = 0;
  /// Training-subset sizes per table row (first, second); the null row has (0, 0).
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
};

MonotonizeResult zero_step(const Dataset& data, const BaseProcedure& base,
                           const MonotonizeConfig& cfg, LossKind loss = LossKind::SquaredError);

MonotonizeResult one_step(const Dataset& data, const BaseProcedure& base,
                          const MonotonizeConfig& cfg, LossKind loss = LossKind::SquaredError);

}  // namespace riskmono
