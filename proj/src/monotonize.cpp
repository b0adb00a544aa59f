#include "riskmono/monotonize.hpp"

#include "riskmono/error.hpp"
#include "riskmono/random.hpp"

#include <cmath>
#include <string>

namespace riskmono {

std::size_t block_from_nu(std::size_t n, double nu) {
  require(nu > 0.0 && nu < 1.0, ErrorCode::InvalidArgument, "nu must lie in (0, 1)");
  const double raw = std::pow(static_cast<double>(n), nu);
  return static_cast<std::size_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
}

std::size_t MonotonizeConfig::block_size(std::size_t n) const {
  const std::size_t b = block > 0 ? block : (nu > 0.0 ? block_from_nu(n, nu) : 0);
  require(b >= 1, ErrorCode::InvalidArgument, "grid block size floor(n^nu) must be at least 1");
  return b;
}

std::size_t MonotonizeConfig::test_size(std::size_t n) const {
  return n_te > 0 ? n_te : default_test_size(n);
}

long long grid_endpoint(std::size_t n_tr, std::size_t block) {
  require(block >= 1, ErrorCode::InvalidArgument, "block size must be positive");
  const auto num = static_cast<long long>(n_tr) - 2 * static_cast<long long>(block);
  const auto b = static_cast<long long>(block);
  // ceil(num / b) for signed num.
  return num >= 0 ? (num + b - 1) / b : -((-num) / b);
}

ZeroStepGrid make_zero_step_grid(std::size_t n_tr, std::size_t block) {
  const long long end = grid_endpoint(n_tr, block);
  require(end >= 1, ErrorCode::InvalidArgument,
          "zero-step grid is empty: n_tr = " + std::to_string(n_tr) + " with block " +
              std::to_string(block) + " gives endpoint ceil(n_tr/block - 2) = " + std::to_string(end));
  ZeroStepGrid g;
  g.n_tr = n_tr;
  g.block = block;
  for (long long xi = 1; xi <= end; ++xi) {
    g.xi.push_back(static_cast<std::size_t>(xi));
    g.sizes.push_back(n_tr - static_cast<std::size_t>(xi) * block);
  }
  return g;
}

OneStepGrid make_one_step_grid(std::size_t n_tr, std::size_t block) {
  const long long end = grid_endpoint(n_tr, block);
  require(end >= 2, ErrorCode::InvalidArgument,
          "one-step grid is empty: n_tr = " + std::to_string(n_tr) + " with block " +
              std::to_string(block) + " gives endpoint ceil(n_tr/block - 2) = " + std::to_string(end));
  OneStepGrid g;
  g.n_tr = n_tr;
  g.block = block;
  for (long long xi1 = 2; xi1 <= end; ++xi1) {
    const auto x1 = static_cast<std::size_t>(xi1);
    for (std::size_t x2 = 0; x2 < x1; ++x2) {
      g.pairs.push_back(OneStepPair{x1, x2, n_tr - x1 * block, x2 * block});
    }
  }
  return g;
}

std::uint64_t ingredient_seed(std::uint64_t seed, std::size_t xi, std::size_t bag) {
  return derive_seed(derive_seed(seed, "ingredient", xi), "bag", bag);
}

namespace {

void average_into(Vector& acc, const Vector& coef, std::size_t count) {
  // Running mean keeps M = 1 bitwise equal to the single fit.
  if (count == 1) {
    acc = coef;
  } else {
    acc += (coef - acc) / static_cast<double>(count);
  }
}

}  // namespace

LinearPredictor bagged_ingredient(const BaseProcedure& base, const Dataset& train, std::size_t k,
                                  std::size_t bags, std::uint64_t seed) {
  require(bags >= 1, ErrorCode::InvalidArgument, "bag count M must be positive");
  LinearPredictor out = LinearPredictor::zeros(train.cols());
  for (std::size_t j = 0; j < bags; ++j) {
    const Dataset sub = draw_subsample(train, k, derive_seed(seed, "bag", j));
    LinearPredictor fitted = fit(base, sub);
    average_into(out.coefficients, fitted.coefficients, j + 1);
    for (auto& w : fitted.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

LinearPredictor onestep_ingredient(const BaseProcedure& base, const Dataset& d1, const Dataset& d2) {
  require(!d1.empty(), ErrorCode::InvalidSubsample, "one-step base subset is empty");
  LinearPredictor beta = fit(base, d1);
  if (d2.empty()) return beta;
  const Vector resid = d2.response() - d2.features() * beta.coefficients;
  const LinearPredictor adjust = fit_mn2ls(d2.with_response(resid));
  beta.coefficients += adjust.coefficients;
  return beta;
}

LinearPredictor onestep_averaged(const BaseProcedure& base, const Dataset& train, std::size_t n1,
                                 std::size_t n2, std::size_t bags, std::uint64_t seed) {
  require(bags >= 1, ErrorCode::InvalidArgument, "bag count M must be positive");
  LinearPredictor out = LinearPredictor::zeros(train.cols());
  for (std::size_t j = 0; j < bags; ++j) {
    const auto [d1, d2] = draw_disjoint_pair(train, n1, n2, derive_seed(seed, "bag", j));
    LinearPredictor fitted = onestep_ingredient(base, d1, d2);
    average_into(out.coefficients, fitted.coefficients, j + 1);
    for (auto& w : fitted.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

namespace {

struct Prepared {
  TrainTestSplit split;
  std::size_t block;
};

Prepared prepare(const Dataset& data, const MonotonizeConfig& cfg) {
  const auto n = static_cast<std::size_t>(data.rows());
  const std::size_t block = cfg.block_size(n);
  const std::size_t n_te = cfg.test_size(n);
  require(cfg.bags >= 1, ErrorCode::InvalidArgument, "bag count M must be positive");
  return Prepared{split_train_test(data, n_te, derive_seed(cfg.seed, "split")), block};
}

}  // namespace

MonotonizeResult zero_step(const Dataset& data, const BaseProcedure& base,
                           const MonotonizeConfig& cfg, LossKind loss) {
  const Prepared prep = prepare(data, cfg);
  const ZeroStepGrid grid =
      make_zero_step_grid(static_cast<std::size_t>(prep.split.train.rows()), prep.block);

  MonotonizeResult out;
  out.procedure = ProcedureKind::ZeroStep;
  out.block = grid.block;
  out.n_tr = grid.n_tr;
  CandidateFamily family;
  for (std::size_t i = 0; i < grid.xi.size(); ++i) {
    const std::size_t xi = grid.xi[i];
    const std::size_t k = grid.sizes[i];
    // bagged_ingredient derives per-bag seeds from this with tag "bag".
    const std::uint64_t seed = derive_seed(cfg.seed, "ingredient", xi);
    family.add("xi=" + std::to_string(xi) + " n=" + std::to_string(k),
               [base, k, bags = cfg.bags, seed](const Dataset& train) {
                 return bagged_ingredient(base, train, k, bags, seed);
               });
    out.sizes.emplace_back(k, 0);
  }
  if (cfg.include_null) {
    family.add("null", [](const Dataset& train) { return fit_null(train); });
    out.sizes.emplace_back(0, 0);
  }
  out.cv = cross_validate_on_split(family, prep.split, loss, cfg.cen);
  return out;
}

MonotonizeResult one_step(const Dataset& data, const BaseProcedure& base,
                          const MonotonizeConfig& cfg, LossKind loss) {
  const Prepared prep = prepare(data, cfg);
  const OneStepGrid grid =
      make_one_step_grid(static_cast<std::size_t>(prep.split.train.rows()), prep.block);

  MonotonizeResult out;
  out.procedure = ProcedureKind::OneStep;
  out.block = grid.block;
  out.n_tr = grid.n_tr;
  CandidateFamily family;
  for (const auto& pr : grid.pairs) {
    const std::uint64_t seed = derive_seed(cfg.seed, "ingredient", pr.xi1);
    const std::size_t n1 = pr.n1;
    const std::size_t n2 = pr.n2;
    const std::size_t xi2 = pr.xi2;
    family.add("xi1=" + std::to_string(pr.xi1) + " xi2=" + std::to_string(xi2) +
                   " n1=" + std::to_string(n1) + " n2=" + std::to_string(n2),
               [base, n1, n2, xi2, bags = cfg.bags, seed](const Dataset& train) {
                 const std::uint64_t s = xi2 == 0 ? seed : derive_seed(seed, "pair", xi2);
                 return onestep_averaged(base, train, n1, n2, bags, s);
               });
    out.sizes.emplace_back(n1, n2);
  }
  if (cfg.include_null) {
    family.add("null", [](const Dataset& train) { return fit_null(train); });
    out.sizes.emplace_back(0, 0);
  }
  out.cv = cross_validate_on_split(family, prep.split, loss, cfg.cen);
  return out;
}

}  // namespace riskmono
