#include "riskmono/error.hpp"
#include "riskmono/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace riskmono;

TEST_CASE("dense generator energy") {
  double total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) total += generate(DataModel::dense(4.0, 1.0, 1000), 5, s).beta.squaredNorm();
  CHECK(std::abs(total / 50 - 4.0) < 0.5);
}

TEST_CASE("sparse generator support size") {
  const auto g = generate(DataModel::sparse(0.005, 2.0, 1.0, 2000), 3, 8);
  const auto nnz = (g.beta.array() != 0.0).count();
  const double mean = 10, sd = std::sqrt(2000 * 0.005 * 0.995);
  CHECK(std::abs(nnz - mean) <= 3 * sd);
  const double value = 2.0 / std::sqrt(2000 * 0.005);
  for (Index j = 0; j < g.beta.size(); ++j) {
    if (g.beta(j) != 0.0) CHECK(g.beta(j) == doctest::Approx(value));
  }
}

TEST_CASE("noiseless generator is exact and columns are shared across p") {
  const auto g = generate(DataModel::dense(1.0, 0.0, 30), 12, 4);
  CHECK((g.data.features() * g.beta - g.data.response()).norm() == 0.0);
  const auto wide = generate(DataModel::dense(1.0, 0.0, 50), 12, 4);
  CHECK(wide.data.features().leftCols(30) == g.data.features());
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0.1:10:20log");
  REQUIRE(g.size() == 20);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 10.0);
  CHECK(g[1] / g[0] == doctest::Approx(g[19] / g[18]));
  const auto lin = parse_grid("1:2:5");
  CHECK(lin[2] == doctest::Approx(1.5));
  CHECK(parse_grid("3, 1,2") == std::vector<double>{1, 2, 3});
  CHECK(parse_grid("0.7:0.7:1").size() == 1);
  CHECK_THROWS_AS(parse_grid("0:1:3log"), Error);
  CHECK_THROWS_AS(parse_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_grid("a,b"), Error);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_sweep_config(
      "# sweep\n"
      "n = 120\n"
      "gamma = 0.5:2:3log  # three points\n"
      "reps = 4\n"
      "rho2 = 4\n"
      "base = ridge\n"
      "lambda = 0.5\n"
      "proc = zero\n"
      "M = 1, 5\n"
      "block = 10\n"
      "nte = 20\n"
      "seed = 9\n");
  CHECK(cfg.n == 120);
  CHECK(cfg.gamma_grid.size() == 3);
  CHECK(cfg.reps == 4);
  CHECK(cfg.model.rho2 == 4);
  CHECK(cfg.base.kind == BaseKind::Ridge);
  CHECK(cfg.base.lambda == 0.5);
  CHECK(cfg.procedure == ProcedureKind::ZeroStep);
  CHECK(cfg.bags == std::vector<std::size_t>{1, 5});
  CHECK(cfg.mono.block == 10);
  CHECK(cfg.mono.n_te == 20);
  CHECK(cfg.master_seed == 9);
  CHECK_NOTHROW(cfg.validate());

  try {
    parse_sweep_config("n = 10\nbogus = 1\n");
    FAIL("expected unknown key error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sweep_config("n 10\n"), Error);
  CHECK_THROWS_AS(parse_sweep_config("reps = -1\n"), Error);
  auto ridge0 = parse_sweep_config("gamma = 1\nbase = ridge\n");
  CHECK_THROWS_AS(ridge0.validate(), Error);
}

namespace {

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.n = 60;
  cfg.gamma_grid = {0.5, 2.0};
  cfg.reps = 3;
  cfg.model = DataModel::dense(4.0, 1.0, 1);
  cfg.mono.block = 6;
  cfg.mono.n_te = 10;
  cfg.master_seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("degenerate sweep gives one row") {
  SweepConfig cfg = small_sweep();
  cfg.gamma_grid = {0.7};
  cfg.reps = 1;
  const auto t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].p == 42);
  CHECK(std::isnan(t.rows[0].se_risk));
  std::istringstream csv(curve_csv(t));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("null base sweep sits at the null risk") {
  SweepConfig cfg = small_sweep();
  cfg.base = BaseProcedure::null();
  cfg.reps = 40;
  cfg.gamma_grid = {1.0, 4.0};
  const auto t = run_sweep(cfg);
  for (const auto& r : t.rows) {
    CHECK(r.analytic == 5.0);
    CHECK(std::abs(r.mean_risk - 5.0) < 4 * r.se_risk + 0.05);
  }
}

TEST_CASE("sweep rows, columns and determinism") {
  SweepConfig cfg = small_sweep();
  cfg.procedure = ProcedureKind::ZeroStep;
  cfg.bags = {1, 3};
  cfg.n_mc = 2000;
  cfg.threads = 1;
  const auto a = run_sweep(cfg);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows[0].gamma == 0.5);
  CHECK(a.rows[0].bags == 1);
  CHECK(a.rows[1].bags == 3);
  CHECK(std::isfinite(a.rows[0].monotonized_analytic));
  CHECK(std::isnan(a.rows[1].monotonized_analytic));
  for (const auto& r : a.rows) {
    CHECK(r.n_fail == 0);
    CHECK(r.rep_risks.size() == 3);
    CHECK(std::abs(r.mean_risk - r.mean_risk_mc) < 4 * r.se_risk_mc);
  }
  cfg.threads = 3;
  CHECK(curve_csv(run_sweep(cfg)) == curve_csv(a));
  const std::string header = curve_csv(a).substr(0, curve_csv(a).find('\n'));
  CHECK(header == "gamma,p,proc,M,mean_risk,se_risk,mean_risk_mc,se_risk_mc,analytic,monotonized_analytic,n_fail");
}

TEST_CASE("failing replications mark the grid point invalid") {
  SweepConfig cfg = small_sweep();
  cfg.procedure = ProcedureKind::ZeroStep;
  cfg.mono.cen = CenteringMethod::mom(1e-3);  // 56 batches for 10 test rows
  const auto t = run_sweep(cfg);
  for (const auto& r : t.rows) {
    CHECK(r.n_fail == 3);
    CHECK(r.invalid);
    CHECK(std::isnan(r.mean_risk));
  }
  CHECK_FALSE(t.messages.empty());
}

TEST_CASE("analytic columns") {
  const auto m = DataModel::dense(4.0, 1.0, 1);
  CHECK(analytic_base_profile(m, BaseProcedure::mn2ls(), 2.0) == doctest::Approx(4.0));
  CHECK(std::isnan(analytic_base_profile(m, BaseProcedure::ridge(1.0), 2.0)));
  CHECK(std::isnan(analytic_base_profile(m, BaseProcedure::mn1ls(), 2.0)));
  CHECK(analytic_procedure_profile(m, BaseProcedure::mn2ls(), ProcedureKind::ZeroStep, 1.5, true) ==
        doctest::Approx(4.0).epsilon(1e-9));
  CHECK(analytic_procedure_profile(m, BaseProcedure::mn2ls(), ProcedureKind::OneStep, 2.0, true) <
        4.0 - 1e-3);
  const auto sparse = DataModel::sparse(0.01, 2.0, 1.0, 1);
  CHECK(analytic_base_profile(sparse, BaseProcedure::mn1ls(), std::numeric_limits<double>::infinity()) == doctest::Approx(5.0));
}
