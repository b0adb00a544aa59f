#include "riskmono/riskmono.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

int exit_code(rm_status status) {
  switch (status) {
    case RM_OK: return 0;
    case RM_ERR_INVALID_ARGUMENT:
    case RM_ERR_INVALID_SPLIT:
    case RM_ERR_INVALID_SUBSAMPLE:
    case RM_ERR_INFEASIBLE_ETA:
    case RM_ERR_IO:
      return kExitConfig;
    default:
      return kExitSolver;
  }
}

int report(rm_status status) {
  std::cerr << "error (" << rm_status_string(status) << "): " << rm_last_error() << "\n";
  return exit_code(status);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct ProfileArgs {
  std::string kind = "mn2ls";
  double rho2 = 1.0;
  double sigma2 = 1.0;
  double epsilon = 0.01;
  std::string gamma = "0.1:10:20log";
  bool no_null = false;
};

int run_profile(const ProfileArgs& a) {
  double* grid = nullptr;
  size_t count = 0;
  if (rm_status s = rm_parse_grid(a.gamma.c_str(), &grid, &count); s != RM_OK) return report(s);
  const std::vector<double> gammas(grid, grid + count);
  rm_free_doubles(grid);

  const bool onestep = a.kind == "onestep";
  const std::string base = onestep ? "mn2ls" : a.kind;
  rm_profile_params params{a.rho2, a.sigma2, a.epsilon, a.no_null ? 0 : 1};
  std::cout << "gamma,profile,monotonized" << (onestep ? ",onestep,zeta1,zeta2" : "") << "\n";
  for (double g : gammas) {
    double value = 0.0;
    double mono = 0.0;
    if (rm_status s = rm_profile_eval(base.c_str(), &params, g, &value); s != RM_OK) return report(s);
    if (rm_status s = rm_profile_monotonized(base.c_str(), &params, g, &mono); s != RM_OK) return report(s);
    std::cout << fmt(g) << ',' << fmt(value) << ',' << fmt(mono);
    if (onestep) {
      double risk = 0.0, z1 = 0.0, z2 = 0.0;
      if (rm_status s = rm_onestep_optimum(g, a.rho2, a.sigma2, &risk, &z1, &z2); s != RM_OK) return report(s);
      std::cout << ',' << fmt(risk) << ',' << fmt(z1) << ',' << fmt(z2);
    }
    std::cout << "\n";
  }
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

int run_simulate(const SimulateArgs& a) {
  rm_sweep_config* cfg = nullptr;
  rm_status s = a.config.empty() ? rm_sweep_config_new(&cfg) : rm_sweep_config_read(a.config.c_str(), &cfg);
  if (s != RM_OK) return report(s);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      rm_sweep_config_free(cfg);
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return kExitConfig;
    }
    s = rm_sweep_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != RM_OK) {
      rm_sweep_config_free(cfg);
      return report(s);
    }
  }
  rm_curve* curve = nullptr;
  s = rm_sweep_run(cfg, &curve);
  rm_sweep_config_free(cfg);
  if (s != RM_OK) return report(s);
  for (size_t i = 0; i < rm_curve_message_count(curve); ++i) {
    std::cerr << "note: " << rm_curve_message(curve, i) << "\n";
  }
  const char* csv = rm_curve_csv(curve);
  if (a.out.empty() || a.out == "-") {
    std::cout << csv;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) {
      rm_curve_free(curve);
      std::cerr << "error: cannot write '" << a.out << "'\n";
      return kExitConfig;
    }
    f << csv;
  }
  rm_curve_free(curve);
  return 0;
}

struct MonotonizeArgs {
  std::string data;
  std::string proc = "zero";
  std::string base = "mn2";
  double lambda = 0.0;
  size_t bags = 1;
  size_t nte = 0;
  size_t block = 0;
  double nu = 0.5;
  double eta = 0.0;
  bool no_null = false;
  uint64_t seed = 0;
};

int run_monotonize(const MonotonizeArgs& a) {
  rm_dataset* data = nullptr;
  if (rm_status s = rm_dataset_read_csv(a.data.c_str(), &data); s != RM_OK) return report(s);
  rm_monotonize_options o;
  rm_monotonize_options_default(&o);
  o.procedure = a.proc.c_str();
  o.base = a.base.c_str();
  o.lambda = a.lambda;
  o.bags = a.bags;
  o.n_te = a.nte;
  o.block = a.block;
  o.nu = a.nu;
  o.eta = a.eta;
  o.include_null = a.no_null ? 0 : 1;
  o.seed = a.seed;
  rm_result* result = nullptr;
  rm_status s = rm_monotonize(data, &o, &result);
  rm_dataset_free(data);
  if (s != RM_OK) return report(s);
  std::cout << rm_result_table_text(result);
  std::vector<double> beta(rm_result_dim(result));
  rm_result_coefficients(result, beta.data(), beta.size());
  std::cout << "selected " << rm_result_selected(result) << "\ncoefficients";
  for (double b : beta) std::cout << ' ' << fmt(b);
  std::cout << "\n";
  rm_result_free(result);
  return 0;
}

int run_selftest(bool as_json) {
  rm_selftest_report* r = nullptr;
  if (rm_status s = rm_selftest_run(&r); s != RM_OK) return report(s);
  int failures = 0;
  nlohmann::json checks = nlohmann::json::array();
  for (size_t i = 0; i < rm_selftest_count(r); ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    rm_selftest_check(r, i, &name, &passed, &detail);
    if (as_json) {
      checks.push_back({{"name", name}, {"passed", passed != 0}, {"detail", detail}});
    } else {
      std::cout << (passed ? "PASS " : "FAIL ") << name;
      if (!passed) std::cout << ": " << detail;
      std::cout << "\n";
    }
    failures += passed ? 0 : 1;
  }
  rm_selftest_free(r);
  if (as_json) std::cout << nlohmann::json{{"failures", failures}, {"checks", checks}}.dump(2) << "\n";
  return failures == 0 ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk monotonization of prediction procedures"};
  app.require_subcommand(1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Analytic risk curve over a gamma grid");
  profile->add_option("--kind", pa.kind, "mn2ls, mn1ls or onestep")
      ->check(CLI::IsMember({"mn2ls", "mn1ls", "onestep"}));
  profile->add_option("--rho2", pa.rho2, "Signal energy");
  profile->add_option("--sigma2", pa.sigma2, "Noise variance");
  profile->add_option("--epsilon", pa.epsilon, "Sparsity level for mn1ls");
  profile->add_option("--gamma", pa.gamma, "Grid: a:b:k, a:b:klog or a comma list");
  profile->add_flag("--no-null", pa.no_null, "Exclude the null predictor from monotonization");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run a gamma sweep and write the curve CSV");
  simulate->add_option("--config", sa.config, "key = value configuration file");
  simulate->add_option("--out", sa.out, "Output CSV path (default stdout)");
  simulate->add_option("--set", sa.overrides, "Override a configuration key: key=value")
      ->take_all();

  MonotonizeArgs ma;
  auto* mono = app.add_subcommand("monotonize", "Zero-step or one-step procedure on a CSV dataset");
  mono->add_option("--data", ma.data, "Headerless CSV, response first")->required();
  mono->add_option("--proc", ma.proc, "zero or one")->check(CLI::IsMember({"zero", "one"}));
  mono->add_option("--base", ma.base, "mn2, mn1, ridge, lasso or null");
  mono->add_option("--lambda", ma.lambda, "Penalty for ridge and lasso");
  mono->add_option("--M", ma.bags, "Bags per ingredient");
  mono->add_option("--nte", ma.nte, "Test split size (default ceil(n / ceil(ln n)))");
  mono->add_option("--block", ma.block, "Grid block size (default floor(n^nu))");
  mono->add_option("--nu", ma.nu, "Block exponent");
  mono->add_option("--eta", ma.eta, "Median-of-means level; 0 uses the plain average");
  mono->add_flag("--no-null", ma.no_null, "Do not add the null predictor");
  mono->add_option("--seed", ma.seed, "Master seed");

  bool selftest_json = false;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");
  selftest->add_flag("--json", selftest_json, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  if (profile->parsed()) return run_profile(pa);
  if (simulate->parsed()) return run_simulate(sa);
  if (mono->parsed()) return run_monotonize(ma);
  if (selftest->parsed()) return run_selftest(selftest_json);
  return kExitConfig;
}
