#include "riskmono/simulation.hpp"

#include "riskmono/error.hpp"
#include "riskmono/profiles.hpp"
#include "riskmono/random.hpp"
#include "riskmono/risk_estimation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace riskmono {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_real(const std::string& s) {
  const std::string t = [&] {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty(),
          ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  return value;
}

}  // namespace

DataModel DataModel::dense(double rho2, double sigma2, std::size_t p) {
  DataModel m;
  m.kind = SignalKind::DenseGaussian;
  m.rho2 = rho2;
  m.sigma2 = sigma2;
  m.p = p;
  return m;
}

DataModel DataModel::sparse(double epsilon, double magnitude, double sigma2, std::size_t p) {
  DataModel m;
  m.kind = SignalKind::SparseBernoulli;
  m.epsilon = epsilon;
  m.magnitude = magnitude;
  m.sigma2 = sigma2;
  m.p = p;
  return m;
}

double DataModel::signal_energy() const noexcept {
  return kind == SignalKind::DenseGaussian ? rho2 : magnitude * magnitude;
}

void DataModel::validate() const {
  require(p >= 1, ErrorCode::InvalidArgument, "model needs p >= 1");
  require(sigma2 >= 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
          "sigma2 must be finite and nonnegative");
  if (kind == SignalKind::DenseGaussian) {
    require(rho2 >= 0.0 && std::isfinite(rho2), ErrorCode::InvalidArgument,
            "rho2 must be finite and nonnegative");
  } else {
    require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument,
            "epsilon must lie in (0, 1)");
    require(std::isfinite(magnitude), ErrorCode::InvalidArgument, "magnitude must be finite");
  }
}

GeneratedData generate(const DataModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  require(n >= 1, ErrorCode::InvalidArgument, "generate needs n >= 1");
  const auto rows = static_cast<Index>(n);
  const auto cols = static_cast<Index>(model.p);

  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    CounterRng rng(derive_seed(seed, "x", static_cast<std::uint64_t>(j)));
    for (Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
  }

  Vector beta(cols);
  CounterRng brng(derive_seed(seed, "beta"));
  const double p = static_cast<double>(model.p);
  if (model.kind == SignalKind::DenseGaussian) {
    const double scale = std::sqrt(model.rho2 / p);
    for (Index j = 0; j < cols; ++j) beta(j) = scale * brng.normal();
  } else {
    const double value = model.magnitude / std::sqrt(p * model.epsilon);
    for (Index j = 0; j < cols; ++j) beta(j) = brng.uniform() < model.epsilon ? value : 0.0;
  }

  Vector y = x * beta;
  if (model.sigma2 > 0.0) {
    CounterRng nrng(derive_seed(seed, "noise"));
    const double sd = std::sqrt(model.sigma2);
    for (Index i = 0; i < rows; ++i) y(i) += sd * nrng.normal();
  }
  return {Dataset(std::move(x), std::move(y)), std::move(beta)};
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    require(parts.size() == 3, ErrorCode::InvalidArgument,
            "grid must look like a:b:k or a:b:klog, got '" + text + "'");
    std::string count = parts[2];
    bool log_spaced = false;
    if (count.size() > 3 && count.substr(count.size() - 3) == "log") {
      log_spaced = true;
      count.resize(count.size() - 3);
    }
    const double a = parse_real(parts[0]);
    const double b = parse_real(parts[1]);
    const double kd = parse_real(count);
    require(kd >= 1.0 && kd == std::floor(kd), ErrorCode::InvalidArgument,
            "grid point count must be a positive integer in '" + text + "'");
    const auto k = static_cast<std::size_t>(kd);
    require(a <= b, ErrorCode::InvalidArgument, "grid endpoints out of order in '" + text + "'");
    if (log_spaced) {
      require(a > 0.0, ErrorCode::InvalidArgument, "log grid needs positive endpoints");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (k == 1) {
        out.push_back(a);
        break;
      }
      const double t = static_cast<double>(i) / static_cast<double>(k - 1);
      if (i == 0) {
        out.push_back(a);
      } else if (i + 1 == k) {
        out.push_back(b);
      } else if (log_spaced) {
        out.push_back(std::exp(std::log(a) + t * (std::log(b) - std::log(a))));
      } else {
        out.push_back(a + t * (b - a));
      }
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  }
  require(!out.empty(), ErrorCode::InvalidArgument, "grid is empty");
  for (double g : out) {
    require(g > 0.0 && std::isfinite(g), ErrorCode::InvalidArgument, "grid values must be positive");
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SweepConfig::validate() const {
  require(n >= 2, ErrorCode::InvalidArgument, "sweep needs n >= 2");
  require(reps >= 1, ErrorCode::InvalidArgument, "sweep needs reps >= 1");
  require(!gamma_grid.empty(), ErrorCode::InvalidArgument, "gamma grid is empty");
  require(std::is_sorted(gamma_grid.begin(), gamma_grid.end()), ErrorCode::InvalidArgument,
          "gamma grid must be sorted ascending");
  require(!bags.empty(), ErrorCode::InvalidArgument, "bag list is empty");
  for (auto m : bags) require(m >= 1, ErrorCode::InvalidArgument, "bag counts must be >= 1");
  if (base.kind == BaseKind::Ridge || base.kind == BaseKind::Lasso) {
    require(base.lambda > 0.0 && std::isfinite(base.lambda), ErrorCode::InvalidArgument,
            "ridge and lasso need a positive lambda");
  }
  DataModel probe = model;
  probe.p = 1;
  probe.validate();
}

std::string procedure_label(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::Base: return "base";
    case ProcedureKind::ZeroStep: return "zero";
    case ProcedureKind::OneStep: return "one";
  }
  return "unknown";
}

ProcedureKind parse_procedure(const std::string& name) {
  if (name == "base") return ProcedureKind::Base;
  if (name == "zero" || name == "zero_step" || name == "zero-step") return ProcedureKind::ZeroStep;
  if (name == "one" || name == "one_step" || name == "one-step") return ProcedureKind::OneStep;
  fail(ErrorCode::InvalidArgument, "unknown procedure '" + name + "' (expected base, zero, one)");
}

double analytic_base_profile(const DataModel& model, const BaseProcedure& base, double gamma) {
  const double energy = model.signal_energy();
  switch (base.kind) {
    case BaseKind::Null:
      return energy + model.sigma2;
    case BaseKind::Mn2ls:
      // The isotropic limit depends on beta only through its energy.
      return profiles::mn2ls_profile_isotropic(gamma, energy, model.sigma2);
    case BaseKind::Mn1ls:
      if (model.kind != SignalKind::SparseBernoulli || model.sigma2 <= 0.0) return kNaN;
      return profiles::mn1ls_profile(
          gamma, profiles::Mn1lsPrior{model.epsilon, model.magnitude / std::sqrt(model.epsilon)},
          model.sigma2);
    case BaseKind::Ridge:
    case BaseKind::Lasso:
      return kNaN;
  }
  return kNaN;
}

double analytic_procedure_profile(const DataModel& model, const BaseProcedure& base,
                                  ProcedureKind proc, double gamma, bool include_null) {
  auto profile = [&](double z) {
    if (std::isinf(z) && !include_null) return kNaN;
    try {
      return analytic_base_profile(model, base, z);
    } catch (const Error&) {
      return kNaN;
    }
  };
  switch (proc) {
    case ProcedureKind::Base:
      return profile(gamma);
    case ProcedureKind::ZeroStep: {
      if (std::isnan(profile(std::max(gamma, 2.0)))) return kNaN;
      const double v = profiles::monotonize_profile(gamma, profile);
      return std::isinf(v) ? kNaN : v;
    }
    case ProcedureKind::OneStep: {
      if (base.kind != BaseKind::Mn2ls || model.sigma2 <= 0.0 || !include_null) return kNaN;
      const double snr = model.signal_energy() / model.sigma2;
      return profiles::optimize_onestep_iso(gamma, snr).risk(model.sigma2);
    }
  }
  return kNaN;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t rep) {
  return derive_seed(master, "rep", rep);
}

namespace {

std::size_t worker_count(std::size_t requested, std::size_t tasks) {
  std::size_t threads = requested;
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RISKMONO_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap >= 1) threads = std::min(threads, static_cast<std::size_t>(cap));
    }
  }
  return std::max<std::size_t>(1, std::min(threads, tasks));
}

struct RepOutcome {
  double risk = kNaN;
  double risk_mc = kNaN;
  std::string error;
};

}  // namespace

CurveTable run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t n_gamma = cfg.gamma_grid.size();
  const std::vector<std::size_t> bag_list =
      cfg.procedure == ProcedureKind::Base ? std::vector<std::size_t>{1} : cfg.bags;
  const std::size_t n_bags = bag_list.size();

  std::vector<std::size_t> ps(n_gamma);
  for (std::size_t g = 0; g < n_gamma; ++g) {
    const double p = std::round(cfg.gamma_grid[g] * static_cast<double>(cfg.n));
    require(p >= 1.0, ErrorCode::InvalidArgument, "gamma * n rounds to zero features");
    ps[g] = static_cast<std::size_t>(p);
  }

  // outcomes[(g * n_bags + b) * reps + r]
  std::vector<RepOutcome> outcomes(n_gamma * n_bags * cfg.reps);
  const std::size_t tasks = n_gamma * cfg.reps;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      const std::size_t g = t / cfg.reps;
      const std::size_t r = t % cfg.reps;
      const std::uint64_t seed = replication_seed(cfg.master_seed, r);
      DataModel model = cfg.model;
      model.p = ps[g];
      auto record_all = [&](const std::string& what) {
        for (std::size_t b = 0; b < n_bags; ++b) outcomes[(g * n_bags + b) * cfg.reps + r].error = what;
      };
      GeneratedData gen;
      try {
        gen = generate(model, cfg.n, seed);
      } catch (const std::exception& e) {
        record_all(e.what());
        continue;
      }
      const LinearModel truth{gen.beta, model.sigma2};
      for (std::size_t b = 0; b < n_bags; ++b) {
        RepOutcome& out = outcomes[(g * n_bags + b) * cfg.reps + r];
        try {
          LinearPredictor pred;
          MonotonizeConfig mono = cfg.mono;
          mono.bags = bag_list[b];
          mono.seed = derive_seed(seed, "procedure");
          switch (cfg.procedure) {
            case ProcedureKind::Base: pred = fit(cfg.base, gen.data); break;
            case ProcedureKind::ZeroStep: pred = zero_step(gen.data, cfg.base, mono).cv.predictor; break;
            case ProcedureKind::OneStep: pred = one_step(gen.data, cfg.base, mono).cv.predictor; break;
          }
          out.risk = conditional_risk(pred, truth);
          if (cfg.n_mc > 0) {
            out.risk_mc = mc_true_risk(pred, truth, cfg.n_mc, derive_seed(seed, "mc", b)).value;
          }
          if (!std::isfinite(out.risk)) {
            out.error = "non-finite risk";
            out.risk = kNaN;
          }
        } catch (const std::exception& e) {
          out.error = e.what();
          out.risk = kNaN;
          out.risk_mc = kNaN;
        }
      }
    }
  };

  const std::size_t workers = worker_count(cfg.threads, tasks);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  CurveTable table;
  const std::string proc = procedure_label(cfg.procedure);
  for (std::size_t g = 0; g < n_gamma; ++g) {
    const double gamma = cfg.gamma_grid[g];
    DataModel model = cfg.model;
    model.p = ps[g];
    double analytic = kNaN;
    double mono_analytic = kNaN;
    try {
      analytic = analytic_base_profile(model, cfg.base, gamma);
      if (std::isinf(analytic)) analytic = kNaN;
    } catch (const Error& e) {
      table.messages.push_back("analytic profile unavailable at gamma " + std::to_string(gamma) +
                               ": " + e.what());
    }
    for (std::size_t b = 0; b < n_bags; ++b) {
      CurveRow row;
      row.gamma = gamma;
      row.p = ps[g];
      row.proc = proc;
      row.bags = bag_list[b];
      row.analytic = analytic;
      if (bag_list[b] == 1) {
        try {
          mono_analytic = analytic_procedure_profile(model, cfg.base, cfg.procedure, gamma,
                                                     cfg.mono.include_null);
        } catch (const Error& e) {
          mono_analytic = kNaN;
          table.messages.push_back("procedure profile unavailable at gamma " +
                                   std::to_string(gamma) + ": " + e.what());
        }
        row.monotonized_analytic = mono_analytic;
      } else {
        row.monotonized_analytic = kNaN;
      }

      double sum = 0.0, sum2 = 0.0, sum_mc = 0.0, sum2_mc = 0.0;
      std::size_t ok = 0, ok_mc = 0;
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        const RepOutcome& out = outcomes[(g * n_bags + b) * cfg.reps + r];
        row.rep_risks.push_back(out.risk);
        if (!out.error.empty()) {
          ++row.n_fail;
          if (row.n_fail <= 3) {
            table.messages.push_back("gamma " + std::to_string(gamma) + " M " +
                                     std::to_string(bag_list[b]) + " rep " + std::to_string(r) +
                                     ": " + out.error);
          }
          continue;
        }
        sum += out.risk;
        sum2 += out.risk * out.risk;
        ++ok;
        if (std::isfinite(out.risk_mc)) {
          sum_mc += out.risk_mc;
          sum2_mc += out.risk_mc * out.risk_mc;
          ++ok_mc;
        }
      }
      auto mean_se = [](double s, double s2, std::size_t k) -> std::pair<double, double> {
        if (k == 0) return {kNaN, kNaN};
        const double mean = s / static_cast<double>(k);
        if (k == 1) return {mean, kNaN};
        const double var = std::max(0.0, (s2 - s * mean) / static_cast<double>(k - 1));
        return {mean, std::sqrt(var / static_cast<double>(k))};
      };
      row.invalid = 5 * row.n_fail > cfg.reps;
      if (row.invalid) {
        row.mean_risk = row.se_risk = row.mean_risk_mc = row.se_risk_mc = kNaN;
      } else {
        std::tie(row.mean_risk, row.se_risk) = mean_se(sum, sum2, ok);
        std::tie(row.mean_risk_mc, row.se_risk_mc) = mean_se(sum_mc, sum2_mc, ok_mc);
      }
      table.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const CurveRow& a, const CurveRow& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    if (a.proc != b.proc) return a.proc < b.proc;
    return a.bags < b.bags;
  });
  return table;
}

namespace {

std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_curve_csv(std::ostream& out, const CurveTable& table) {
  out << "gamma,p,proc,M,mean_risk,se_risk,mean_risk_mc,se_risk_mc,analytic,monotonized_analytic,n_fail\n";
  for (const auto& r : table.rows) {
    out << fmt12(r.gamma) << ',' << r.p << ',' << r.proc << ',' << r.bags << ','
        << fmt12(r.mean_risk) << ',' << fmt12(r.se_risk) << ',' << fmt12(r.mean_risk_mc) << ','
        << fmt12(r.se_risk_mc) << ',' << fmt12(r.analytic) << ','
        << fmt12(r.monotonized_analytic) << ',' << r.n_fail << '\n';
  }
}

std::string curve_csv(const CurveTable& table) {
  std::ostringstream out;
  write_curve_csv(out, table);
  return out.str();
}

}  // namespace riskmono
