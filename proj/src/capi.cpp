#include "riskmono/riskmono.h"

#include "riskmono/core.hpp"
#include "riskmono/error.hpp"
#include "riskmono/monotonize.hpp"
#include "riskmono/predictors.hpp"
#include "riskmono/profiles.hpp"
#include "riskmono/selftest.hpp"
#include "riskmono/simulation.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <limits>
#include <new>
#include <sstream>
#include <string>

using namespace riskmono;

struct rm_dataset {
  Dataset data;
};

struct rm_result {
  MonotonizeResult result;
  std::string text;
};

struct rm_sweep_config {
  SweepConfig config;
};

struct rm_curve {
  CurveTable table;
  std::string csv;
};

struct rm_selftest_report {
  std::vector<SelftestCheck> checks;
};

namespace {

thread_local std::string g_last_error;

rm_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RM_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidSplit: return RM_ERR_INVALID_SPLIT;
    case ErrorCode::InvalidSubsample: return RM_ERR_INVALID_SUBSAMPLE;
    case ErrorCode::InfeasibleEta: return RM_ERR_INFEASIBLE_ETA;
    case ErrorCode::Numeric: return RM_ERR_NUMERIC;
    case ErrorCode::Domain: return RM_ERR_DOMAIN;
    case ErrorCode::Solver: return RM_ERR_SOLVER;
    case ErrorCode::Io: return RM_ERR_IO;
  }
  return RM_ERR_INTERNAL;
}

template <class F>
rm_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return RM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

profiles::Profile base_profile(const std::string& kind, const rm_profile_params& params) {
  if (kind == "mn2ls" || kind == "mn2") {
    return [params](double z) {
      if (std::isinf(z) && !params.include_null) return std::numeric_limits<double>::quiet_NaN();
      return profiles::mn2ls_profile_isotropic(z, params.rho2, params.sigma2);
    };
  }
  if (kind == "mn1ls" || kind == "mn1") {
    require(params.epsilon > 0.0 && params.epsilon < 1.0, ErrorCode::InvalidArgument,
            "mn1ls profile needs epsilon in (0, 1)");
    const profiles::Mn1lsPrior prior{params.epsilon, std::sqrt(params.rho2 / params.epsilon)};
    return [params, prior](double z) {
      if (std::isinf(z) && !params.include_null) return std::numeric_limits<double>::quiet_NaN();
      return profiles::mn1ls_profile(z, prior, params.sigma2);
    };
  }
  fail(ErrorCode::InvalidArgument, "unknown profile kind '" + kind + "' (expected mn2ls or mn1ls)");
}

std::string render_table(const MonotonizeResult& r) {
  std::ostringstream out;
  out << std::setprecision(10);
  const auto& rows = r.cv.table.rows;
  out << "procedure " << procedure_label(r.procedure) << ", n_tr " << r.n_tr << ", block " << r.block
      << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << (i == r.cv.table.selected ? "* " : "  ") << std::left << std::setw(36) << rows[i].label;
    if (rows[i].ok()) {
      out << rows[i].estimate->value;
    } else {
      out << "failed: " << rows[i].error;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

extern "C" {

const char* rm_last_error(void) { return g_last_error.c_str(); }

const char* rm_status_string(rm_status status) {
  switch (status) {
    case RM_OK: return "ok";
    case RM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RM_ERR_INVALID_SPLIT: return "invalid split";
    case RM_ERR_INVALID_SUBSAMPLE: return "invalid subsample";
    case RM_ERR_INFEASIBLE_ETA: return "infeasible eta";
    case RM_ERR_NUMERIC: return "numeric error";
    case RM_ERR_DOMAIN: return "domain error";
    case RM_ERR_SOLVER: return "solver failure";
    case RM_ERR_IO: return "i/o error";
    case RM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rm_version(void) { return "0.1.0"; }

rm_status rm_dataset_read_csv(const char* path, rm_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rm_dataset{read_dataset_csv(path)};
  });
}

rm_status rm_dataset_from_arrays(const double* x, const double* y, size_t n, size_t p,
                                 rm_dataset** out) {
  return guarded([&] {
    need(out, "out");
    require(n == 0 || (x != nullptr || p == 0) , ErrorCode::InvalidArgument, "x is NULL");
    require(n == 0 || y != nullptr, ErrorCode::InvalidArgument, "y is NULL");
    const auto rows = static_cast<Index>(n);
    const auto cols = static_cast<Index>(p);
    Matrix xm(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) xm(i, j) = x[i * cols + j];
    Vector yv(rows);
    for (Index i = 0; i < rows; ++i) yv(i) = y[i];
    *out = new rm_dataset{Dataset(std::move(xm), std::move(yv))};
  });
}

size_t rm_dataset_rows(const rm_dataset* data) {
  return data ? static_cast<size_t>(data->data.rows()) : 0;
}
size_t rm_dataset_cols(const rm_dataset* data) {
  return data ? static_cast<size_t>(data->data.cols()) : 0;
}
void rm_dataset_free(rm_dataset* data) { delete data; }

void rm_monotonize_options_default(rm_monotonize_options* o) {
  if (!o) return;
  o->procedure = "zero";
  o->base = "mn2";
  o->lambda = 0.0;
  o->bags = 1;
  o->n_te = 0;
  o->block = 0;
  o->nu = 0.5;
  o->eta = 0.0;
  o->include_null = 1;
  o->seed = 0;
}

rm_status rm_monotonize(const rm_dataset* data, const rm_monotonize_options* o, rm_result** out) {
  return guarded([&] {
    need(data, "data");
    need(o, "options");
    need(out, "out");
    const ProcedureKind proc = parse_procedure(o->procedure ? o->procedure : "zero");
    require(proc != ProcedureKind::Base, ErrorCode::InvalidArgument,
            "monotonize needs procedure zero or one");
    const BaseProcedure base = parse_base_procedure(o->base ? o->base : "mn2", o->lambda);
    MonotonizeConfig cfg;
    cfg.bags = o->bags;
    cfg.n_te = o->n_te;
    cfg.block = o->block;
    cfg.nu = o->nu;
    cfg.cen = o->eta > 0.0 ? CenteringMethod::mom(o->eta) : CenteringMethod::avg();
    cfg.include_null = o->include_null != 0;
    cfg.seed = o->seed;
    MonotonizeResult r = proc == ProcedureKind::ZeroStep ? zero_step(data->data, base, cfg)
                                                         : one_step(data->data, base, cfg);
    std::string text = render_table(r);
    *out = new rm_result{std::move(r), std::move(text)};
  });
}

size_t rm_result_rows(const rm_result* r) { return r ? r->result.cv.table.rows.size() : 0; }

rm_status rm_result_row(const rm_result* r, size_t index, const char** label, double* risk, int* ok) {
  return guarded([&] {
    need(r, "result");
    const auto& rows = r->result.cv.table.rows;
    require(index < rows.size(), ErrorCode::InvalidArgument, "row index out of range");
    const auto& row = rows[index];
    if (label) *label = row.label.c_str();
    if (risk) *risk = row.ok() ? row.estimate->value : std::numeric_limits<double>::quiet_NaN();
    if (ok) *ok = row.ok() ? 1 : 0;
  });
}

size_t rm_result_selected(const rm_result* r) { return r ? r->result.cv.table.selected : 0; }
size_t rm_result_dim(const rm_result* r) {
  return r ? static_cast<size_t>(r->result.cv.predictor.dim()) : 0;
}

rm_status rm_result_coefficients(const rm_result* r, double* out, size_t len) {
  return guarded([&] {
    need(r, "result");
    need(out, "out");
    const auto& beta = r->result.cv.predictor.coefficients;
    require(len >= static_cast<size_t>(beta.size()), ErrorCode::InvalidArgument,
            "coefficient buffer too small");
    for (Index j = 0; j < beta.size(); ++j) out[j] = beta(j);
  });
}

const char* rm_result_table_text(const rm_result* r) { return r ? r->text.c_str() : ""; }
void rm_result_free(rm_result* r) { delete r; }

rm_status rm_profile_eval(const char* kind, const rm_profile_params* params, double gamma,
                          double* value) {
  return guarded([&] {
    need(kind, "kind");
    need(params, "params");
    need(value, "value");
    require(params->sigma2 > 0.0, ErrorCode::InvalidArgument, "sigma2 must be positive");
    require(params->rho2 >= 0.0, ErrorCode::InvalidArgument, "rho2 must be nonnegative");
    rm_profile_params p = *params;
    p.include_null = 1;
    *value = base_profile(kind, p)(gamma);
  });
}

rm_status rm_profile_monotonized(const char* kind, const rm_profile_params* params, double gamma,
                                 double* value) {
  return guarded([&] {
    need(kind, "kind");
    need(params, "params");
    need(value, "value");
    require(params->sigma2 > 0.0, ErrorCode::InvalidArgument, "sigma2 must be positive");
    require(params->rho2 >= 0.0, ErrorCode::InvalidArgument, "rho2 must be nonnegative");
    const auto prof = base_profile(kind, *params);
    auto safe = [&](double z) {
      try {
        return prof(z);
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    *value = profiles::monotonize_profile(gamma, safe);
  });
}

rm_status rm_onestep_optimum(double gamma, double rho2, double sigma2, double* risk, double* zeta1,
                             double* zeta2) {
  return guarded([&] {
    require(sigma2 > 0.0, ErrorCode::InvalidArgument, "sigma2 must be positive");
    const auto opt = profiles::optimize_onestep_iso(gamma, rho2 / sigma2);
    if (risk) *risk = opt.risk(sigma2);
    if (zeta1) *zeta1 = opt.zeta1;
    if (zeta2) *zeta2 = opt.zeta2;
  });
}

double rm_snr_star(void) { return profiles::snr_star(); }

rm_status rm_parse_grid(const char* text, double** values, size_t* count) {
  return guarded([&] {
    need(text, "text");
    need(values, "values");
    need(count, "count");
    const auto grid = parse_grid(text);
    auto* buf = static_cast<double*>(std::malloc(grid.size() * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, grid.data(), grid.size() * sizeof(double));
    *values = buf;
    *count = grid.size();
  });
}

void rm_free_doubles(double* values) { std::free(values); }

rm_status rm_sweep_config_new(rm_sweep_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new rm_sweep_config{};
  });
}

rm_status rm_sweep_config_read(const char* path, rm_sweep_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rm_sweep_config{read_sweep_config(path)};
  });
}

rm_status rm_sweep_config_set(rm_sweep_config* c, const char* key, const char* value) {
  return guarded([&] {
    need(c, "config");
    need(key, "key");
    need(value, "value");
    apply_sweep_setting(c->config, key, value);
  });
}

void rm_sweep_config_free(rm_sweep_config* c) { delete c; }

rm_status rm_sweep_run(const rm_sweep_config* c, rm_curve** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    CurveTable table = run_sweep(c->config);
    std::string csv = curve_csv(table);
    *out = new rm_curve{std::move(table), std::move(csv)};
  });
}

size_t rm_curve_rows(const rm_curve* c) { return c ? c->table.rows.size() : 0; }
const char* rm_curve_csv(const rm_curve* c) { return c ? c->csv.c_str() : ""; }
size_t rm_curve_message_count(const rm_curve* c) { return c ? c->table.messages.size() : 0; }
const char* rm_curve_message(const rm_curve* c, size_t index) {
  if (!c || index >= c->table.messages.size()) return "";
  return c->table.messages[index].c_str();
}
void rm_curve_free(rm_curve* c) { delete c; }

rm_status rm_selftest_run(rm_selftest_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = new rm_selftest_report{run_selftest()};
  });
}

size_t rm_selftest_count(const rm_selftest_report* r) { return r ? r->checks.size() : 0; }

rm_status rm_selftest_check(const rm_selftest_report* r, size_t index, const char** name,
                            int* passed, const char** detail) {
  return guarded([&] {
    need(r, "report");
    require(index < r->checks.size(), ErrorCode::InvalidArgument, "check index out of range");
    const auto& c = r->checks[index];
    if (name) *name = c.name.c_str();
    if (passed) *passed = c.passed ? 1 : 0;
    if (detail) *detail = c.detail.c_str();
  });
}

void rm_selftest_free(rm_selftest_report* r) { delete r; }

}  // extern "C"
