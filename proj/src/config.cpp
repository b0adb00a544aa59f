#include "riskmono/error.hpp"
#include "riskmono/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace riskmono {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  require(ec == std::errc() && ptr == value.data() + value.size() && !value.empty(),
          ErrorCode::InvalidArgument, "key '" + key + "' expects a number, got '" + value + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  require(ec == std::errc() && ptr == value.data() + value.size() && !value.empty(),
          ErrorCode::InvalidArgument,
          "key '" + key + "' expects a nonnegative integer, got '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  fail(ErrorCode::InvalidArgument, "key '" + key + "' expects a boolean, got '" + value + "'");
}

}  // namespace

void apply_sweep_setting(SweepConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "n") {
    cfg.n = to_uint(key, value);
  } else if (key == "gamma" || key == "gamma_grid") {
    cfg.gamma_grid = parse_grid(value);
  } else if (key == "reps") {
    cfg.reps = to_uint(key, value);
  } else if (key == "n_mc") {
    cfg.n_mc = to_uint(key, value);
  } else if (key == "model") {
    if (value == "dense") {
      cfg.model.kind = SignalKind::DenseGaussian;
    } else if (value == "sparse") {
      cfg.model.kind = SignalKind::SparseBernoulli;
    } else {
      fail(ErrorCode::InvalidArgument, "model must be dense or sparse, got '" + value + "'");
    }
  } else if (key == "rho2") {
    cfg.model.rho2 = to_real(key, value);
  } else if (key == "sigma2") {
    cfg.model.sigma2 = to_real(key, value);
  } else if (key == "epsilon") {
    cfg.model.epsilon = to_real(key, value);
  } else if (key == "magnitude") {
    cfg.model.magnitude = to_real(key, value);
  } else if (key == "procedure" || key == "proc") {
    cfg.procedure = parse_procedure(value);
  } else if (key == "base") {
    // Penalty may be given later in the file; validate() checks it.
    cfg.base.kind = parse_base_procedure(value, 1.0).kind;
  } else if (key == "lambda") {
    cfg.base.lambda = to_real(key, value);
  } else if (key == "M" || key == "bags") {
    std::vector<std::size_t> bags;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) bags.push_back(to_uint(key, trim(item)));
    require(!bags.empty(), ErrorCode::InvalidArgument, "key 'M' needs at least one value");
    cfg.bags = bags;
  } else if (key == "n_te" || key == "nte") {
    cfg.mono.n_te = to_uint(key, value);
  } else if (key == "block") {
    cfg.mono.block = to_uint(key, value);
  } else if (key == "nu") {
    cfg.mono.nu = to_real(key, value);
  } else if (key == "centering") {
    if (value == "avg") {
      cfg.mono.cen = CenteringMethod::avg();
    } else if (value == "mom") {
      cfg.mono.cen = CenteringMethod::mom(cfg.mono.cen.kind == CenteringMethod::Kind::Mom
                                              ? cfg.mono.cen.eta
                                              : 0.05);
    } else {
      fail(ErrorCode::InvalidArgument, "centering must be avg or mom, got '" + value + "'");
    }
  } else if (key == "eta") {
    cfg.mono.cen = CenteringMethod::mom(to_real(key, value));
  } else if (key == "include_null") {
    cfg.mono.include_null = to_bool(key, value);
  } else if (key == "seed" || key == "master_seed") {
    cfg.master_seed = to_uint(key, value);
  } else if (key == "threads") {
    cfg.threads = to_uint(key, value);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
  }
}

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidArgument,
           "line " + std::to_string(line_no) + ": expected 'key = value', got '" + trim(line) + "'");
    }
    try {
      apply_sweep_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

SweepConfig read_sweep_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

}  // namespace riskmono
