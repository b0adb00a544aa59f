#include "riskmono/core.hpp"

#include "riskmono/error.hpp"
#include "riskmono/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace riskmono {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidSplit: return "invalid-split";
    case ErrorCode::InvalidSubsample: return "invalid-subsample";
    case ErrorCode::InfeasibleEta: return "infeasible-eta";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Solver: return "solver";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Dataset::Dataset(Matrix features, Vector response)
    : features_(std::move(features)), response_(std::move(response)) {
  require(response_.size() == features_.rows(), ErrorCode::InvalidArgument,
          "response length " + std::to_string(response_.size()) +
              " does not match feature rows " + std::to_string(features_.rows()));
  require(features_.allFinite() && response_.allFinite(), ErrorCode::Numeric,
          "dataset contains non-finite entries");
}

Dataset Dataset::empty(Index p) { return Dataset(Matrix(0, p), Vector(0)); }

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Matrix x(static_cast<Index>(rows.size()), cols());
  Vector y(static_cast<Index>(rows.size()));
  for (Index i = 0; i < x.rows(); ++i) {
    const auto r = static_cast<Index>(rows[static_cast<std::size_t>(i)]);
    x.row(i) = features_.row(r);
    y(i) = response_(r);
  }
  Dataset out;
  out.features_ = std::move(x);
  out.response_ = std::move(y);
  return out;
}

Dataset Dataset::with_response(Vector response) const {
  return Dataset(features_, std::move(response));
}

double LinearPredictor::predict_one(const Eigen::Ref<const Vector>& x) const {
  return x.dot(coefficients);
}

Vector LinearPredictor::predict(const Matrix& x) const {
  if (x.rows() == 0) return Vector(0);
  return x * coefficients;
}

double evaluate_loss(LossKind kind, double y, double yhat) {
  require(std::isfinite(y) && std::isfinite(yhat), ErrorCode::Numeric,
          "loss evaluated on non-finite input");
  switch (kind) {
    case LossKind::SquaredError: {
      const double d = y - yhat;
      return d * d;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown loss kind");
}

TrainTestSplit split_train_test(const Dataset& data, std::size_t n_te, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.rows());
  require(n_te > 0 && n_te < n, ErrorCode::InvalidSplit,
          "test size " + std::to_string(n_te) + " must lie in (0, " + std::to_string(n) + ")");
  CounterRng rng(seed);
  auto perm = sample_without_replacement(n, n, rng);
  SplitPlan plan;
  plan.seed = seed;
  plan.test_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_te));
  plan.train_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_te), perm.end());
  TrainTestSplit out{data.select_rows(plan.train_indices), data.select_rows(plan.test_indices),
                     std::move(plan)};
  return out;
}

Dataset draw_subsample(const Dataset& data, std::size_t k, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.rows());
  require(k >= 1 && k <= n, ErrorCode::InvalidSubsample,
          "subsample size " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  CounterRng rng(seed);
  const auto rows = sample_without_replacement(n, k, rng);
  return data.select_rows(rows);
}

std::pair<Dataset, Dataset> draw_disjoint_pair(const Dataset& data, std::size_t k1,
                                               std::size_t k2, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.rows());
  require(k1 >= 1 && k1 + k2 <= n, ErrorCode::InvalidSubsample,
          "disjoint pair sizes " + std::to_string(k1) + " + " + std::to_string(k2) +
              " exceed " + std::to_string(n) + " rows");
  CounterRng rng(seed);
  const auto rows = sample_without_replacement(n, k1 + k2, rng);
  const std::span<const std::size_t> all(rows);
  Dataset second = k2 == 0 ? Dataset::empty(data.cols()) : data.select_rows(all.subspan(k1, k2));
  return {data.select_rows(all.first(k1)), std::move(second)};
}

std::size_t default_test_size(std::size_t n) {
  if (n < 3) return 1;
  const auto denom = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
  const std::size_t nte = (n + denom - 1) / denom;
  return std::clamp<std::size_t>(nte, 1, n - 1);
}

namespace {

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    fail(ErrorCode::Io, "line " + std::to_string(line) + ": cannot parse number '" +
                            std::string(field) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::Io, "line " + std::to_string(line_no) + ": expected " +
                              std::to_string(rows.front().size()) + " fields, found " +
                              std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::Io, "dataset CSV has no rows");
  require(rows.front().size() >= 2, ErrorCode::Io,
          "dataset CSV needs a response column and at least one feature");
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(rows.front().size()) - 1;
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    y(i) = r[0];
    for (Index j = 0; j < p; ++j) x(i, j) = r[static_cast<std::size_t>(j) + 1];
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open dataset '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset_csv(buffer.str());
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write dataset '" + path + "'");
  out.precision(17);
  for (Index i = 0; i < data.rows(); ++i) {
    out << data.response()(i);
    for (Index j = 0; j < data.cols(); ++j) out << ',' << data.features()(i, j);
    out << '\n';
  }
}

}  // namespace riskmono
