#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace riskmono {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observations (rows of `features`) with their responses. Entries are finite
/// and the response length matches the row count; both checked on construction.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, Vector response);

  /// Zero rows with `p` feature columns.
  static Dataset empty(Index p);

  Index rows() const noexcept { return features_.rows(); }
  Index cols() const noexcept { return features_.cols(); }
  bool empty() const noexcept { return features_.rows() == 0; }

  const Matrix& features() const noexcept { return features_; }
  const Vector& response() const noexcept { return response_; }

  Dataset select_rows(std::span<const std::size_t> rows) const;
  /// Same features, different response (e.g. residuals).
  Dataset with_response(Vector response) const;

 private:
  Matrix features_;
  Vector response_;
};

/// A fitted linear rule x -> x^T beta. No intercept: every model in this
/// library is centered.
struct LinearPredictor {
  Vector coefficients;
  std::vector<std::string> warnings;

  LinearPredictor() = default;
  explicit LinearPredictor(Vector beta) : coefficients(std::move(beta)) {}

  static LinearPredictor zeros(Index p) { return LinearPredictor(Vector::Zero(p)); }

  Index dim() const noexcept { return coefficients.size(); }
  double predict_one(const Eigen::Ref<const Vector>& x) const;
  Vector predict(const Matrix& x) const;
};

enum class LossKind { SquaredError };

double evaluate_loss(LossKind kind, double y, double yhat);

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  SplitPlan plan;
};

/// Uniform random split with `n_te` test rows; 0 < n_te < n.
TrainTestSplit split_train_test(const Dataset& data, std::size_t n_te, std::uint64_t seed);

/// Uniform size-k subset of rows without replacement; 1 <= k <= n.
Dataset draw_subsample(const Dataset& data, std::size_t k, std::uint64_t seed);

/// Two row-disjoint subsets of sizes k1 and k2. The first subset is the same
/// rows draw_subsample(data, k1, seed) returns.
std::pair<Dataset, Dataset> draw_disjoint_pair(const Dataset& data, std::size_t k1,
                                               std::size_t k2, std::uint64_t seed);

/// ceil(n / ceil(ln n)), clamped into [1, n-1].
std::size_t default_test_size(std::size_t n);

/// Headerless CSV; response in the first column, features after it.
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);
void write_dataset_csv(const std::string& path, const Dataset& data);

}  // namespace riskmono
