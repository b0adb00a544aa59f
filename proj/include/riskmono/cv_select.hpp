#pragma once

#include "riskmono/core.hpp"
#include "riskmono/risk_estimation.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riskmono {

/// Maps a training set to a fitted predictor.
using Fitter = std::function<LinearPredictor(const Dataset& train)>;

struct Candidate {
  std::string label;
  Fitter fit;
};

/// Indexed family of prediction procedures, in declaration order.
class CandidateFamily {
 public:
  void add(std::string label, Fitter fit);

  bool empty() const noexcept { return candidates_.empty(); }
  std::size_t size() const noexcept { return candidates_.size(); }
  const std::vector<Candidate>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<Candidate> candidates_;
};

struct RiskRow {
  std::string label;
  std::optional<RiskEstimate> estimate;
  /// Non-empty when the candidate failed to fit or evaluate.
  std::string error;

  bool ok() const noexcept { return estimate.has_value(); }
};

struct RiskTable {
  std::vector<RiskRow> rows;
  std::size_t selected = 0;

  const RiskRow& selected_row() const { return rows.at(selected); }
};

struct CvResult {
  RiskTable table;
  LinearPredictor predictor;
  /// Fitted candidate predictors (empty for failed rows), aligned with table.rows.
  std::vector<std::optional<LinearPredictor>> fitted;
  SplitPlan plan;
};

/// Fits every candidate on one training split, estimates each risk on the
/// matching test split, and returns the earliest minimiser. Failed candidates
/// are recorded and skipped; if all fail the first error is rethrown tagged
/// with its label.
CvResult cross_validate(const CandidateFamily& family, const Dataset& data, std::size_t n_te,
                        LossKind loss, const CenteringMethod& cen, std::uint64_t seed);

/// Steps 3-5 on an existing split.
CvResult cross_validate_on_split(const CandidateFamily& family, const TrainTestSplit& split,
                                 LossKind loss, const CenteringMethod& cen);

}  // namespace riskmono
