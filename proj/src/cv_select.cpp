#include "riskmono/cv_select.hpp"

#include "riskmono/error.hpp"


namespace riskmono {

void CandidateFamily::add(std::string label, Fitter fit) {
  for (const auto& c : candidates_) {
    require(c.label != label, ErrorCode::InvalidArgument, "duplicate candidate label '" + label + "'");
  }
  require(static_cast<bool>(fit), ErrorCode::InvalidArgument, "candidate '" + label + "' has no fitter");
  candidates_.push_back(Candidate{std::move(label), std::move(fit)});
}

CvResult cross_validate_on_split(const CandidateFamily& family, const TrainTestSplit& split,
                                 LossKind loss, const CenteringMethod& cen) {
  require(!family.empty(), ErrorCode::InvalidArgument, "candidate family is empty");
  CvResult out;
  out.plan = split.plan;
  out.table.rows.reserve(family.size());
  out.fitted.reserve(family.size());

  std::optional<std::size_t> best;
  std::optional<Error> first_error;
  for (const auto& cand : family.candidates()) {
    RiskRow row;
    row.label = cand.label;
    std::optional<LinearPredictor> pred;
    try {
      pred = cand.fit(split.train);
      row.estimate = estimate_risk(*pred, split.test, loss, cen);
    } catch (const Error& e) {
      row.error = e.what();
      pred.reset();
      if (!first_error) {
        first_error = Error(e.code(), "candidate '" + cand.label + "': " + e.what());
      }
    }
    if (row.ok() && (!best || row.estimate->value < out.table.rows[*best].estimate->value)) {
      best = out.table.rows.size();
    }
    out.table.rows.push_back(std::move(row));
    out.fitted.push_back(std::move(pred));
  }
  if (!best) throw *first_error;
  out.table.selected = *best;
  out.predictor = *out.fitted[*best];
  return out;
}

CvResult cross_validate(const CandidateFamily& family, const Dataset& data, std::size_t n_te,
                        LossKind loss, const CenteringMethod& cen, std::uint64_t seed) {
  require(!family.empty(), ErrorCode::InvalidArgument, "candidate family is empty");
  const TrainTestSplit split = split_train_test(data, n_te, seed);
  return cross_validate_on_split(family, split, loss, cen);
}

}  // namespace riskmono
