#pragma once

#include <string>
#include <vector>

#include "explainkit/shapley.hpp"

namespace explainkit {

struct ReasonCode {
  int rank = 0;
  std::string feature;
  double observed_value = 0.0;
  double phi = 0.0;
  std::string direction;  // "increases" or "decreases"
  std::string text;
};

struct ReasonCodeList {
  std::vector<ReasonCode> codes;
  bool flagged_short = false;  // fewer positive contributions than requested
};

// Top-k features pushing the prediction toward the adverse outcome
// (largest positive phi), rendered as adverse-action sentences.
ReasonCodeList reason_codes(const ShapleyExplanation& explanation,
                            const std::vector<double>& x,
                            const std::vector<std::string>& names, int k);

std::string reason_codes_to_json(const ReasonCodeList& list);

}  // namespace explainkit
