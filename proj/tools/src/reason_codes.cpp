#include "explainkit/reason_codes.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace explainkit {

ReasonCodeList reason_codes(const ShapleyExplanation& explanation,
                            const std::vector<double>& x,
                            const std::vector<std::string>& names, int k) {
  if (k < 1) throw std::invalid_argument("reason_codes: k must be >= 1");

  std::vector<std::size_t> order(explanation.phi.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return explanation.phi[a] > explanation.phi[b];
  });

  ReasonCodeList list;
  for (std::size_t f : order) {
    if (static_cast<int>(list.codes.size()) == k) break;
    if (explanation.phi[f] <= 0) break;
    ReasonCode code;
    code.rank = static_cast<int>(list.codes.size()) + 1;
    code.feature = names[f];
    code.observed_value = x[f];
    code.phi = explanation.phi[f];
    code.direction = "increases";
    std::ostringstream text;
    text.precision(6);
    text << "feature " << code.feature << " is " << code.observed_value << " (contribution +"
         << code.phi << ")";
    code.text = text.str();
    list.codes.push_back(std::move(code));
  }
  list.flagged_short = static_cast<int>(list.codes.size()) < k;
  return list;
}

std::string reason_codes_to_json(const ReasonCodeList& list) {
  nlohmann::json j;
  j["flagged_short"] = list.flagged_short;
  nlohmann::json codes = nlohmann::json::array();
  for (const auto& c : list.codes)
    codes.push_back({{"rank", c.rank},
                     {"feature", c.feature},
                     {"observed_value", c.observed_value},
                     {"phi", c.phi},
                     {"direction", c.direction},
                     {"text", c.text}});
  j["codes"] = std::move(codes);
  return j.dump(2);
}

}  // namespace explainkit
