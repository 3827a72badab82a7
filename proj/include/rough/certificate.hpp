#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rough {

using Json = nlohmann::ordered_json;

/// A re-checkable record of one verified claim.
///
/// `verdict` is the conjunction of every recorded check; a failing check
/// carries its witness (counterexample) verbatim. `values` holds exact
/// quantities (rationals as "p/q" strings), `inputs` the set hashes and seeds
/// needed to replay the run, and `notes` any finite truncation applied.
struct Certificate {
  std::string claim;
  std::string anchor;
  bool verdict = true;
  Json inputs = Json::object();
  Json checks = Json::array();
  Json values = Json::object();
  Json budgets = Json::object();
  std::vector<std::string> notes;

  Certificate() = default;
  Certificate(std::string claim_id, std::string statement)
      : claim(std::move(claim_id)), anchor(std::move(statement)) {}

  /// Records a named check and folds it into the verdict.
  bool check(const std::string& name, bool passed, Json witness = nullptr);

  void note(std::string text) { notes.push_back(std::move(text)); }

  /// Absorbs another certificate's checks (prefixed) and verdict.
  void merge(const Certificate& other, const std::string& prefix);

  [[nodiscard]] std::size_t failures() const;

  [[nodiscard]] Json to_json() const;
};

}  // namespace rough
