#include "rough/certificate.hpp"

namespace rough {

bool Certificate::check(const std::string& name, bool passed, Json witness) {
  Json entry = {{"name", name}, {"pass", passed}};
  if (!witness.is_null()) entry["witness"] = std::move(witness);
  checks.push_back(std::move(entry));
  verdict = verdict && passed;
  return passed;
}

void Certificate::merge(const Certificate& other, const std::string& prefix) {
  for (const auto& entry : other.checks) {
    Json copy = entry;
    copy["name"] = prefix + "." + entry["name"].get<std::string>();
    checks.push_back(std::move(copy));
  }
  for (const auto& n : other.notes) notes.push_back(prefix + ": " + n);
  verdict = verdict && other.verdict;
}

std::size_t Certificate::failures() const {
  std::size_t count = 0;
  for (const auto& entry : checks) {
    if (!entry["pass"].get<bool>()) ++count;
  }
  return count;
}

Json Certificate::to_json() const {
  Json out;
  out["claim"] = claim;
  out["statement"] = anchor;
  out["verdict"] = verdict ? "pass" : "fail";
  out["inputs"] = inputs;
  out["checks"] = checks;
  out["values"] = values;
  out["budgets"] = budgets;
  out["notes"] = notes;
  return out;
}

}  // namespace rough
