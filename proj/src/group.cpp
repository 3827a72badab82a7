#include "rough/group.hpp"

#include <random>

#include "rough/errors.hpp"

namespace rough {

namespace {

constexpr std::size_t kExhaustiveAssociativity = 256;
constexpr std::size_t kSampledTriples = 100000;
constexpr std::uint64_t kAssociativitySeed = 0x5eed'ab5c'0ffeULL;

std::string triple(Element a, Element b, Element c) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + ")";
}

}  // namespace

FiniteGroup::FiniteGroup(std::vector<Element> table, std::vector<std::string> labels)
    : order_(labels.empty() ? 0 : labels.size()), table_(std::move(table)), labels_(std::move(labels)) {
  if (order_ == 0) {
    std::size_t n = 0;
    while (n * n < table_.size()) ++n;
    order_ = n;
    for (std::size_t k = 0; k < n; ++k) labels_.push_back(std::to_string(k));
  }
  const std::size_t n = order_;
  if (n == 0) throw InputError("group must have positive order");
  if (table_.size() != n * n) {
    throw InputError("multiplication table has " + std::to_string(table_.size()) +
                     " entries, expected " + std::to_string(n * n));
  }
  for (auto v : table_) {
    if (v >= n) throw InputError("multiplication table entry " + std::to_string(v) + " out of range");
  }
  for (Element k = 0; k < n; ++k) {
    if (!by_label_.emplace(labels_[k], k).second) {
      throw InputError("duplicate element label '" + labels_[k] + "'");
    }
  }

  // Identity: the least e with e·x = x·e = x for all x.
  bool found = false;
  for (Element e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (Element x = 0; x < n && ok; ++x) ok = mul(e, x) == x && mul(x, e) == x;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw InputError("multiplication table has no two-sided identity");

  inverse_.assign(n, 0);
  for (Element a = 0; a < n; ++a) {
    bool has_inverse = false;
    for (Element b = 0; b < n; ++b) {
      if (mul(a, b) == identity_ && mul(b, a) == identity_) {
        inverse_[a] = b;
        has_inverse = true;
        break;
      }
    }
    if (!has_inverse) throw InputError("element '" + labels_[a] + "' has no two-sided inverse");
  }

  auto assoc = [&](Element a, Element b, Element c) {
    if (mul(mul(a, b), c) != mul(a, mul(b, c))) {
      throw InputError("multiplication table is not associative at " + triple(a, b, c));
    }
  };
  if (n <= kExhaustiveAssociativity) {
    for (Element a = 0; a < n; ++a)
      for (Element b = 0; b < n; ++b)
        for (Element c = 0; c < n; ++c) assoc(a, b, c);
  } else {
    exhaustive_ = false;
    std::mt19937_64 rng(kAssociativitySeed);
    for (std::size_t k = 0; k < kSampledTriples; ++k) {
      assoc(static_cast<Element>(rng() % n), static_cast<Element>(rng() % n),
            static_cast<Element>(rng() % n));
    }
  }

  for (Element a = 0; a < n && abelian_; ++a)
    for (Element b = a + 1; b < n && abelian_; ++b) abelian_ = mul(a, b) == mul(b, a);
}

std::optional<Element> FiniteGroup::find(std::string_view label) const {
  if (auto it = by_label_.find(std::string(label)); it != by_label_.end()) return it->second;
  return std::nullopt;
}

}  // namespace rough
