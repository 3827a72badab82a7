#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rough {

/// Element of a finite group: its row index in the multiplication table.
/// Indices define the canonical order used for every tie-break.
using Element = std::uint32_t;

/// A finite group given by its multiplication table.
///
/// Construction validates the group laws: associativity (exhaustively up to
/// order 256, otherwise on 100000 seeded triples), a two-sided identity and
/// two-sided inverses. Throws InputError on any violation.
class FiniteGroup {
 public:
  FiniteGroup(std::vector<Element> table, std::vector<std::string> labels);

  [[nodiscard]] std::size_t order() const noexcept { return order_; }
  [[nodiscard]] Element identity() const noexcept { return identity_; }

  [[nodiscard]] Element mul(Element a, Element b) const noexcept {
    return table_[static_cast<std::size_t>(a) * order_ + b];
  }
  [[nodiscard]] Element inv(Element a) const noexcept { return inverse_[a]; }
  /// g⁻¹ x g
  [[nodiscard]] Element conj(Element g, Element x) const noexcept {
    return mul(inv(g), mul(x, g));
  }
  /// Row a of the table: the left translation x ↦ a·x.
  [[nodiscard]] std::span<const Element> row(Element a) const noexcept {
    return {table_.data() + static_cast<std::size_t>(a) * order_, order_};
  }

  [[nodiscard]] const std::string& label(Element a) const { return labels_.at(a); }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] std::optional<Element> find(std::string_view label) const;
  [[nodiscard]] bool is_abelian() const noexcept { return abelian_; }
  /// True iff associativity was checked on every triple.
  [[nodiscard]] bool associativity_exhaustive() const noexcept { return exhaustive_; }

 private:
  std::size_t order_;
  std::vector<Element> table_;
  std::vector<Element> inverse_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Element> by_label_;
  Element identity_ = 0;
  bool abelian_ = true;
  bool exhaustive_ = true;
};

}  // namespace rough
