#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "rough/certificate.hpp"
#include "rough/group.hpp"

namespace rough {

/// A subset of a finite group, stored as a membership bitset over element
/// indices. Value type; the group is shared.
class GSet {
 public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  explicit GSet(std::shared_ptr<const FiniteGroup> group);
  GSet(std::shared_ptr<const FiniteGroup> group, std::span<const Element> elements);
  GSet(std::shared_ptr<const FiniteGroup> group, std::initializer_list<Element> elements);

  static GSet full(std::shared_ptr<const FiniteGroup> group);
  static GSet identity_set(std::shared_ptr<const FiniteGroup> group);

  [[nodiscard]] const FiniteGroup& group() const noexcept { return *group_; }
  [[nodiscard]] const std::shared_ptr<const FiniteGroup>& group_ptr() const noexcept { return group_; }
  [[nodiscard]] const Bits& bits() const noexcept { return bits_; }

  [[nodiscard]] bool contains(Element g) const { return bits_.test(g); }
  void insert(Element g) { bits_.set(g); }
  void erase(Element g) { bits_.reset(g); }

  [[nodiscard]] std::size_t size() const noexcept { return bits_.count(); }
  [[nodiscard]] bool empty() const noexcept { return bits_.none(); }
  [[nodiscard]] bool is_full() const noexcept { return bits_.all(); }
  /// Least element in canonical order; the set must be nonempty.
  [[nodiscard]] Element first() const;
  [[nodiscard]] std::vector<Element> elements() const;
  [[nodiscard]] bool is_subset_of(const GSet& other) const;
  [[nodiscard]] bool intersects(const GSet& other) const;
  [[nodiscard]] std::size_t hash() const noexcept;

  template <class F>
  void for_each(F&& f) const {
    for (auto k = bits_.find_first(); k != Bits::npos; k = bits_.find_next(k)) {
      f(static_cast<Element>(k));
    }
  }

  GSet& operator|=(const GSet& other);
  GSet& operator&=(const GSet& other);
  GSet& operator-=(const GSet& other);

  friend GSet operator|(GSet a, const GSet& b) { return a |= b; }
  friend GSet operator&(GSet a, const GSet& b) { return a &= b; }
  friend GSet operator-(GSet a, const GSet& b) { return a -= b; }
  friend bool operator==(const GSet& a, const GSet& b) { return a.bits_ == b.bits_; }

 private:
  void require_same_group(const GSet& other) const;

  std::shared_ptr<const FiniteGroup> group_;
  Bits bits_;
};

struct GSetHash {
  std::size_t operator()(const GSet& s) const noexcept { return s.hash(); }
};

/// Sorted element indices, the serialized form of a set.
Json to_json(const GSet& set);
/// Short stable fingerprint of a set (hex), used for replay records.
std::string fingerprint(const GSet& set);

enum class Side { left, right };

/// XY = {xy : x ∈ X, y ∈ Y}.
GSet product_set(const GSet& x, const GSet& y);
/// Xⁿ with X⁰ = {1}.
GSet power(const GSet& x, std::size_t n);
GSet inverse_set(const GSet& x);
/// 1 ∈ X = X⁻¹
bool is_symmetric(const GSet& x);
/// gX (left) or Xg (right).
GSet translate_set(Element g, const GSet& x, Side side = Side::left);
/// {a⁻¹ t a : t ∈ T, a ∈ A}
GSet conjugates(const GSet& t, const GSet& a);
/// X normalises Y iff x⁻¹Yx ⊆ Y for every x ∈ X; witness (x, y) on failure.
Certificate normalizes(const GSet& x, const GSet& y);
/// Subgroup generated by A.
GSet generated_closure(const GSet& a);
/// ⋂_{g ∈ U} g X g⁻¹
GSet normal_core(const GSet& x, const GSet& under);

/// Lazily extended table of powers A⁰, A¹, A², … of a fixed set.
class PowerTable {
 public:
  explicit PowerTable(GSet base);
  const GSet& operator()(std::size_t n);
  [[nodiscard]] const GSet& base() const noexcept { return powers_[1]; }

 private:
  std::vector<GSet> powers_;
};

}  // namespace rough
