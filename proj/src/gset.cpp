#include "rough/gset.hpp"

#include <boost/functional/hash.hpp>

#include <cstdio>

#include "rough/errors.hpp"

namespace rough {

GSet::GSet(std::shared_ptr<const FiniteGroup> group) : group_(std::move(group)) {
  if (!group_) throw InputError("GSet requires a group");
  bits_.resize(group_->order());
}

GSet::GSet(std::shared_ptr<const FiniteGroup> group, std::span<const Element> elements)
    : GSet(std::move(group)) {
  for (auto g : elements) {
    if (g >= bits_.size()) throw InputError("element " + std::to_string(g) + " is not in the group");
    bits_.set(g);
  }
}

GSet::GSet(std::shared_ptr<const FiniteGroup> group, std::initializer_list<Element> elements)
    : GSet(std::move(group), std::span<const Element>(elements.begin(), elements.size())) {}

GSet GSet::full(std::shared_ptr<const FiniteGroup> group) {
  GSet s(std::move(group));
  s.bits_.set();
  return s;
}

GSet GSet::identity_set(std::shared_ptr<const FiniteGroup> group) {
  GSet s(group);
  s.insert(group->identity());
  return s;
}

Element GSet::first() const {
  const auto k = bits_.find_first();
  if (k == Bits::npos) throw InputError("first() of an empty set");
  return static_cast<Element>(k);
}

std::vector<Element> GSet::elements() const {
  std::vector<Element> out;
  out.reserve(size());
  for_each([&](Element g) { out.push_back(g); });
  return out;
}

bool GSet::is_subset_of(const GSet& other) const {
  require_same_group(other);
  return bits_.is_subset_of(other.bits_);
}

bool GSet::intersects(const GSet& other) const {
  require_same_group(other);
  return bits_.intersects(other.bits_);
}

std::size_t GSet::hash() const noexcept {
  return boost::hash_value(bits_);
}

GSet& GSet::operator|=(const GSet& other) {
  require_same_group(other);
  bits_ |= other.bits_;
  return *this;
}

GSet& GSet::operator&=(const GSet& other) {
  require_same_group(other);
  bits_ &= other.bits_;
  return *this;
}

GSet& GSet::operator-=(const GSet& other) {
  require_same_group(other);
  bits_ -= other.bits_;
  return *this;
}

void GSet::require_same_group(const GSet& other) const {
  if (group_ != other.group_) throw InputError("set operation across different groups");
}

Json to_json(const GSet& set) { return set.elements(); }

std::string fingerprint(const GSet& set) {
  // FNV-1a over the sorted member indices; stable across platforms.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int k = 0; k < 4; ++k) {
      h ^= (v >> (8 * k)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(set.group().order());
  set.for_each([&](Element g) { mix(g); });
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GSet product_set(const GSet& x, const GSet& y) {
  if (x.group_ptr() != y.group_ptr()) throw InputError("product of sets in different groups");
  const auto& g = x.group();
  GSet out(x.group_ptr());
  const std::size_t n = g.order();
  std::size_t filled = 0;
  if (x.size() <= y.size()) {
    const auto ys = y.elements();
    x.for_each([&](Element a) {
      if (filled == n) return;
      const auto row = g.row(a);
      for (auto b : ys) out.insert(row[b]);
      filled = out.size();
    });
  } else {
    const auto xs = x.elements();
    y.for_each([&](Element b) {
      if (filled == n) return;
      for (auto a : xs) out.insert(g.mul(a, b));
      filled = out.size();
    });
  }
  return out;
}

GSet power(const GSet& x, std::size_t n) {
  GSet acc = GSet::identity_set(x.group_ptr());
  for (std::size_t k = 0; k < n; ++k) {
    GSet next = product_set(acc, x);
    if (next == acc) break;
    acc = std::move(next);
  }
  return acc;
}

GSet inverse_set(const GSet& x) {
  GSet out(x.group_ptr());
  x.for_each([&](Element a) { out.insert(x.group().inv(a)); });
  return out;
}

bool is_symmetric(const GSet& x) {
  return x.contains(x.group().identity()) && inverse_set(x) == x;
}

GSet translate_set(Element g, const GSet& x, Side side) {
  const auto& grp = x.group();
  GSet out(x.group_ptr());
  if (side == Side::left) {
    const auto row = grp.row(g);
    x.for_each([&](Element a) { out.insert(row[a]); });
  } else {
    x.for_each([&](Element a) { out.insert(grp.mul(a, g)); });
  }
  return out;
}

GSet conjugates(const GSet& t, const GSet& a) {
  const auto& grp = t.group();
  GSet out(t.group_ptr());
  const auto ts = t.elements();
  a.for_each([&](Element g) {
    for (auto x : ts) out.insert(grp.conj(g, x));
  });
  return out;
}

Certificate normalizes(const GSet& x, const GSet& y) {
  Certificate cert("set_algebra.normalizes", "x^-1 Y x ⊆ Y for every x in X");
  cert.inputs = {{"X", fingerprint(x)}, {"Y", fingerprint(y)}};
  const auto& grp = x.group();
  Json witness = nullptr;
  const auto ys = y.elements();
  x.for_each([&](Element a) {
    if (!witness.is_null()) return;
    for (auto b : ys) {
      const auto c = grp.conj(a, b);
      if (!y.contains(c)) {
        witness = {{"x", a}, {"y", b}, {"x^-1 y x", c}};
        return;
      }
    }
  });
  cert.check("normalises", witness.is_null(), witness);
  return cert;
}

GSet generated_closure(const GSet& a) {
  if (a.empty()) throw InputError("generated_closure of an empty set");
  const GSet gens = a | inverse_set(a);
  GSet result = GSet::identity_set(a.group_ptr());
  GSet frontier = result;
  while (!frontier.empty()) {
    GSet next = product_set(frontier, gens) - result;
    result |= next;
    frontier = std::move(next);
  }
  return result;
}

GSet normal_core(const GSet& x, const GSet& under) {
  const auto& grp = x.group();
  GSet core = x;
  under.for_each([&](Element g) {
    if (core.empty()) return;
    // g X g⁻¹ = conjugate of X by g⁻¹
    GSet c(x.group_ptr());
    const auto gi = grp.inv(g);
    x.for_each([&](Element e) { c.insert(grp.conj(gi, e)); });
    core &= c;
  });
  return core;
}

PowerTable::PowerTable(GSet base) {
  powers_.push_back(GSet::identity_set(base.group_ptr()));
  powers_.push_back(std::move(base));
}

const GSet& PowerTable::operator()(std::size_t n) {
  while (powers_.size() <= n) powers_.push_back(product_set(powers_.back(), powers_[1]));
  return powers_[n];
}

}  // namespace rough
