#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rough/certificate.hpp"
#include "rough/gset.hpp"
#include "rough/independent_set.hpp"
#include "rough/metric.hpp"
#include "rough/rational.hpp"

namespace rough {

/// Descending chain T_0 ⊇ T_1 ⊇ … ⊇ T_I of symmetric sets relative to a base
/// set A. The last element stands in for the infinite intersection.
class ThickeningChain {
 public:
  /// T_i = ball(r_i); radii must be non-increasing and non-negative.
  static ThickeningChain from_radii(const LeftInvariantMetric& metric, std::vector<Rational> radii, GSet base);
  static ThickeningChain from_sets(std::vector<GSet> sets, GSet base);

  [[nodiscard]] std::size_t size() const noexcept { return sets_.size(); }
  [[nodiscard]] const GSet& at(std::size_t i) const;
  [[nodiscard]] const GSet& last() const { return sets_.back(); }
  [[nodiscard]] std::size_t last_index() const noexcept { return sets_.size() - 1; }
  [[nodiscard]] bool has_radii() const noexcept { return !radii_.empty(); }
  [[nodiscard]] std::optional<Rational> radius(std::size_t i) const;
  [[nodiscard]] const std::vector<Rational>& radii() const noexcept { return radii_; }
  [[nodiscard]] const GSet& base() const noexcept { return base_; }

  /// Symmetry, descent, T_{i+1}² ⊆ T_i and T_{i+1}^A ⊆ T_i, with witnesses.
  [[nodiscard]] Certificate validate() const;

 private:
  ThickeningChain(std::vector<GSet> sets, std::vector<Rational> radii, GSet base);

  std::vector<GSet> sets_;
  std::vector<Rational> radii_;
  GSet base_;
};

struct PackingResult {
  std::int64_t value = 0;
  GSet witness;
  /// False in greedy mode or when the exact search ran out of budget.
  bool exact = true;
  std::int64_t upper_bound = 0;
  std::uint64_t nodes = 0;
};

/// N_r(Y): the largest subset of Y whose points are pairwise more than r apart.
PackingResult packing_number(const LeftInvariantMetric& metric, const GSet& y, const Rational& r,
                             SearchMode mode = SearchMode::exact, std::uint64_t budget = kDefaultNodeBudget);

struct RoughMeasureSpec {
  enum class Kind { packing, counting };
  Kind kind = Kind::packing;
  /// Chain index whose radius sets the packing scale.
  std::size_t index = 0;
  SearchMode mode = SearchMode::exact;
  std::uint64_t budget = kDefaultNodeBudget;
};

/// μ(Y) = N(Y) / N(A): a packing number (or cardinality) normalised at A.
/// Values are cached per set; copies share the cache, which is thread-safe.
class RoughMeasure {
 public:
  static RoughMeasure packing(std::shared_ptr<const LeftInvariantMetric> metric, Rational radius, GSet base,
                              SearchMode mode = SearchMode::exact, std::uint64_t budget = kDefaultNodeBudget);
  static RoughMeasure counting(GSet base);
  /// Packing at the chain's radius for spec.index; counting measure when the
  /// chain has no radii or spec.kind is counting.
  static RoughMeasure for_chain(std::shared_ptr<const LeftInvariantMetric> metric, const ThickeningChain& chain,
                                const RoughMeasureSpec& spec);

  /// Exact value. Throws BudgetExceeded if an exact-mode search aborts.
  Rational operator()(const GSet& y) const;
  /// Unnormalised N(Y).
  std::int64_t raw(const GSet& y) const;
  [[nodiscard]] std::int64_t normaliser() const noexcept;
  [[nodiscard]] bool exact_mode() const noexcept;
  [[nodiscard]] const GSet& base() const noexcept;
  [[nodiscard]] Json describe() const;

 private:
  struct State;
  explicit RoughMeasure(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

/// μ(Y) for a packing spec on a chain, with the spec's error conditions.
Rational mu(std::shared_ptr<const LeftInvariantMetric> metric, const ThickeningChain& chain,
            const RoughMeasureSpec& spec, const GSet& y);

struct AxiomCheckOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  /// Random sets are drawn inside this set; defaults to the whole group.
  std::optional<GSet> universe;
  /// Inclusion probability; 0 draws a density per trial from {1/8, …, 5/8}.
  double density = 0.0;
  /// Check μ(gY) = μ(Y) for every g (otherwise one seeded g per trial).
  bool all_translates = true;
};

/// Monotonicity, subadditivity, additivity modulo T_i and left invariance of
/// the measure over seeded (or, for tiny universes, exhaustive) pairs.
Certificate check_measure_axioms(const RoughMeasure& measure, const ThickeningChain& chain, std::size_t i,
                                 const AxiomCheckOptions& options = {});

/// Additivity modulo T for one pair, recorded with both conventions.
Certificate check_additivity_pair(const RoughMeasure& measure, const GSet& y, const GSet& z, const GSet& t);

struct UnionBound {
  Rational lhs;
  Rational rhs;
  Rational slack;
  Certificate certificate;
};

/// μ(⋃S_k) ≥ Σ μ(S_k) − Σ_{k<l} min{μ(S_k ∩ S_l T), μ(S_k T ∩ S_l)}.
/// Requires an exact-mode measure (InputError otherwise).
UnionBound union_lower_bound(const RoughMeasure& measure, const std::vector<GSet>& sets, const GSet& t);

}  // namespace rough
