#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "rough/certificate.hpp"
#include "rough/gset.hpp"
#include "rough/measure.hpp"

namespace rough {

struct ApproximateWitness {
  GSet e;
  std::int64_t k = 0;
  GSet z;
  /// Each entry names a containment and whether it was verified by products.
  Json containments = Json::array();
};

struct ApproximateResult {
  bool holds = false;
  /// False when greedy exceeded K on an instance too large for the exact cover.
  bool exact = true;
  ApproximateWitness witness;
  Certificate certificate;
};

/// Is A² ⊆ E·A·Z for some |E| ≤ K? Greedy cover by translates of AZ (largest
/// gain, least index on ties); when greedy needs more than K translates and at
/// most 24 translates meet A², an exact search settles the answer.
ApproximateResult is_rough_approximate(const GSet& a, std::int64_t k, const GSet& z);

/// Chain indices i..i+3 measured by packing at their radii (or counting when
/// the chain has none) and normalised at the chain's base A.
struct RuzsaContext {
  std::shared_ptr<const LeftInvariantMetric> metric;
  SearchMode mode = SearchMode::exact;
  std::uint64_t budget = kDefaultNodeBudget;
};

/// Greedy maximal E ⊆ A³ with eA ∩ fA·T_{i+3} = ∅ for distinct e, f ∈ E.
/// Certificate: maximality, A³ ⊆ E·A²·T_{i+2}, (A²)² ⊆ E²·A²·T_i,
/// |E| ≤ ⌊μ_{i+3}(A⁴)⌋ and μ_{i+3}(⋃ eA) = |E|.
std::pair<GSet, Certificate> rough_ruzsa_cover(const ThickeningChain& chain, std::size_t i,
                                               const RuzsaContext& context);

struct PowerBound {
  Rational lhs;
  Rational bound;
  GSet e;
  std::size_t j = 0;
  Certificate certificate;
};

/// E with Aᵐ ⊆ E·A²·T_j from an iterated Ruzsa cover, and the certified bound
/// μ_i(Aᵐ) ≤ |E|·μ_i(A²·T_j).
PowerBound power_bound_propagation(const ThickeningChain& chain, std::size_t i, std::size_t m,
                                   const RuzsaContext& context);

}  // namespace rough
