#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rough/certificate.hpp"
#include "rough/gset.hpp"
#include "rough/measure.hpp"

namespace rough {

/// S(B) = {g ∈ A²ᵐ : min{μ(B ∩ gBT), μ(gB ∩ BT)} ≥ 2μ(A²ᵐ)/t²} with A the
/// measure's base and T = T_i. Throws InputError when B ⊄ Aᵐ or when
/// μ(B) < 2μ(A²ᵐ)/t (the message carries the exact deficit).
/// Certificate: S t-thick in Aᵐ (exact), S ⊆ BTB⁻¹, S symmetric.
std::pair<GSet, Certificate> stable_set(const RoughMeasure& mu, const ThickeningChain& chain, std::size_t i,
                                        const GSet& b, std::int64_t t, std::size_t m = 1);

/// Least α ≥ 0 with (1−ε)^α ≤ a/b, i.e. ⌈ln(b/a) / −ln(1−ε)⌉. Requires
/// 0 < a ≤ b and 0 < ε < 1.
std::int64_t sanders_bound(const Rational& a, const Rational& b, const Rational& epsilon);

/// values[k][x] = f_k at chain position x. Returns the first position x such
/// that f_k(y) > (1−ε)·f_k(x) for every later y and every k, and certifies the
/// greedy drop count of each f_k against sanders_bound(a, b, ε).
std::pair<std::size_t, Certificate> sanders_stable_index(const std::vector<std::vector<Rational>>& values,
                                                         const Rational& a, const Rational& b,
                                                         const Rational& epsilon);

struct IterationParams {
  std::size_t m = 1;
  std::size_t r = 2;
  std::size_t i = 0;
  /// Defaults to μ_i(A^{2m+r}).
  std::optional<Rational> K;
  /// Defaults to μ_i(B) / (2rK).
  std::optional<Rational> epsilon;
  /// 0 selects the Sanders budget r·α.
  std::size_t max_iterations = 0;
  /// r-tuples checked exhaustively up to this count, otherwise sampled.
  std::uint64_t tuple_budget = 1'000'000;
  std::size_t tuple_samples = 10'000;
  std::uint64_t seed = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;
};

struct IterationStep {
  GSet x;
  GSet s;
  /// Scale t_n, capped once every nonempty subset passes the threshold.
  std::int64_t t = 0;
  bool t_saturated = false;
  std::optional<Element> g;
  std::optional<std::size_t> k;
  std::vector<Rational> f_before;
  std::vector<Rational> f_after;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  [[nodiscard]] std::size_t shrinks() const;
};

struct SquareIterationResult {
  GSet x;
  GSet s;
  IterationTrace trace;
  Rational K;
  Rational epsilon;
  std::int64_t sanders_budget = 0;
  Certificate certificate;
};

/// X ↦ X ∩ gXT_i driven by (1−ε)-drops of f_k(X) = μ(X·T^k·B·T^k ∩ A^{2m+r}),
/// k < r, over g in the directed set S_n, until no drop remains. Certificates:
/// (a) S t_final-thick in Aᵐ, (b) XB ∩ g_{<r}·X·T^r·B·T^r ≠ ∅ for r-tuples of
/// S, (c) S^r ⊆ B·B·T^r·B·T^r·B. B must be symmetric and contained in Aᵐ.
SquareIterationResult square_iteration(const RoughMeasure& mu, const ThickeningChain& chain, const GSet& b,
                                       const IterationParams& params = {});

struct CoreParams {
  std::size_t stages = 2;
  std::size_t r = 8;
  /// Chain index driving every stage; defaults to the last.
  std::optional<std::size_t> i;
  /// m values at which the thickness of H in Aᵐ is reported.
  std::vector<std::size_t> thickness_m = {1, 2};
  std::uint64_t tuple_budget = 1'000'000;
  std::size_t tuple_samples = 10'000;
  std::uint64_t seed = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;
};

struct CoreStage {
  GSet a_n;
  GSet h;
  GSet n;
};

struct CoreResult {
  GSet h;
  GSet n;
  std::vector<CoreStage> stages;
  Certificate certificate;
};

/// A_0 = A, A_{n+1} = S from square_iteration on A_n with m = 2ⁿ;
/// H = ⋂ A_n⁴·T_last and N its normal core under ⟨A·T_last⟩.
CoreResult bounded_core(const RoughMeasure& mu, const ThickeningChain& chain, const CoreParams& params = {});

}  // namespace rough
