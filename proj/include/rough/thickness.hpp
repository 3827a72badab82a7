#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>

#include "rough/certificate.hpp"
#include "rough/gset.hpp"
#include "rough/independent_set.hpp"
#include "rough/measure.hpp"

namespace rough {

struct ThicknessReport {
  /// Least t such that Y is t-thick in X: the size of a largest Y-free subset.
  std::int64_t t_star = 0;
  /// A largest Y-free subset of X (pairwise quotients outside Y).
  GSet witness;
  bool exact = true;
  std::int64_t upper_bound = 0;
  std::uint64_t nodes = 0;
};

/// Graph on X with g ~ h when g⁻¹h ∈ Y or h⁻¹g ∈ Y; t_star is its independence
/// number. Greedy mode (or an aborted exact search) gives a lower bound.
ThicknessReport min_thickness(const GSet& y, const GSet& x, SearchMode mode = SearchMode::exact,
                              std::uint64_t budget = kDefaultNodeBudget);

/// True iff Y is t-thick in X. Throws BudgetExceeded if the exact search aborts.
bool is_thick(const GSet& y, const GSet& x, std::int64_t t, std::uint64_t budget = kDefaultNodeBudget);

/// Greedy maximal Y-free subset E of X in canonical order; E·Y ⊇ X when Y is
/// symmetric. Certificate: cover, Y-freeness, maximality, |E| ≤ t_star(Y, X).
std::pair<GSet, Certificate> translate_cover(const GSet& y, const GSet& x,
                                             std::uint64_t budget = kDefaultNodeBudget);

/// Both directions of the cover/thickness correspondence for one pair:
/// |E| ≤ t_star(Y, X) and t_star(Y⁻¹Y, X) ≤ |E|.
Certificate thickness_duality(const GSet& y, const GSet& x, std::uint64_t budget = kDefaultNodeBudget);

/// Records t_star of Y₁, Y₂ and Y₁ ∩ Y₂ in X.
Certificate intersection_thickness(const GSet& y1, const GSet& y2, const GSet& x,
                                   std::uint64_t budget = kDefaultNodeBudget);

struct TrankContext {
  GSet a;
  std::size_t m = 1;
};

/// Exact evaluator for the recursive families 𝒯ᵗₙ of subsets of Aᵐ at one chain
/// index, with their directed stable sets Sᵗₙ(X) ⊆ A²ᵐ. Results are memoised on
/// (set, t, n). t saturates at |Aᵐ|, where every set is t-thick. Not thread-safe.
class TrankEvaluator {
 public:
  static constexpr std::size_t kDefaultMaxRank = 3;
  static constexpr std::size_t kMaxOrder = 512;
  static constexpr std::uint64_t kDefaultBudget = 2'000'000;

  TrankEvaluator(const ThickeningChain& chain, std::size_t i, TrankContext context,
                 std::size_t max_rank = kDefaultMaxRank, std::uint64_t budget = kDefaultBudget);

  /// X ∈ 𝒯ᵗₙ. X = ∅ is never a member.
  bool member(const GSet& x, std::int64_t t, std::size_t n);
  /// Sᵗₙ(X) = {g ∈ A²ᵐ : X ∩ gXT and X ∩ g⁻¹XT lie in 𝒯^{t²}ₙ}.
  GSet directed_stable_set(const GSet& x, std::int64_t t, std::size_t n);

  [[nodiscard]] const GSet& a_m() const noexcept { return a_m_; }
  [[nodiscard]] const GSet& a_2m() const noexcept { return a_2m_; }
  [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }
  [[nodiscard]] std::size_t memo_size() const noexcept { return memo_.size(); }

 private:
  struct Key {
    GSet::Bits bits;
    std::int64_t t;
    std::size_t n;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  std::int64_t saturate(std::int64_t t) const;
  void require_domain(const GSet& x, std::int64_t t, std::size_t n) const;
  bool member_unchecked(const GSet& x, std::int64_t t, std::size_t n);
  GSet stable_unchecked(const GSet& x, std::int64_t t, std::size_t n);

  GSet t_;
  GSet a_m_;
  GSet a_2m_;
  std::size_t max_rank_;
  std::uint64_t budget_;
  std::uint64_t evaluations_ = 0;
  std::unordered_map<Key, bool, KeyHash> memo_;
};

/// One-shot wrappers around TrankEvaluator.
bool trank_member(const GSet& x, const ThickeningChain& chain, std::size_t i, std::int64_t t, std::size_t n,
                  const TrankContext& context, std::uint64_t budget = TrankEvaluator::kDefaultBudget);
GSet directed_stable_set(const GSet& x, const ThickeningChain& chain, std::size_t i, std::int64_t t,
                         std::size_t n, const TrankContext& context,
                         std::uint64_t budget = TrankEvaluator::kDefaultBudget);

}  // namespace rough
